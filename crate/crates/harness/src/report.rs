//! Report envelope and CSV side tables.
//!
//! Reports carry everything needed to reproduce them (seed and resolved
//! configuration) and nothing that varies between runs, so identical
//! invocations produce byte-identical files.

use std::fmt::Display;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const TOOL: &str = "famsec";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    /// Subcommand or experiment id that produced the report.
    pub command: String,
    pub seed: u64,
    pub config: Value,
    pub results: Value,
    pub flags: Vec<String>,
}

impl Report {
    pub fn new(command: &str, seed: u64, config: Value, results: Value) -> Self {
        Report {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            seed,
            config,
            results,
            flags: Vec::new(),
        }
    }

    pub fn with_flags<I, S>(mut self, flags: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.flags.extend(flags.into_iter().map(Into::into));
        self
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("reports serialize");
        text.push('\n');
        text
    }
}

/// A named CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<I, D>(&mut self, row: I)
    where
        I: IntoIterator<Item = D>,
        D: Display,
    {
        self.rows.push(row.into_iter().map(|v| v.to_string()).collect());
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// A report plus its side tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub report: Report,
    pub tables: Vec<Table>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Output {
    pub fn new(report: Report) -> Self {
        Output {
            report,
            tables: Vec::new(),
        }
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.tables.push(table);
        self
    }

    /// Text for standard output: the report JSON, or every table with a
    /// `# name` line before each.
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.report.to_json(),
            Format::Csv => self
                .tables
                .iter()
                .map(|t| format!("# {}\n{}", t.name, t.to_csv()))
                .collect::<Vec<_>>()
                .join("\n"),
        }
    }

    /// Writes `<command>.json` (JSON format only) and `<command>_<table>.csv`
    /// files into `dir`, returning the paths written.
    pub fn write(&self, dir: &Path, format: Format) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        if format == Format::Json {
            let path = dir.join(format!("{}.json", self.report.command));
            fs::write(&path, self.report.to_json())?;
            written.push(path);
        }
        for table in &self.tables {
            let path = dir.join(format!("{}_{}.csv", self.report.command, table.name));
            fs::write(&path, table.to_csv())?;
            written.push(path);
        }
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn json_is_stable_and_has_no_clock() {
        let r = Report::new("demo", 7, json!({"b": 1, "a": 2}), json!([1.5])).with_flags(["x"]);
        let text = r.to_json();
        assert_eq!(text, r.clone().to_json());
        assert!(text.find("\"a\"").unwrap() < text.find("\"b\"").unwrap());
        assert!(!text.contains("time"));
    }

    #[test]
    fn tables_render_and_write() {
        let mut t = Table::new("rows", &["x", "y"]);
        t.push([1.0, 0.5]);
        t.push([2.0, -0.25]);
        assert_eq!(t.to_csv(), "x,y\n1,0.5\n2,-0.25\n");
        let out = Output::new(Report::new("demo", 1, json!({}), json!({}))).with_table(t);
        let dir = tempfile::tempdir().unwrap();
        let paths = out.write(dir.path(), Format::Json).unwrap();
        assert_eq!(paths.len(), 2);
        assert!(paths[1].ends_with("demo_rows.csv"));
        assert!(out.render(Format::Csv).starts_with("# rows\nx,y\n"));
    }
}
