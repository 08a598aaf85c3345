use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use famsec_core::delivery::GeneratorKind;
use famsec_core::outcome::OutcomeStandard;
use famsec_core::solver::SolverSpec;
use famsec_core::surrogate::SurrogateModel;
use famsec_harness::commands::{self, TrustedArg};
use famsec_harness::experiments::SurrogatePreset;
use famsec_harness::report::{Format, Output};
use famsec_harness::{run_experiment, ExperimentId, HarnessError, RunOptions};

/// Self-confidence indicators for MDP delivery agents.
#[derive(Parser)]
#[command(name = "famsec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Base seed for all randomness.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Monte-Carlo runs per solver (experiment default when omitted).
    #[arg(long, global = true)]
    runs: Option<usize>,
    /// Directory for report and CSV files; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Worker threads (all cores when omitted). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random road network, or a full admissible task.
    GenNetwork {
        /// watts_strogatz, expected_degree, erdos_renyi or static_scale_free.
        #[arg(long)]
        kind: Option<String>,
        /// Node count.
        #[arg(long)]
        n: Option<usize>,
        /// Emit a task document (start nodes, goal, parameters) instead.
        #[arg(long)]
        with_task: bool,
    },
    /// Outcome assessment of a solver on a task file.
    Assess {
        #[arg(long)]
        task: PathBuf,
        /// Minimal acceptable cumulative reward.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        zstar: f64,
        /// Partial-moment order.
        #[arg(long, default_value_t = 1)]
        alpha: u32,
        /// Logistic steepness.
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        /// `vi` or `mcts:depth=D,its=N,explore=E[,horizon=H]`.
        #[arg(long, default_value = "vi")]
        solver: String,
    },
    /// Solver quality of a candidate relative to a trusted solver.
    Solverq {
        #[arg(long)]
        task: PathBuf,
        /// A solver (as for --candidate) or `model:PATH` for a surrogate.
        #[arg(long)]
        trusted: String,
        #[arg(long)]
        candidate: String,
    },
    /// Train or query surrogate models of the trusted solver.
    Surrogate {
        #[command(subcommand)]
        action: SurrogateCommand,
    },
    /// Run one of the built-in experiments.
    Experiment {
        /// exp1, exp2, exp3, exp4, synthetic_xo, synthetic_xs, env_difficulty,
        /// calibration or surrogate_pipeline.
        id: String,
        /// Surrogate model file (exp3 and exp4).
        #[arg(long)]
        model: Option<PathBuf>,
        /// Task count for batch experiments.
        #[arg(long)]
        tasks: Option<usize>,
        /// Trusted solver tree depth.
        #[arg(long)]
        trusted_depth: Option<u32>,
    },
}

#[derive(Subcommand)]
enum SurrogateCommand {
    /// Generate training data and fit a surrogate; needs --out.
    Train {
        /// random-tasks, exp3 or exp4.
        #[arg(long, default_value = "random-tasks")]
        preset: String,
        #[arg(long)]
        tasks: Option<usize>,
        #[arg(long)]
        trusted_depth: Option<u32>,
        #[arg(long)]
        epochs: Option<usize>,
    },
    /// Predict the trusted solver's reward mean and spread on a task.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        task: PathBuf,
        /// Solver whose parameters fill solver features.
        #[arg(long, default_value = "mcts:depth=8,its=1000,explore=1000,horizon=8")]
        solver: String,
    },
}

fn emit(output: &Output, out: Option<&Path>, format: Format) -> Result<(), HarnessError> {
    match out {
        Some(dir) => {
            for path in output.write(dir, format)? {
                println!("{}", path.display());
            }
        }
        None => print!("{}", output.render(format)),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| HarnessError::Runtime(e.to_string()))?;
    }
    let format = match cli.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    let out = cli.out.as_deref();
    let opts = RunOptions {
        seed: cli.seed,
        runs: cli.runs,
        ..RunOptions::default()
    };
    match cli.command {
        Command::GenNetwork { kind, n, with_task } => {
            let kind = kind.map(|k| k.parse::<GeneratorKind>()).transpose()?;
            let (name, text) = commands::gen_network(kind, n, with_task, cli.seed)?;
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    let path = dir.join(name);
                    std::fs::write(&path, text)?;
                    println!("{}", path.display());
                }
                None => print!("{text}"),
            }
        }
        Command::Assess {
            task,
            zstar,
            alpha,
            k,
            solver,
        } => {
            let task = commands::load_task(&task)?;
            let solver: SolverSpec = solver.parse()?;
            let standard = OutcomeStandard::new(zstar, alpha, k)?;
            let output = commands::assess(&task, standard, &solver, cli.runs.unwrap_or(1000), cli.seed)?;
            emit(&output, out, format)?;
        }
        Command::Solverq {
            task,
            trusted,
            candidate,
        } => {
            let task = commands::load_task(&task)?;
            let trusted: TrustedArg = trusted.parse()?;
            let candidate: SolverSpec = candidate.parse()?;
            let output = commands::solverq(&task, &trusted, &candidate, cli.runs.unwrap_or(1000), cli.seed)?;
            emit(&output, out, format)?;
        }
        Command::Surrogate { action } => match action {
            SurrogateCommand::Train {
                preset,
                tasks,
                trusted_depth,
                epochs,
            } => {
                let dir = out.ok_or_else(|| HarnessError::Validation("surrogate train needs --out DIR".into()))?;
                let preset: SurrogatePreset = preset.parse()?;
                let opts = RunOptions {
                    tasks,
                    trusted_depth,
                    ..opts
                };
                if opts.runs == Some(0) || opts.tasks == Some(0) || epochs == Some(0) {
                    return Err(HarnessError::Validation("--runs, --tasks and --epochs must be positive".into()));
                }
                let (output, model) = commands::surrogate_train(preset, &opts, epochs)?;
                std::fs::create_dir_all(dir)?;
                let model_path = dir.join("surrogate_model.json");
                model.save(&model_path)?;
                println!("{}", model_path.display());
                emit(&output, Some(dir), format)?;
            }
            SurrogateCommand::Predict { model, task, solver } => {
                let model = SurrogateModel::load(&model)?;
                let task = commands::load_task(&task)?;
                let solver: SolverSpec = solver.parse()?;
                let output = commands::surrogate_predict(&model, &task, &solver, cli.seed)?;
                emit(&output, out, format)?;
            }
        },
        Command::Experiment {
            id,
            model,
            tasks,
            trusted_depth,
        } => {
            let id: ExperimentId = id.parse()?;
            let opts = RunOptions {
                model,
                tasks,
                trusted_depth,
                ..opts
            };
            let output = run_experiment(id, &opts)?;
            emit(&output, out, format)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("famsec: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
