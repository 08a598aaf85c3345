//! Five-level semantic labels over equal-width bins of each indicator range.

pub const X_O_LABELS: [&str; 5] = [
    "very unlikely to meet standard",
    "unlikely to meet standard",
    "about even odds of meeting standard",
    "likely to meet standard",
    "very likely to meet standard",
];

pub const X_S_LABELS: [&str; 5] = [
    "much worse than trusted solver",
    "worse than trusted solver",
    "on par with trusted solver",
    "better than trusted solver",
    "much better than trusted solver",
];

/// Index of the equal-width bin of `[lo, hi]` holding `x`; the top edge
/// belongs to the last bin.
pub fn level(x: f64, lo: f64, hi: f64) -> usize {
    let i = ((x - lo) / (hi - lo) * 5.0).floor();
    i.clamp(0.0, 4.0) as usize
}

pub fn x_o_label(x_o: f64) -> &'static str {
    X_O_LABELS[level(x_o, -1.0, 1.0)]
}

pub fn x_s_label(x_s: f64) -> &'static str {
    X_S_LABELS[level(x_s, 0.0, 2.0)]
}
