//! Numerical tolerances shared across the crate.
//!
//! Instance data is small-integer, so all of these sit far above f64
//! round-off and far below any meaningful difference between objective
//! values.

/// Primal feasibility tolerance of the simplex.
pub const LP_FEASIBILITY: f64 = 1e-9;

/// Reduced-cost tolerance of the simplex.
pub const LP_OPTIMALITY: f64 = 1e-9;

/// Relative violation a subset cut must exceed to be reported by the
/// separation routine: `violation > SEPARATION_REL * max(1, |rhs|)`.
pub const SEPARATION_REL: f64 = 1e-7;

/// Slack used when comparing objectives and per-unit finish times against
/// proven bounds.
pub const BOUND_SLACK: f64 = 1e-6;

/// Slack used for comparisons of reconstructed deadlines.
pub const DEADLINE_SLACK: f64 = 1e-9;

/// Largest denominator used when printing LP values as fractions.
pub const REPORT_DENOMINATOR: u64 = 1_000_000;

/// Relative slack scaled by the magnitude of the bound.
pub fn scaled(slack: f64, magnitude: f64) -> f64 {
    let m = magnitude.abs();
    if m > 1.0 {
        slack * m
    } else {
        slack
    }
}
