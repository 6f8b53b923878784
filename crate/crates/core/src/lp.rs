//! Dense two-phase tableau simplex for small problems of the form
//!
//! ```text
//! minimise  c·x   subject to  A x ≥ b,  x ≥ 0
//! ```
//!
//! Pivoting follows Bland's rule (lowest-index entering column, lowest-index
//! basic variable among tied ratios), which rules out cycling. Every row gets
//! a surplus and an artificial column; the artificial block starts as the
//! identity, so after the final pivot it holds `B^{-1}` and its reduced
//! costs give the dual multipliers.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::tol;

/// `coeffs · x ≥ rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(coeffs: Vec<f64>, rhs: f64) -> Self {
        Self { coeffs, rhs }
    }

    pub fn lhs(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().zip(x).map(|(a, b)| a * b).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub n_vars: usize,
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        Self { n_vars: objective.len(), objective, constraints: Vec::new() }
    }

    pub fn push(&mut self, coeffs: Vec<f64>, rhs: f64) {
        self.constraints.push(Constraint::new(coeffs, rhs));
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    /// Primal values; empty unless `status` is `Optimal`.
    pub values: Vec<f64>,
    pub objective_value: f64,
    /// Dual multipliers, one per constraint (`y ≥ 0`, `Aᵀy ≤ c`, `b·y` equal
    /// to the optimum); empty unless `Optimal`.
    pub duals: Vec<f64>,
    pub iterations: usize,
    /// Pivot log, filled when [`LpOptions::trace`] is set.
    pub trace: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LpOptions {
    pub max_iterations: usize,
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    pub trace: bool,
}

impl Default for LpOptions {
    fn default() -> Self {
        Self {
            max_iterations: 50_000,
            feasibility_tol: tol::LP_FEASIBILITY,
            optimality_tol: tol::LP_OPTIMALITY,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LpError {
    #[error("objective has {got} coefficients, expected {expected}")]
    ObjectiveLength { expected: usize, got: usize },
    #[error("constraint {index} has {got} coefficients, expected {expected}")]
    ConstraintLength { index: usize, expected: usize, got: usize },
    #[error("non-finite data in {0}")]
    NonFinite(&'static str),
    #[error("pivot limit of {0} reached")]
    IterationLimit(usize),
}

struct Tableau {
    rows: usize,
    width: usize,
    /// `rows × width`, last column is the right-hand side.
    cells: Vec<f64>,
    /// Reduced costs; last entry is minus the current objective value.
    cost: Vec<f64>,
    basis: Vec<usize>,
    iterations: usize,
    trace: Option<String>,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.cells[r * self.width + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.width - 1)
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let p = self.cells[pr * w + pc];
        for c in 0..w {
            self.cells[pr * w + c] /= p;
        }
        self.cells[pr * w + pc] = 1.0;
        for r in 0..self.rows {
            if r == pr {
                continue;
            }
            let factor = self.cells[r * w + pc];
            if factor != 0.0 {
                for c in 0..w {
                    self.cells[r * w + c] -= factor * self.cells[pr * w + c];
                }
                self.cells[r * w + pc] = 0.0;
            }
        }
        let factor = self.cost[pc];
        if factor != 0.0 {
            for c in 0..w {
                self.cost[c] -= factor * self.cells[pr * w + c];
            }
            self.cost[pc] = 0.0;
        }
        self.basis[pr] = pc;
    }

    /// Runs Bland pivots over columns `0..allowed`. Returns `false` when the
    /// objective is unbounded below.
    fn optimise(&mut self, allowed: usize, phase: u8, opts: &LpOptions) -> Result<bool, LpError> {
        loop {
            let Some(enter) = (0..allowed).find(|&c| self.cost[c] < -opts.optimality_tol) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, enter);
                if a > opts.feasibility_tol {
                    let ratio = self.rhs(r) / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            let tie = (ratio - lratio).abs() <= opts.feasibility_tol;
                            if ratio < lratio - opts.feasibility_tol || (tie && self.basis[r] < self.basis[lr]) {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            let Some((row, ratio)) = leave else {
                return Ok(false);
            };
            if self.iterations >= opts.max_iterations {
                return Err(LpError::IterationLimit(opts.max_iterations));
            }
            self.iterations += 1;
            if let Some(log) = self.trace.as_mut() {
                let _ = writeln!(
                    log,
                    "phase {phase} pivot {}: enter col {enter}, leave row {row} (basic col {}), ratio {ratio:.9}, objective {:.9}",
                    self.iterations,
                    self.basis[row],
                    -self.cost[self.width - 1],
                );
            }
            self.pivot(row, enter);
        }
    }
}

fn check(lp: &LinearProgram) -> Result<(), LpError> {
    if lp.objective.len() != lp.n_vars {
        return Err(LpError::ObjectiveLength { expected: lp.n_vars, got: lp.objective.len() });
    }
    if lp.objective.iter().any(|c| !c.is_finite()) {
        return Err(LpError::NonFinite("objective"));
    }
    for (index, con) in lp.constraints.iter().enumerate() {
        if con.coeffs.len() != lp.n_vars {
            return Err(LpError::ConstraintLength { index, expected: lp.n_vars, got: con.coeffs.len() });
        }
        if !con.rhs.is_finite() || con.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(LpError::NonFinite("constraints"));
        }
    }
    Ok(())
}

pub fn solve_lp(lp: &LinearProgram, opts: &LpOptions) -> Result<LpResult, LpError> {
    check(lp)?;
    let n = lp.n_vars;
    let m = lp.constraints.len();
    // columns: x (n) | surplus (m) | artificial (m) | rhs
    let art0 = n + m;
    let width = n + 2 * m + 1;
    let mut cells = alloc::vec![0.0; m * width];
    let mut sign = alloc::vec![1.0; m];
    for (r, con) in lp.constraints.iter().enumerate() {
        let s = if con.rhs < 0.0 { -1.0 } else { 1.0 };
        sign[r] = s;
        let row = &mut cells[r * width..(r + 1) * width];
        for (c, &a) in con.coeffs.iter().enumerate() {
            row[c] = s * a;
        }
        row[n + r] = -s;
        row[art0 + r] = 1.0;
        row[width - 1] = s * con.rhs;
    }
    let mut t = Tableau {
        rows: m,
        width,
        cells,
        cost: alloc::vec![0.0; width],
        basis: (art0..art0 + m).collect(),
        iterations: 0,
        trace: if opts.trace { Some(String::new()) } else { None },
    };

    // Phase 1: minimise the sum of artificials.
    for c in 0..width {
        if (art0..art0 + m).contains(&c) {
            continue;
        }
        t.cost[c] = -(0..m).map(|r| t.at(r, c)).sum::<f64>();
    }
    t.optimise(art0, 1, opts)?;
    let infeasibility = -t.cost[width - 1];
    let scale = lp.constraints.iter().map(|c| c.rhs.abs()).fold(1.0, f64::max);
    if infeasibility > opts.feasibility_tol * scale {
        return Ok(LpResult {
            status: LpStatus::Infeasible,
            values: Vec::new(),
            objective_value: f64::NAN,
            duals: Vec::new(),
            iterations: t.iterations,
            trace: t.trace,
        });
    }
    // Drive zero-level artificials out of the basis where possible; rows
    // where that fails are redundant and stay pinned at zero.
    for r in 0..m {
        if t.basis[r] >= art0 {
            if let Some(c) = (0..art0).find(|&c| t.at(r, c).abs() > 1e-9) {
                t.pivot(r, c);
            }
        }
    }

    // Phase 2: original objective, artificials barred from entering.
    let mut cost = alloc::vec![0.0; width];
    cost[..n].copy_from_slice(&lp.objective);
    for r in 0..m {
        let cb = if t.basis[r] < n { lp.objective[t.basis[r]] } else { 0.0 };
        if cb != 0.0 {
            for (c, slot) in cost.iter_mut().enumerate() {
                *slot -= cb * t.at(r, c);
            }
        }
    }
    for r in 0..m {
        cost[t.basis[r]] = 0.0;
    }
    t.cost = cost;
    if !t.optimise(art0, 2, opts)? {
        return Ok(LpResult {
            status: LpStatus::Unbounded,
            values: Vec::new(),
            objective_value: f64::NEG_INFINITY,
            duals: Vec::new(),
            iterations: t.iterations,
            trace: t.trace,
        });
    }

    let mut values = alloc::vec![0.0; n];
    for r in 0..m {
        if t.basis[r] < n {
            values[t.basis[r]] = t.rhs(r).max(0.0);
        }
    }
    let objective_value = lp.objective.iter().zip(&values).map(|(c, x)| c * x).sum();
    // Reduced cost of artificial r is -y_r for the sign-normalised row.
    let duals = (0..m).map(|r| -t.cost[art0 + r] * sign[r]).collect();
    Ok(LpResult { status: LpStatus::Optimal, values, objective_value, duals, iterations: t.iterations, trace: t.trace })
}
