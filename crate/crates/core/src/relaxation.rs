//! LP relaxation of path-based coflow scheduling.
//!
//! Each finite-capacity node is treated as an independent machine of a
//! concurrent open shop. With `L(i,k)` the load of job `k` on node `i` and
//! `u(i)` its capacity the relaxation reads
//!
//! ```text
//! min  Σ_k w_k C_k
//! s.t. C_k ≥ r_k + L(i,k) / u(i)                        for all k, i
//!      C_k ≥ r_k + 1                                    for all k
//!      Σ_{k∈S} L(i,k) C_k ≥ f_i(S) / u(i)               for all S, i
//! f_i(S) = ½ (Σ_{k∈S} L(i,k)² + (Σ_{k∈S} L(i,k))²)
//! ```
//!
//! The exponential family of subset constraints is handled by cutting
//! planes: for a candidate `C` the most violated subset on machine `i` is a
//! prefix of the jobs sorted by `C`, so separation is a sort plus a scan.
//! Unbounded nodes never constrain and are skipped.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::instance::{loads, Capacity, Instance, LoadTable};
use crate::lp::{solve_lp, LinearProgram, LpError, LpOptions, LpStatus};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpMode {
    General,
    /// Same constraint system, restricted to instances whose paths all run
    /// from one side of a bipartition to the other.
    Bipartite,
}

/// `C_job ≥ rhs`, contributed by `machine` (or by the unit lower bound when
/// `machine` is `None`).
#[derive(Clone, Debug, PartialEq)]
pub struct BaseConstraint {
    pub job: usize,
    pub machine: Option<usize>,
    pub rhs: f64,
}

/// A subset constraint `Σ_{k∈jobs} L(machine,k) C_k ≥ rhs` found by
/// separation; `jobs` is the prefix of length `prefix_len` of the machine's
/// job order at generation time, `lhs` the candidate's value then.
#[derive(Clone, Debug, PartialEq)]
pub struct CutRecord {
    pub machine: usize,
    pub prefix_len: usize,
    pub jobs: Vec<usize>,
    pub lhs: f64,
    pub rhs: f64,
}

impl CutRecord {
    pub fn violation(&self) -> f64 {
        self.rhs - self.lhs
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub c_star: Vec<f64>,
    /// Jobs by non-decreasing `c_star`, ties by job index.
    pub order: Vec<usize>,
    pub lp_objective: f64,
    pub base: Vec<BaseConstraint>,
    pub cuts: Vec<CutRecord>,
    pub cuts_added: usize,
    /// Cutting-plane rounds (LP solves).
    pub iterations: usize,
    pub simplex_pivots: usize,
    pub trace: Option<String>,
}

impl LpSolution {
    /// 1-based position of each job in `order`.
    pub fn ranks(&self) -> Vec<usize> {
        let mut rank = alloc::vec![0; self.order.len()];
        for (pos, &k) in self.order.iter().enumerate() {
            rank[k] = pos + 1;
        }
        rank
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelaxOptions {
    pub separation_rel: f64,
    pub max_rounds: usize,
    pub lp: LpOptions,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        Self { separation_rel: tol::SEPARATION_REL, max_rounds: 1000, lp: LpOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RelaxError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("LP unexpectedly {0:?}")]
    Status(LpStatus),
    #[error("cutting-plane loop hit its cap of {rounds} rounds with {cuts} cuts (last objective {objective})")]
    RoundLimit { rounds: usize, cuts: usize, objective: f64, partial: Vec<f64> },
    #[error("instance is not bipartite: {0}")]
    NotBipartite(&'static str),
}

fn finite_capacity(inst: &Instance, i: usize) -> Option<f64> {
    match inst.nodes[i].capacity {
        Capacity::Finite(u) => Some(f64::from(u)),
        Capacity::Unbounded => None,
    }
}

/// `C_k ≥ r_k + L(i,k)/u(i)` for every finite machine with positive load,
/// then `C_k ≥ r_k + 1` for every job.
pub fn build_base_constraints(inst: &Instance) -> Vec<BaseConstraint> {
    base_constraints_with(inst, &loads(inst))
}

fn base_constraints_with(inst: &Instance, table: &LoadTable) -> Vec<BaseConstraint> {
    let mut out = Vec::new();
    for (k, coflow) in inst.coflows.iter().enumerate() {
        let r = f64::from(coflow.release);
        for i in 0..inst.nodes.len() {
            let load = table.get(i, k);
            if load == 0 {
                continue;
            }
            if let Some(u) = finite_capacity(inst, i) {
                out.push(BaseConstraint { job: k, machine: Some(i), rhs: r + load as f64 / u });
            }
        }
        out.push(BaseConstraint { job: k, machine: None, rhs: r + 1.0 });
    }
    out
}

/// `f_i(S) / u(i)` for the given loads.
pub fn subset_rhs(loads: impl IntoIterator<Item = u64>, capacity: f64) -> f64 {
    let (mut squares, mut sum) = (0.0, 0.0);
    for l in loads {
        let l = l as f64;
        squares += l * l;
        sum += l;
    }
    0.5 * (squares + sum * sum) / capacity
}

fn by_value_then_index(c: &[f64]) -> impl Fn(&usize, &usize) -> Ordering + '_ {
    move |&a, &b| c[a].total_cmp(&c[b]).then(a.cmp(&b))
}

/// Most violated prefix cut per finite machine, in machine order; empty when
/// `c` satisfies every subset constraint up to the separation tolerance.
pub fn separate(inst: &Instance, c: &[f64]) -> Vec<CutRecord> {
    separate_with(inst, &loads(inst), c, tol::SEPARATION_REL)
}

fn separate_with(inst: &Instance, table: &LoadTable, c: &[f64], rel: f64) -> Vec<CutRecord> {
    let mut cuts = Vec::new();
    let jobs = inst.coflows.len();
    for i in 0..inst.nodes.len() {
        let Some(u) = finite_capacity(inst, i) else {
            continue;
        };
        let mut active: Vec<usize> = (0..jobs).filter(|&k| table.get(i, k) > 0).collect();
        if active.is_empty() {
            continue;
        }
        active.sort_by(by_value_then_index(c));
        let (mut squares, mut sum, mut lhs) = (0.0, 0.0, 0.0);
        let mut best: Option<(usize, f64, f64, f64)> = None;
        for (pos, &k) in active.iter().enumerate() {
            let l = table.get(i, k) as f64;
            squares += l * l;
            sum += l;
            lhs += l * c[k];
            let rhs = 0.5 * (squares + sum * sum) / u;
            let violation = rhs - lhs;
            if violation > rel * rhs.abs().max(1.0) && best.is_none_or(|(_, v, _, _)| violation > v) {
                best = Some((pos + 1, violation, lhs, rhs));
            }
        }
        if let Some((len, _, lhs, rhs)) = best {
            cuts.push(CutRecord { machine: i, prefix_len: len, jobs: active[..len].to_vec(), lhs, rhs });
        }
    }
    cuts
}

/// Checks that every path has exactly two nodes and the nodes split into
/// two sides with every path crossing between them.
pub fn check_bipartite(inst: &Instance) -> Result<(), RelaxError> {
    let n = inst.nodes.len();
    let mut adj: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
    for f in inst.coflows.iter().flat_map(|c| &c.flows) {
        if f.path.len() != 2 {
            return Err(RelaxError::NotBipartite("a path does not have exactly two nodes"));
        }
        adj[f.path[0]].push(f.path[1]);
        adj[f.path[1]].push(f.path[0]);
    }
    let mut side: Vec<Option<bool>> = alloc::vec![None; n];
    for start in 0..n {
        if side[start].is_some() {
            continue;
        }
        side[start] = Some(false);
        let mut stack = alloc::vec![start];
        while let Some(v) = stack.pop() {
            let s = side[v].unwrap();
            for &w in &adj[v] {
                match side[w] {
                    None => {
                        side[w] = Some(!s);
                        stack.push(w);
                    }
                    Some(t) if t == s => return Err(RelaxError::NotBipartite("an odd cycle links the ports")),
                    Some(_) => {}
                }
            }
        }
    }
    Ok(())
}

pub fn solve_relaxation(inst: &Instance, mode: LpMode, opts: &RelaxOptions) -> Result<LpSolution, RelaxError> {
    if mode == LpMode::Bipartite {
        check_bipartite(inst)?;
    }
    let n = inst.coflows.len();
    let table = loads(inst);
    let base = base_constraints_with(inst, &table);

    // Base constraints collapse to one lower bound per job.
    let mut lower = alloc::vec![0.0f64; n];
    for b in &base {
        lower[b.job] = lower[b.job].max(b.rhs);
    }
    let mut lp = LinearProgram::new(inst.coflows.iter().map(|c| c.weight).collect());
    for (k, &bound) in lower.iter().enumerate() {
        let mut coeffs = alloc::vec![0.0; n];
        coeffs[k] = 1.0;
        lp.push(coeffs, bound);
    }

    let mut cuts: Vec<CutRecord> = Vec::new();
    let mut pivots = 0;
    let mut trace = if opts.lp.trace { Some(String::new()) } else { None };
    for round in 1..=opts.max_rounds {
        let result = solve_lp(&lp, &opts.lp)?;
        pivots += result.iterations;
        if let (Some(log), Some(step)) = (trace.as_mut(), result.trace.as_ref()) {
            log.push_str(&alloc::format!("-- round {round}, {} constraints\n", lp.constraints.len()));
            log.push_str(step);
        }
        if result.status != LpStatus::Optimal {
            return Err(RelaxError::Status(result.status));
        }
        let c = result.values;
        let found = separate_with(inst, &table, &c, opts.separation_rel);
        if found.is_empty() {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(by_value_then_index(&c));
            let lp_objective = inst.coflows.iter().zip(&c).map(|(co, x)| co.weight * x).sum();
            return Ok(LpSolution {
                c_star: c,
                order,
                lp_objective,
                base,
                cuts_added: cuts.len(),
                cuts,
                iterations: round,
                simplex_pivots: pivots,
                trace,
            });
        }
        for cut in found {
            let mut coeffs = alloc::vec![0.0; n];
            for &k in &cut.jobs {
                coeffs[k] = table.get(cut.machine, k) as f64;
            }
            lp.push(coeffs, cut.rhs);
            cuts.push(cut);
        }
        if round == opts.max_rounds {
            let objective = inst.coflows.iter().zip(&c).map(|(co, x)| co.weight * x).sum();
            return Err(RelaxError::RoundLimit { rounds: round, cuts: cuts.len(), objective, partial: c });
        }
    }
    Err(RelaxError::RoundLimit { rounds: 0, cuts: 0, objective: f64::NAN, partial: Vec::new() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeadlineMode {
    /// `D_k = 2 C*_k`.
    Standard,
    /// `D_k = 2k/(k+1) · C*_k` with `k` the job's 1-based rank.
    Improved,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeadlineSet {
    pub mode: DeadlineMode,
    /// Per job index.
    pub d: Vec<f64>,
}

pub fn deadlines(sol: &LpSolution, mode: DeadlineMode) -> DeadlineSet {
    let d = match mode {
        DeadlineMode::Standard => sol.c_star.iter().map(|c| 2.0 * c).collect(),
        DeadlineMode::Improved => {
            let ranks = sol.ranks();
            sol.c_star
                .iter()
                .zip(&ranks)
                .map(|(c, &k)| {
                    let k = k as f64;
                    2.0 * k / (k + 1.0) * c
                })
                .collect()
        }
    };
    DeadlineSet { mode, d }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LemmaKind {
    /// `C*_k ≥ (1/2u) Σ_{l≤k} L(i,l)`.
    HalfPrefix,
    /// `C*_k ≥ ((k+1)/2k)(1/u) Σ_{l≤k} L(i,l)`.
    SharpenedPrefix,
    /// `D_k ≥ Σ_{l≤k} L(i,l)/u`.
    DeadlineCoversPrefix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LemmaViolation {
    pub kind: LemmaKind,
    pub job: usize,
    pub machine: usize,
    pub value: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LemmaReport {
    pub checked: usize,
    pub violations: Vec<LemmaViolation>,
}

impl LemmaReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Prefix loads along `order` divided by capacity: `out[pos][i]` is
/// `Σ_{l ≤ pos} L(i, order[l]) / u(i)` for finite machines.
fn prefix_loads(inst: &Instance, table: &LoadTable, order: &[usize]) -> Vec<Vec<(usize, f64)>> {
    let machines: Vec<(usize, f64)> =
        (0..inst.nodes.len()).filter_map(|i| finite_capacity(inst, i).map(|u| (i, u))).collect();
    let mut running = alloc::vec![0.0; machines.len()];
    let mut out = Vec::with_capacity(order.len());
    for &k in order {
        let mut row = Vec::with_capacity(machines.len());
        for (m, &(i, u)) in machines.iter().enumerate() {
            running[m] += table.get(i, k) as f64;
            row.push((i, running[m] / u));
        }
        out.push(row);
    }
    out
}

/// Verifies the prefix lower bounds implied by the subset constraints, in
/// both the basic (½) and the sharpened ((k+1)/2k) form.
pub fn check_lemma1(inst: &Instance, sol: &LpSolution) -> LemmaReport {
    let table = loads(inst);
    let mut report = LemmaReport::default();
    for (pos, row) in prefix_loads(inst, &table, &sol.order).iter().enumerate() {
        let k = sol.order[pos];
        let rank = (pos + 1) as f64;
        let value = sol.c_star[k];
        for &(i, prefix) in row {
            let forms = [
                (LemmaKind::HalfPrefix, 0.5 * prefix),
                (LemmaKind::SharpenedPrefix, (rank + 1.0) / (2.0 * rank) * prefix),
            ];
            for (kind, bound) in forms {
                report.checked += 1;
                if value < bound - tol::scaled(tol::BOUND_SLACK, bound) {
                    report.violations.push(LemmaViolation { kind, job: k, machine: i, value, bound });
                }
            }
        }
    }
    report
}

/// Verifies `D_k ≥ Σ_{l≤k} L(i,l)/u(i)` along the LP order.
pub fn check_deadline_cover(inst: &Instance, sol: &LpSolution, dl: &DeadlineSet) -> LemmaReport {
    let table = loads(inst);
    let mut report = LemmaReport::default();
    for (pos, row) in prefix_loads(inst, &table, &sol.order).iter().enumerate() {
        let k = sol.order[pos];
        for &(i, prefix) in row {
            report.checked += 1;
            if dl.d[k] < prefix - tol::scaled(tol::BOUND_SLACK, prefix) {
                report.violations.push(LemmaViolation {
                    kind: LemmaKind::DeadlineCoversPrefix,
                    job: k,
                    machine: i,
                    value: dl.d[k],
                    bound: prefix,
                });
            }
        }
    }
    report
}
