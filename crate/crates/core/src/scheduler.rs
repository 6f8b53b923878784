//! Slot assignment by repeated kernel extraction, schedule validation and
//! the approximation guarantees.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::hyper::{find_kernel, Hypergraph, Orientation};
use crate::instance::{path_lambda, Capacity, Instance};
use crate::rational::Ratio;
use crate::relaxation::{DeadlineMode, LpSolution};
use crate::tol;

/// Identifies one unit of demand: copy `copy` of flow `flow` of job `job`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnitRef {
    pub job: usize,
    pub flow: usize,
    pub copy: u32,
}

/// Slot assignment of units (slots start at 1) with the derived per-job
/// completion times and weighted objective.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub units: Vec<UnitRef>,
    pub slot_of: Vec<u32>,
    /// Last slot used by each job, 0 for a job without units.
    pub completion: Vec<u32>,
    pub objective: f64,
}

impl Schedule {
    /// Builds a schedule and derives completions and objective from the
    /// assignments; `weights` fixes the number of jobs. Units naming a job
    /// outside `weights` are kept but ignored for the objective.
    pub fn new(weights: &[f64], assignments: Vec<(UnitRef, u32)>) -> Self {
        let mut completion = alloc::vec![0u32; weights.len()];
        for (u, t) in &assignments {
            if let Some(c) = completion.get_mut(u.job) {
                *c = (*c).max(*t);
            }
        }
        let objective = weights.iter().zip(&completion).map(|(w, &c)| w * f64::from(c)).sum();
        let (units, slot_of) = assignments.into_iter().unzip();
        Self { units, slot_of, completion, objective }
    }

    pub fn by_slot(&self) -> BTreeMap<u32, Vec<usize>> {
        let mut out: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (i, &t) in self.slot_of.iter().enumerate() {
            out.entry(t).or_default().push(i);
        }
        out
    }

    pub fn horizon_used(&self) -> u32 {
        self.slot_of.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScheduleError {
    #[error("{remaining} units still unscheduled at horizon {horizon}")]
    Unscheduled { remaining: usize, horizon: u32 },
    #[error("orientation has {got} vertices, hypergraph has {expected} units")]
    SizeMismatch { expected: usize, got: usize },
}

fn ceil_slot(x: f64) -> u32 {
    let c = libm::ceil(x - 1e-9);
    if c < 0.0 {
        0
    } else {
        c as u32
    }
}

/// Horizon of the unit-capacity algorithm: `⌈max r + λ max D⌉`.
pub fn unit_horizon(h: &Hypergraph) -> u32 {
    let r = h.units.iter().map(|e| e.release).max().unwrap_or(0);
    let d = h.units.iter().map(|e| e.deadline).fold(0.0, f64::max);
    ceil_slot(f64::from(r) + h.lambda as f64 * d)
}

/// Horizon of the general-capacity algorithm: `⌈max r + λ max (D_e Δ(e))⌉`.
pub fn general_horizon(h: &Hypergraph) -> u32 {
    let r = h.units.iter().map(|e| e.release).max().unwrap_or(0);
    let d = h.units.iter().map(|e| e.deadline * f64::from(h.disparity(e.unit_id))).fold(0.0, f64::max);
    ceil_slot(f64::from(r) + h.lambda as f64 * d)
}

fn finish(h: &Hypergraph, slot_of: Vec<u32>) -> Schedule {
    let assignments = h
        .units
        .iter()
        .zip(slot_of)
        .map(|(e, t)| (UnitRef { job: e.job, flow: e.flow, copy: e.copy }, t))
        .collect();
    Schedule::new(&h.weights, assignments)
}

/// Unit capacities: in every slot, schedule a kernel of the released,
/// still unscheduled part of the orientation.
pub fn schedule_unit_capacity(h: &Hypergraph, o: &Orientation) -> Result<Schedule, ScheduleError> {
    if o.vertex_count() != h.units.len() {
        return Err(ScheduleError::SizeMismatch { expected: h.units.len(), got: o.vertex_count() });
    }
    let horizon = unit_horizon(h);
    let mut slot_of = alloc::vec![0u32; h.units.len()];
    let mut remaining = h.units.len();
    let mut view = alloc::vec![false; h.units.len()];
    for t in 1..=horizon {
        if remaining == 0 {
            break;
        }
        for e in &h.units {
            view[e.unit_id] = slot_of[e.unit_id] == 0 && t > e.release;
        }
        for e in find_kernel(o, &view) {
            slot_of[e] = t;
            remaining -= 1;
        }
    }
    if remaining > 0 {
        return Err(ScheduleError::Unscheduled { remaining, horizon });
    }
    Ok(finish(h, slot_of))
}

/// General capacities: within a slot, keep extracting kernels from the
/// released working set; after each kernel, saturated nodes knock their
/// units out of the working set for the rest of the slot.
pub fn schedule_general_capacity(h: &Hypergraph, o: &Orientation) -> Result<Schedule, ScheduleError> {
    if o.vertex_count() != h.units.len() {
        return Err(ScheduleError::SizeMismatch { expected: h.units.len(), got: o.vertex_count() });
    }
    let horizon = general_horizon(h);
    let by_node = h.units_by_node();
    let mut slot_of = alloc::vec![0u32; h.units.len()];
    let mut remaining = h.units.len();
    let mut working = alloc::vec![false; h.units.len()];
    for t in 1..=horizon {
        if remaining == 0 {
            break;
        }
        let mut residual: Vec<u32> = h.capacities.iter().map(|c| c.finite().unwrap_or(u32::MAX)).collect();
        let mut live = 0;
        for e in &h.units {
            let w = slot_of[e.unit_id] == 0 && t > e.release;
            working[e.unit_id] = w;
            live += usize::from(w);
        }
        while live > 0 {
            let kernel = find_kernel(o, &working);
            debug_assert!(!kernel.is_empty());
            let mut saturated = Vec::new();
            for &e in &kernel {
                slot_of[e] = t;
                remaining -= 1;
                working[e] = false;
                live -= 1;
                for &v in &h.units[e].finite_nodes {
                    residual[v] -= 1;
                    if residual[v] == 0 {
                        saturated.push(v);
                    }
                }
            }
            for v in saturated {
                for &f in &by_node[v] {
                    if working[f] {
                        working[f] = false;
                        live -= 1;
                    }
                }
            }
        }
    }
    if remaining > 0 {
        return Err(ScheduleError::Unscheduled { remaining, horizon });
    }
    Ok(finish(h, slot_of))
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScheduleViolation {
    UnknownUnit { unit: UnitRef },
    Duplicate { unit: UnitRef },
    Missing { job: usize, flow: usize, scheduled: u32, demand: u32 },
    SlotZero { unit: UnitRef },
    Release { unit: UnitRef, slot: u32, release: u32 },
    Capacity { slot: u32, node: usize, load: u32, capacity: u32 },
    Completion { job: usize, stored: u32, recomputed: u32 },
    Objective { stored: f64, recomputed: f64 },
    JobCount { stored: usize, expected: usize },
}

impl fmt::Display for ScheduleViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleViolation::UnknownUnit { unit } => write!(f, "unit {unit:?} does not exist"),
            ScheduleViolation::Duplicate { unit } => write!(f, "unit {unit:?} scheduled more than once"),
            ScheduleViolation::Missing { job, flow, scheduled, demand } => {
                write!(f, "job {job} flow {flow}: {scheduled} of {demand} units scheduled")
            }
            ScheduleViolation::SlotZero { unit } => write!(f, "unit {unit:?} in slot 0; slots start at 1"),
            ScheduleViolation::Release { unit, slot, release } => {
                write!(f, "unit {unit:?} in slot {slot} but released at {release}")
            }
            ScheduleViolation::Capacity { slot, node, load, capacity } => {
                write!(f, "slot {slot}: node {node} carries {load} units, capacity {capacity}")
            }
            ScheduleViolation::Completion { job, stored, recomputed } => {
                write!(f, "job {job}: completion {stored} recorded, {recomputed} recomputed")
            }
            ScheduleViolation::Objective { stored, recomputed } => {
                write!(f, "objective {stored} recorded, {recomputed} recomputed")
            }
            ScheduleViolation::JobCount { stored, expected } => {
                write!(f, "{stored} completion entries for {expected} jobs")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScheduleReport {
    pub violations: Vec<ScheduleViolation>,
}

impl ScheduleReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks coverage, releases and per-slot node capacities against the
/// instance, then recomputes completions and the objective.
pub fn validate_schedule(inst: &Instance, s: &Schedule) -> ScheduleReport {
    let mut violations = Vec::new();
    let mut seen: BTreeMap<UnitRef, ()> = BTreeMap::new();
    let mut counts: BTreeMap<(usize, usize), u32> = BTreeMap::new();
    let mut occupancy: BTreeMap<(u32, usize), u32> = BTreeMap::new();
    let mut completion = alloc::vec![0u32; inst.coflows.len()];
    for (&unit, &slot) in s.units.iter().zip(&s.slot_of) {
        let Some(flow) = inst.coflows.get(unit.job).and_then(|c| c.flows.get(unit.flow)) else {
            violations.push(ScheduleViolation::UnknownUnit { unit });
            continue;
        };
        if unit.copy >= flow.demand {
            violations.push(ScheduleViolation::UnknownUnit { unit });
            continue;
        }
        if seen.insert(unit, ()).is_some() {
            violations.push(ScheduleViolation::Duplicate { unit });
            continue;
        }
        *counts.entry((unit.job, unit.flow)).or_default() += 1;
        if slot == 0 {
            violations.push(ScheduleViolation::SlotZero { unit });
        }
        let release = inst.coflows[unit.job].release;
        if slot > 0 && slot <= release {
            violations.push(ScheduleViolation::Release { unit, slot, release });
        }
        for &v in &flow.path {
            if inst.nodes[v].capacity.is_finite() {
                *occupancy.entry((slot, v)).or_default() += 1;
            }
        }
        completion[unit.job] = completion[unit.job].max(slot);
    }
    for (k, c) in inst.coflows.iter().enumerate() {
        for (j, f) in c.flows.iter().enumerate() {
            let scheduled = counts.get(&(k, j)).copied().unwrap_or(0);
            if scheduled != f.demand {
                violations.push(ScheduleViolation::Missing { job: k, flow: j, scheduled, demand: f.demand });
            }
        }
    }
    for (&(slot, node), &load) in &occupancy {
        if let Capacity::Finite(capacity) = inst.nodes[node].capacity {
            if load > capacity {
                violations.push(ScheduleViolation::Capacity { slot, node, load, capacity });
            }
        }
    }
    if s.completion.len() != completion.len() {
        violations.push(ScheduleViolation::JobCount { stored: s.completion.len(), expected: completion.len() });
    } else {
        for (job, (&stored, &recomputed)) in s.completion.iter().zip(&completion).enumerate() {
            if stored != recomputed {
                violations.push(ScheduleViolation::Completion { job, stored, recomputed });
            }
        }
    }
    let recomputed: f64 = inst.coflows.iter().zip(&completion).map(|(c, &t)| c.weight * f64::from(t)).sum();
    if (recomputed - s.objective).abs() > tol::scaled(tol::BOUND_SLACK, recomputed) {
        violations.push(ScheduleViolation::Objective { stored: s.objective, recomputed });
    }
    ScheduleReport { violations }
}

/// Per-unit finish-time guarantees.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FinishBound {
    /// `slot ≤ r_e + λ D_e`.
    Unit,
    /// `slot ≤ r_e + λ D_e − (λ − 1)`.
    UnitSharp,
    /// `slot ≤ r_e + λ D_e Δ(e)`.
    General,
    /// `slot ≤ r_e + ⌈λ D_e Δ(e)⌉`. A unit that is not scheduled loses at
    /// least `min u` out-neighbours per slot, so it is placed within
    /// `⌊d⁺(e)/min u⌋ + 1` slots, and `d⁺(e)/min u < λ D_e Δ(e)`. This is the
    /// form that survives deadlines for which `D_e · avg(e)` is tight.
    GeneralRounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FinishViolation {
    pub unit: usize,
    pub slot: u32,
    pub bound: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FinishReport {
    pub checked: usize,
    pub violations: Vec<FinishViolation>,
}

impl FinishReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `s` must come from a scheduler run on `h` (unit ids aligned).
pub fn check_finish_bounds(h: &Hypergraph, s: &Schedule, kind: FinishBound) -> FinishReport {
    let lambda = h.lambda as f64;
    let mut report = FinishReport::default();
    for e in &h.units {
        let r = f64::from(e.release);
        let bound = match kind {
            FinishBound::Unit => r + lambda * e.deadline,
            FinishBound::UnitSharp => r + lambda * e.deadline - (lambda - 1.0),
            FinishBound::General => r + lambda * e.deadline * f64::from(h.disparity(e.unit_id)),
            FinishBound::GeneralRounded => {
                r + libm::ceil(lambda * e.deadline * f64::from(h.disparity(e.unit_id)) - tol::DEADLINE_SLACK)
            }
        };
        let slot = s.slot_of[e.unit_id];
        report.checked += 1;
        if f64::from(slot) > bound + tol::BOUND_SLACK {
            report.violations.push(FinishViolation { unit: e.unit_id, slot, bound });
        }
    }
    report
}

/// The guarantee that applies to a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Guarantee {
    /// `2λ`, zero releases.
    StandardZeroRelease,
    /// `2λ + 1`.
    Standard,
    /// `2nλ/(n+1)`, all releases below λ.
    ImprovedSmallRelease,
    /// `2nλ/(n+1) + 1`.
    Improved,
    /// `2λΔ`, zero releases.
    CapacityZeroRelease,
    /// `2λΔ + 1`.
    Capacity,
}

impl Guarantee {
    pub fn select(inst: &Instance, deadlines: DeadlineMode) -> Self {
        let lambda = path_lambda(inst).effective() as u32;
        let zero = inst.zero_releases();
        if !inst.unit_capacities() {
            // improved deadlines only support the rounded finish bound here
            return if zero && deadlines == DeadlineMode::Standard {
                Guarantee::CapacityZeroRelease
            } else {
                Guarantee::Capacity
            };
        }
        match deadlines {
            DeadlineMode::Standard if zero => Guarantee::StandardZeroRelease,
            DeadlineMode::Standard => Guarantee::Standard,
            DeadlineMode::Improved if inst.coflows.iter().all(|c| c.release < lambda) => {
                Guarantee::ImprovedSmallRelease
            }
            DeadlineMode::Improved => Guarantee::Improved,
        }
    }

    pub fn factor(self, lambda: usize, delta: u32, jobs: usize) -> f64 {
        let l = lambda as f64;
        let n = jobs as f64;
        let d = f64::from(delta);
        match self {
            Guarantee::StandardZeroRelease => 2.0 * l,
            Guarantee::Standard => 2.0 * l + 1.0,
            Guarantee::ImprovedSmallRelease => 2.0 * n / (n + 1.0) * l,
            Guarantee::Improved => 2.0 * n / (n + 1.0) * l + 1.0,
            Guarantee::CapacityZeroRelease => 2.0 * l * d,
            Guarantee::Capacity => 2.0 * l * d + 1.0,
        }
    }

    /// The factor as an exact fraction.
    pub fn exact(self, lambda: usize, delta: u32, jobs: usize) -> Ratio {
        let l = lambda as i64;
        let n = jobs as i64;
        let d = i64::from(delta);
        match self {
            Guarantee::StandardZeroRelease => Ratio::new(2 * l, 1),
            Guarantee::Standard => Ratio::new(2 * l + 1, 1),
            Guarantee::ImprovedSmallRelease => Ratio::new(2 * n * l, (n + 1) as u64),
            Guarantee::Improved => Ratio::new(2 * n * l + n + 1, (n + 1) as u64),
            Guarantee::CapacityZeroRelease => Ratio::new(2 * l * d, 1),
            Guarantee::Capacity => Ratio::new(2 * l * d + 1, 1),
        }
    }

    pub fn formula(self) -> &'static str {
        match self {
            Guarantee::StandardZeroRelease => "2λ",
            Guarantee::Standard => "2λ+1",
            Guarantee::ImprovedSmallRelease => "2nλ/(n+1)",
            Guarantee::Improved => "2nλ/(n+1)+1",
            Guarantee::CapacityZeroRelease => "2λΔ",
            Guarantee::Capacity => "2λΔ+1",
        }
    }
}

impl fmt::Display for Guarantee {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.formula())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioReport {
    pub lp_objective: f64,
    pub alg_objective: f64,
    pub oracle_objective: Option<f64>,
    pub lambda: usize,
    pub delta: u32,
    pub jobs: usize,
    pub guarantee: Guarantee,
    pub bound_used: f64,
    pub bound_exact: Ratio,
    pub ratio_vs_lp: f64,
    pub ratio_vs_opt: Option<f64>,
    /// `alg ≤ bound · lp` and, with an oracle value, `lp ≤ opt` and
    /// `alg ≤ bound · opt`, all with [`tol::BOUND_SLACK`].
    pub bound_satisfied: bool,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num <= 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

/// Largest capacity disparity over all flows of the instance.
pub fn instance_disparity(inst: &Instance) -> u32 {
    let mut delta = 1;
    for f in inst.coflows.iter().flat_map(|c| &c.flows) {
        let caps: Vec<u32> = f.path.iter().filter_map(|&v| inst.nodes[v].capacity.finite()).collect();
        if let Some(&min) = caps.iter().min() {
            let avg = caps.iter().map(|&u| f64::from(u)).sum::<f64>() / caps.len() as f64;
            delta = delta.max(libm::ceil(avg / f64::from(min) - 1e-12) as u32);
        }
    }
    delta
}

pub fn evaluate(
    inst: &Instance,
    lp: &LpSolution,
    s: &Schedule,
    deadlines: DeadlineMode,
    oracle_opt: Option<f64>,
) -> RatioReport {
    let lambda = path_lambda(inst).effective();
    let delta = instance_disparity(inst);
    let jobs = inst.coflows.len();
    let guarantee = Guarantee::select(inst, deadlines);
    let bound_used = guarantee.factor(lambda, delta, jobs);
    let alg = s.objective;
    let within = |value: f64, limit: f64| value <= limit + tol::scaled(tol::BOUND_SLACK, limit);
    let mut ok = within(alg, bound_used * lp.lp_objective);
    if let Some(opt) = oracle_opt {
        ok &= within(lp.lp_objective, opt) && within(alg, bound_used * opt);
    }
    RatioReport {
        lp_objective: lp.lp_objective,
        alg_objective: alg,
        oracle_objective: oracle_opt,
        lambda,
        delta,
        jobs,
        guarantee,
        bound_used,
        bound_exact: guarantee.exact(lambda, delta, jobs),
        ratio_vs_lp: ratio(alg, lp.lp_objective),
        ratio_vs_opt: oracle_opt.map(|opt| ratio(alg, opt)),
        bound_satisfied: ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyper::{build_hypergraph, build_line_adjacency, orient, DEFAULT_EXPANSION_CAP};
    use crate::instance::{gen_triangle, Coflow, Flow, Node};
    use crate::relaxation::DeadlineSet;
    use alloc::vec;

    fn build(inst: &Instance, d: Vec<f64>) -> (Hypergraph, Orientation) {
        let h = build_hypergraph(inst, &DeadlineSet { mode: DeadlineMode::Standard, d }, DEFAULT_EXPANSION_CAP).unwrap();
        let o = orient(&h, &build_line_adjacency(&h));
        (h, o)
    }

    #[test]
    fn triangle_takes_three_slots() {
        let inst = gen_triangle();
        let (h, o) = build(&inst, vec![4.0]);
        let s = schedule_unit_capacity(&h, &o).unwrap();
        let mut slots = s.slot_of.clone();
        slots.sort();
        assert_eq!(slots, vec![1, 2, 3]);
        assert_eq!(s.completion, vec![3]);
        assert_eq!(s.objective, 3.0);
        assert!(validate_schedule(&inst, &s).is_ok());
        assert!(check_finish_bounds(&h, &s, FinishBound::Unit).is_ok());
        assert!(check_finish_bounds(&h, &s, FinishBound::UnitSharp).is_ok());
        assert_eq!(unit_horizon(&h), 8);
    }

    #[test]
    fn single_and_disjoint_units() {
        let inst = Instance {
            name: None,
            nodes: vec![Node::new("a", Capacity::Finite(1)), Node::new("b", Capacity::Finite(1))],
            coflows: vec![Coflow::new(1.0, 0, vec![Flow::new(vec![0], 1), Flow::new(vec![1], 1)])],
        };
        let (h, o) = build(&inst, vec![1.0]);
        let s = schedule_unit_capacity(&h, &o).unwrap();
        assert_eq!(s.slot_of, vec![1, 1]);
        let one = Instance { coflows: vec![Coflow::new(1.0, 0, vec![Flow::new(vec![0], 1)])], ..inst };
        let (h, o) = build(&one, vec![1.0]);
        assert_eq!(schedule_unit_capacity(&h, &o).unwrap().slot_of, vec![1]);
    }

    #[test]
    fn triangle_with_capacity_two_fits_one_slot() {
        let mut inst = gen_triangle();
        for n in &mut inst.nodes {
            n.capacity = Capacity::Finite(2);
        }
        let (h, o) = build(&inst, vec![2.0]);
        let s = schedule_general_capacity(&h, &o).unwrap();
        assert_eq!(s.slot_of, vec![1, 1, 1]);
        assert_eq!(s.objective, 1.0);
        assert!(validate_schedule(&inst, &s).is_ok());
        assert!(check_finish_bounds(&h, &s, FinishBound::General).is_ok());
    }

    #[test]
    fn general_matches_unit_on_unit_capacities() {
        let inst = gen_triangle();
        let (h, o) = build(&inst, vec![4.0]);
        assert_eq!(schedule_unit_capacity(&h, &o).unwrap(), schedule_general_capacity(&h, &o).unwrap());
    }

    #[test]
    fn releases_delay_units() {
        let inst = Instance {
            name: None,
            nodes: vec![Node::new("a", Capacity::Finite(1))],
            coflows: vec![Coflow::new(2.0, 3, vec![Flow::new(vec![0], 2)])],
        };
        let (h, o) = build(&inst, vec![10.0]);
        let s = schedule_unit_capacity(&h, &o).unwrap();
        assert_eq!(s.slot_of, vec![4, 5]);
        assert_eq!(s.objective, 10.0);
    }

    #[test]
    fn unscheduled_units_are_reported() {
        let inst = Instance {
            name: None,
            nodes: vec![Node::new("a", Capacity::Finite(1))],
            coflows: vec![Coflow::new(1.0, 0, vec![Flow::new(vec![0], 3)])],
        };
        // deadline far too small for three conflicting units
        let (h, o) = build(&inst, vec![1.0]);
        assert_eq!(schedule_unit_capacity(&h, &o), Err(ScheduleError::Unscheduled { remaining: 2, horizon: 1 }));
    }

    #[test]
    fn two_slot_triangle_is_rejected() {
        let inst = gen_triangle();
        let u = |flow| UnitRef { job: 0, flow, copy: 0 };
        for pairing in [[1, 1, 2], [1, 2, 1], [2, 1, 1]] {
            let s = Schedule::new(&[1.0], (0..3).map(|f| (u(f), pairing[f])).collect());
            let report = validate_schedule(&inst, &s);
            assert!(report.violations.iter().any(|v| matches!(v, ScheduleViolation::Capacity { .. })));
        }
    }

    #[test]
    fn release_and_coverage_violations() {
        let inst = Instance {
            name: None,
            nodes: vec![Node::new("a", Capacity::Finite(1))],
            coflows: vec![Coflow::new(1.0, 2, vec![Flow::new(vec![0], 2)])],
        };
        let u = |copy| UnitRef { job: 0, flow: 0, copy };
        let s = Schedule::new(&[1.0], vec![(u(0), 2), (u(0), 3), (u(5), 4)]);
        let v = validate_schedule(&inst, &s).violations;
        assert!(v.contains(&ScheduleViolation::Release { unit: u(0), slot: 2, release: 2 }));
        assert!(v.contains(&ScheduleViolation::Duplicate { unit: u(0) }));
        assert!(v.contains(&ScheduleViolation::UnknownUnit { unit: u(5) }));
        assert!(v.contains(&ScheduleViolation::Missing { job: 0, flow: 0, scheduled: 1, demand: 2 }));
        let mut tampered = Schedule::new(&[1.0], vec![(u(0), 3), (u(1), 4)]);
        assert!(validate_schedule(&inst, &tampered).is_ok());
        tampered.objective = 7.0;
        tampered.completion[0] = 9;
        let v = validate_schedule(&inst, &tampered).violations;
        assert_eq!(v.len(), 2);
    }

    #[test]
    fn tight_improved_deadline_needs_the_rounded_bound() {
        // four units on a capacity-3 node; the single job gets D = C* = 4/3
        let inst = Instance {
            name: None,
            nodes: vec![Node::new("a", Capacity::Finite(3))],
            coflows: vec![Coflow::new(1.0, 0, vec![Flow::new(vec![0], 4)])],
        };
        let h = build_hypergraph(&inst, &DeadlineSet { mode: DeadlineMode::Improved, d: vec![4.0 / 3.0] }, 100).unwrap();
        let o = orient(&h, &build_line_adjacency(&h));
        let s = schedule_general_capacity(&h, &o).unwrap();
        assert_eq!(s.completion, vec![2]);
        assert!(!check_finish_bounds(&h, &s, FinishBound::General).is_ok());
        assert!(check_finish_bounds(&h, &s, FinishBound::GeneralRounded).is_ok());
    }

    #[test]
    fn guarantee_selection() {
        let mut inst = gen_triangle();
        assert_eq!(Guarantee::select(&inst, DeadlineMode::Standard), Guarantee::StandardZeroRelease);
        assert_eq!(Guarantee::select(&inst, DeadlineMode::Improved), Guarantee::ImprovedSmallRelease);
        assert_eq!(Guarantee::ImprovedSmallRelease.factor(3, 1, 1), 3.0);
        inst.coflows[0].release = 1;
        assert_eq!(Guarantee::select(&inst, DeadlineMode::Standard), Guarantee::Standard);
        assert_eq!(Guarantee::select(&inst, DeadlineMode::Improved), Guarantee::ImprovedSmallRelease);
        inst.coflows[0].release = 2;
        assert_eq!(Guarantee::select(&inst, DeadlineMode::Improved), Guarantee::Improved);
        inst.nodes[0].capacity = Capacity::Finite(3);
        assert_eq!(Guarantee::select(&inst, DeadlineMode::Standard), Guarantee::Capacity);
        inst.coflows[0].release = 0;
        assert_eq!(Guarantee::select(&inst, DeadlineMode::Standard), Guarantee::CapacityZeroRelease);
        assert_eq!(Guarantee::select(&inst, DeadlineMode::Improved), Guarantee::Capacity);
        assert_eq!(instance_disparity(&inst), 2);
        assert_eq!(Guarantee::Capacity.factor(2, 2, 1), 9.0);
        assert_eq!(Guarantee::Improved.exact(2, 1, 3).to_string(), "4");
        assert_eq!(Guarantee::ImprovedSmallRelease.exact(3, 1, 4).to_string(), "24/5");
    }
}
