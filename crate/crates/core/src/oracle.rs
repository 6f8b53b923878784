//! Reference solutions: an exact branch-and-bound scheduler for small
//! instances, exact chromatic numbers and a greedy list schedule.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::graph::SimpleGraph;
use crate::instance::{Capacity, Instance};
use crate::scheduler::{Schedule, UnitRef};

pub const DEFAULT_UNIT_CAP: u64 = 12;
pub const DEFAULT_VERTEX_CAP: usize = 12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("instance has {units} demand units, oracle cap is {cap}")]
    CapExceeded { units: u64, cap: u64 },
    #[error("horizon {horizon} exceeds cap {cap}")]
    HorizonExceeded { horizon: u64, cap: u64 },
    #[error("graph has {vertices} vertices, cap is {cap}")]
    VertexCapExceeded { vertices: usize, cap: usize },
    #[error("instance is not valid")]
    InvalidInstance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleOptions {
    pub unit_cap: u64,
    pub horizon_cap: u64,
    /// Search nodes before giving up on proving optimality.
    pub node_limit: u64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self { unit_cap: DEFAULT_UNIT_CAP, horizon_cap: 10_000, node_limit: 5_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    pub objective: f64,
    pub schedule: Schedule,
    pub nodes_explored: u64,
    /// False only when the node limit cut the search short; the schedule
    /// is then the best one found.
    pub proven_optimal: bool,
}

struct FlowInfo {
    job: usize,
    release: u32,
    demand: u32,
    finite: Vec<usize>,
}

struct Search<'a> {
    inst: &'a Instance,
    flows: Vec<FlowInfo>,
    caps: Vec<u32>,
    finite_nodes: Vec<usize>,
    job_flows: Vec<Vec<usize>>,
    best: f64,
    best_plan: Vec<(u32, Vec<u32>)>,
    plan: Vec<(u32, Vec<u32>)>,
    seen: BTreeMap<Vec<u32>, Vec<(u32, f64)>>,
    nodes: u64,
    node_limit: u64,
    aborted: bool,
}

impl Search<'_> {
    /// Lower bound on the weighted completion of unfinished jobs when the
    /// next free slot is `t`: the larger of the per-job bound (release or
    /// `t`, plus the heaviest remaining node load over its capacity) and,
    /// per node, the preemptive single-machine optimum under Smith's rule.
    fn lower_bound(&self, t: u32, rem: &[u32]) -> f64 {
        let jobs = self.inst.coflows.len();
        let mut load = alloc::vec![0u64; self.caps.len() * jobs];
        let mut open = alloc::vec![false; jobs];
        for (f, info) in self.flows.iter().enumerate() {
            if rem[f] == 0 {
                continue;
            }
            open[info.job] = true;
            for &v in &info.finite {
                load[v * jobs + info.job] += u64::from(rem[f]);
            }
        }
        let mut per_job = 0.0;
        for (k, c) in self.inst.coflows.iter().enumerate() {
            if !open[k] {
                continue;
            }
            let start = t.max(c.release + 1) - 1;
            let mut need = 1u64;
            for &v in &self.finite_nodes {
                let l = load[v * jobs + k];
                need = need.max(l.div_ceil(u64::from(self.caps[v])));
            }
            per_job += c.weight * (f64::from(start) + need as f64);
        }
        let mut best_node = 0.0f64;
        for &v in &self.finite_nodes {
            let u = f64::from(self.caps[v]);
            let mut items: Vec<(f64, f64)> = (0..jobs)
                .filter(|&k| open[k])
                .map(|k| (self.inst.coflows[k].weight, load[v * jobs + k] as f64 / u))
                .collect();
            // Smith's rule: nonincreasing w/p, zero-length jobs first.
            items.sort_by(|a, b| (b.0 * a.1).total_cmp(&(a.0 * b.1)));
            let mut clock = f64::from(t - 1);
            let mut sum = 0.0;
            for (w, p) in items {
                clock += p;
                sum += w * clock.max(f64::from(t));
            }
            best_node = best_node.max(sum);
        }
        per_job.max(best_node)
    }

    fn dominated(&mut self, t: u32, rem: &[u32], cost: f64) -> bool {
        let entry = self.seen.entry(rem.to_vec()).or_default();
        if entry.iter().any(|&(t0, c0)| t0 <= t && c0 <= cost + 1e-9) {
            return true;
        }
        entry.retain(|&(t0, c0)| !(t <= t0 && cost <= c0 + 1e-9));
        entry.push((t, cost));
        false
    }

    fn dfs(&mut self, mut t: u32, rem: &mut Vec<u32>, cost: f64) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.node_limit {
            self.aborted = true;
            return;
        }
        if rem.iter().all(|&r| r == 0) {
            if cost < self.best - 1e-9 {
                self.best = cost;
                self.best_plan = self.plan.clone();
            }
            return;
        }
        let released = |t: u32| (0..rem.len()).filter(|&f| rem[f] > 0 && self.flows[f].release < t).collect::<Vec<_>>();
        let mut avail = released(t);
        if avail.is_empty() {
            // nothing released: jump to the next release
            t = (0..rem.len()).filter(|&f| rem[f] > 0).map(|f| self.flows[f].release).min().unwrap_or(t) + 1;
            avail = released(t);
        }
        if cost + self.lower_bound(t, rem) >= self.best - 1e-9 {
            return;
        }
        if self.dominated(t, rem, cost) {
            return;
        }
        let mut sets = Vec::new();
        let mut take = alloc::vec![0u32; self.flows.len()];
        let mut residual = self.caps.clone();
        self.maximal_sets(&avail, 0, rem, &mut take, &mut residual, &mut sets);
        for set in sets {
            for &(f, x) in &set {
                rem[f] -= x;
            }
            let mut jobs: Vec<usize> = set.iter().map(|&(f, _)| self.flows[f].job).collect();
            jobs.dedup();
            let gained: f64 = jobs
                .into_iter()
                .filter(|&k| self.job_flows[k].iter().all(|&g| rem[g] == 0))
                .map(|k| self.inst.coflows[k].weight * f64::from(t))
                .sum();
            self.plan.push((t, {
                let mut v = alloc::vec![0u32; self.flows.len()];
                for &(f, x) in &set {
                    v[f] = x;
                }
                v
            }));
            self.dfs(t + 1, rem, cost + gained);
            self.plan.pop();
            for &(f, x) in &set {
                rem[f] += x;
            }
            if self.aborted {
                return;
            }
        }
    }

    /// Enumerates the maximal feasible unit counts over `avail`, largest
    /// counts first.
    fn maximal_sets(
        &self,
        avail: &[usize],
        i: usize,
        rem: &[u32],
        take: &mut Vec<u32>,
        residual: &mut Vec<u32>,
        out: &mut Vec<Vec<(usize, u32)>>,
    ) {
        if i == avail.len() {
            // maximal: no available flow can take one more unit
            let grows = avail.iter().any(|&f| {
                take[f] < rem[f] && self.flows[f].finite.iter().all(|&v| residual[v] > 0)
            });
            if !grows {
                let set: Vec<(usize, u32)> = avail.iter().filter(|&&f| take[f] > 0).map(|&f| (f, take[f])).collect();
                if !set.is_empty() {
                    out.push(set);
                }
            }
            return;
        }
        let f = avail[i];
        let room = self.flows[f].finite.iter().map(|&v| residual[v]).min().unwrap_or(u32::MAX);
        let most = rem[f].min(room);
        for x in (0..=most).rev() {
            take[f] = x;
            for &v in &self.flows[f].finite {
                residual[v] -= x;
            }
            self.maximal_sets(avail, i + 1, rem, take, residual, out);
            for &v in &self.flows[f].finite {
                residual[v] += x;
            }
        }
        take[f] = 0;
    }
}

fn plan_to_schedule(inst: &Instance, flows: &[FlowInfo], flow_ids: &[(usize, usize)], plan: &[(u32, Vec<u32>)]) -> Schedule {
    let mut next_copy = alloc::vec![0u32; flows.len()];
    let mut assignments = Vec::new();
    for (t, counts) in plan {
        for (f, &x) in counts.iter().enumerate() {
            for _ in 0..x {
                let (job, flow) = flow_ids[f];
                assignments.push((UnitRef { job, flow, copy: next_copy[f] }, *t));
                next_copy[f] += 1;
            }
        }
    }
    assignments.sort();
    let weights: Vec<f64> = inst.coflows.iter().map(|c| c.weight).collect();
    Schedule::new(&weights, assignments)
}

/// Exact minimum weighted completion time.
///
/// Depth-first search over slots in increasing order. Each slot takes a
/// maximal feasible multiset of released units: if a unit could still be
/// added to a slot, moving one unit of that flow forward from a later slot
/// keeps the schedule feasible and no completion time grows, so some optimum
/// uses maximal slots only. Units of one flow are interchangeable, so the
/// search works on per-flow remaining counts. Pruning uses the lower bounds
/// of `lower_bound` and a dominance table keyed by remaining counts: an
/// earlier slot with no larger committed cost dominates.
pub fn exact_optimum(inst: &Instance, opts: &OracleOptions) -> Result<OracleResult, OracleError> {
    if !inst.validate().is_ok() {
        return Err(OracleError::InvalidInstance);
    }
    let units = inst.total_units();
    if units > opts.unit_cap {
        return Err(OracleError::CapExceeded { units, cap: opts.unit_cap });
    }
    let max_release = inst.coflows.iter().map(|c| u64::from(c.release)).max().unwrap_or(0);
    let horizon = units + max_release;
    if horizon > opts.horizon_cap {
        return Err(OracleError::HorizonExceeded { horizon, cap: opts.horizon_cap });
    }
    let mut flows = Vec::new();
    let mut flow_ids = Vec::new();
    let mut job_flows = alloc::vec![Vec::new(); inst.coflows.len()];
    for (k, c) in inst.coflows.iter().enumerate() {
        for (j, f) in c.flows.iter().enumerate() {
            job_flows[k].push(flows.len());
            flow_ids.push((k, j));
            flows.push(FlowInfo { job: k, release: c.release, demand: f.demand, finite: inst.finite_nodes(&f.path) });
        }
    }
    let caps: Vec<u32> = inst.nodes.iter().map(|n| n.capacity.finite().unwrap_or(u32::MAX)).collect();
    let finite_nodes: Vec<usize> = (0..inst.nodes.len()).filter(|&v| inst.nodes[v].capacity.is_finite()).collect();

    let greedy = greedy_baseline(inst);
    let mut search = Search {
        inst,
        flows,
        caps,
        finite_nodes,
        job_flows,
        // strictly above the greedy value so an equal schedule is recorded
        best: greedy.objective + 1.0,
        best_plan: Vec::new(),
        plan: Vec::new(),
        seen: BTreeMap::new(),
        nodes: 0,
        node_limit: opts.node_limit,
        aborted: false,
    };
    let mut rem: Vec<u32> = search.flows.iter().map(|f| f.demand).collect();
    search.dfs(1, &mut rem, 0.0);
    let proven_optimal = !search.aborted;
    let nodes_explored = search.nodes;
    if search.best_plan.is_empty() || search.best > greedy.objective + 1e-9 {
        return Ok(OracleResult { objective: greedy.objective, schedule: greedy, nodes_explored, proven_optimal: false });
    }
    let schedule = plan_to_schedule(inst, &search.flows, &flow_ids, &search.best_plan);
    Ok(OracleResult { objective: schedule.objective, schedule, nodes_explored, proven_optimal })
}

/// List scheduling: units ordered by release, then heavier jobs first, then
/// job index; each goes to the earliest slot where all its finite nodes
/// still have room.
pub fn greedy_baseline(inst: &Instance) -> Schedule {
    let mut units = Vec::new();
    for (k, c) in inst.coflows.iter().enumerate() {
        for (j, f) in c.flows.iter().enumerate() {
            for copy in 0..f.demand {
                units.push(UnitRef { job: k, flow: j, copy });
            }
        }
    }
    units.sort_by(|a, b| {
        let (ca, cb) = (&inst.coflows[a.job], &inst.coflows[b.job]);
        ca.release
            .cmp(&cb.release)
            .then(cb.weight.total_cmp(&ca.weight))
            .then(a.cmp(b))
    });
    let mut used: BTreeMap<(u32, usize), u32> = BTreeMap::new();
    let mut assignments = Vec::with_capacity(units.len());
    for u in units {
        let c = &inst.coflows[u.job];
        let path = &c.flows[u.flow].path;
        let mut t = c.release + 1;
        loop {
            let fits = path.iter().all(|&v| match inst.nodes[v].capacity {
                Capacity::Finite(cap) => used.get(&(t, v)).copied().unwrap_or(0) < cap,
                Capacity::Unbounded => true,
            });
            if fits {
                break;
            }
            t += 1;
        }
        for &v in path {
            if inst.nodes[v].capacity.is_finite() {
                *used.entry((t, v)).or_default() += 1;
            }
        }
        assignments.push((u, t));
    }
    let weights: Vec<f64> = inst.coflows.iter().map(|c| c.weight).collect();
    Schedule::new(&weights, assignments)
}

fn colorable(adj: &[Vec<bool>], order: &[usize], colors: &mut [usize], i: usize, k: usize) -> bool {
    if i == order.len() {
        return true;
    }
    let v = order[i];
    // symmetry: a vertex never opens more than one new colour
    let used = order[..i].iter().map(|&w| colors[w] + 1).max().unwrap_or(0);
    for c in 0..k.min(used + 1) {
        if order[..i].iter().all(|&w| !(adj[v][w] && colors[w] == c)) {
            colors[v] = c;
            if colorable(adj, order, colors, i + 1, k) {
                return true;
            }
        }
    }
    false
}

/// Exact chromatic number by trying k = 1, 2, ... colours.
pub fn chromatic_number(g: &SimpleGraph, vertex_cap: usize) -> Result<usize, OracleError> {
    let n = g.vertex_count();
    if n > vertex_cap {
        return Err(OracleError::VertexCapExceeded { vertices: n, cap: vertex_cap });
    }
    if n == 0 {
        return Ok(0);
    }
    let adj = g.adjacency_matrix();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| core::cmp::Reverse(adj[v].iter().filter(|&&b| b).count()));
    let mut colors = alloc::vec![0usize; n];
    let k = (1..=n).find(|&k| colorable(&adj, &order, &mut colors, 0, k)).unwrap_or(n);
    Ok(k)
}
