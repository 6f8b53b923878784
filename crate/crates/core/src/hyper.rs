//! Scheduling hypergraph, its line graph, the deadline orientation and
//! kernels of acyclic orientations.
//!
//! Every unit of demand becomes a hyperedge ("edge unit") over the nodes of
//! its flow's path. Two units conflict when they share a finite-capacity
//! node. Units are numbered by non-decreasing deadline; the line graph is
//! oriented from the later unit to the earlier one, which makes it acyclic
//! and hence kernel-perfect.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::instance::{path_lambda, Capacity, Instance};
use crate::relaxation::DeadlineSet;
use crate::tol;

/// Default limit on the number of materialised units.
pub const DEFAULT_EXPANSION_CAP: u64 = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeUnit {
    /// Position in [`Hypergraph::units`].
    pub unit_id: usize,
    pub job: usize,
    pub flow: usize,
    pub copy: u32,
    /// All nodes of the path, used for capacity accounting.
    pub nodes: Vec<usize>,
    /// Finite-capacity nodes of the path, sorted; these define conflicts.
    pub finite_nodes: Vec<usize>,
    pub release: u32,
    pub deadline: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hypergraph {
    /// Ordered by (deadline, job, flow, copy).
    pub units: Vec<EdgeUnit>,
    pub capacities: Vec<Capacity>,
    pub weights: Vec<f64>,
    /// Longest number of finite nodes on a path, at least one.
    pub lambda: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HyperError {
    #[error("instance expands to {units} units, above the cap of {cap}")]
    ExpansionCapExceeded { units: u64, cap: u64 },
    #[error("{got} deadlines given for {expected} jobs")]
    DeadlineCount { expected: usize, got: usize },
}

impl Hypergraph {
    pub fn total_units(&self) -> usize {
        self.units.len()
    }

    pub fn job_count(&self) -> usize {
        self.weights.len()
    }

    /// Average and minimum capacity over the unit's finite nodes.
    pub fn capacity_profile(&self, unit: usize) -> Option<(f64, u32)> {
        let e = &self.units[unit];
        let caps: Vec<u32> = e.finite_nodes.iter().filter_map(|&v| self.capacities[v].finite()).collect();
        let min = *caps.iter().min()?;
        let avg = caps.iter().map(|&u| f64::from(u)).sum::<f64>() / caps.len() as f64;
        Some((avg, min))
    }

    /// Capacity disparity `⌈avg / min⌉`, one for units without finite nodes.
    pub fn disparity(&self, unit: usize) -> u32 {
        match self.capacity_profile(unit) {
            Some((avg, min)) => libm::ceil(avg / f64::from(min) - 1e-12) as u32,
            None => 1,
        }
    }

    pub fn max_disparity(&self) -> u32 {
        (0..self.units.len()).map(|e| self.disparity(e)).max().unwrap_or(1)
    }

    /// Units containing each finite node, ascending.
    pub fn units_by_node(&self) -> Vec<Vec<usize>> {
        let mut by_node = alloc::vec![Vec::new(); self.capacities.len()];
        for e in &self.units {
            for &v in &e.finite_nodes {
                by_node[v].push(e.unit_id);
            }
        }
        by_node
    }
}

pub fn build_hypergraph(inst: &Instance, dl: &DeadlineSet, expansion_cap: u64) -> Result<Hypergraph, HyperError> {
    if dl.d.len() != inst.coflows.len() {
        return Err(HyperError::DeadlineCount { expected: inst.coflows.len(), got: dl.d.len() });
    }
    let total = inst.total_units();
    if total > expansion_cap {
        return Err(HyperError::ExpansionCapExceeded { units: total, cap: expansion_cap });
    }
    let mut units = Vec::with_capacity(total as usize);
    for (k, coflow) in inst.coflows.iter().enumerate() {
        for (j, flow) in coflow.flows.iter().enumerate() {
            let mut finite_nodes = inst.finite_nodes(&flow.path);
            finite_nodes.sort_unstable();
            for copy in 0..flow.demand {
                units.push(EdgeUnit {
                    unit_id: 0,
                    job: k,
                    flow: j,
                    copy,
                    nodes: flow.path.clone(),
                    finite_nodes: finite_nodes.clone(),
                    release: coflow.release,
                    deadline: dl.d[k],
                });
            }
        }
    }
    units.sort_by(|a, b| {
        a.deadline.total_cmp(&b.deadline).then(a.job.cmp(&b.job)).then(a.flow.cmp(&b.flow)).then(a.copy.cmp(&b.copy))
    });
    for (i, u) in units.iter_mut().enumerate() {
        u.unit_id = i;
    }
    Ok(Hypergraph {
        units,
        capacities: inst.capacities(),
        weights: inst.coflows.iter().map(|c| c.weight).collect(),
        lambda: path_lambda(inst).effective(),
    })
}

/// Conflict graph on units: adjacent iff they share a finite node.
#[derive(Clone, Debug, PartialEq)]
pub struct LineGraph {
    /// Sorted neighbour lists.
    pub neighbors: Vec<Vec<usize>>,
    /// Shared finite nodes per adjacent pair `(a, b)` with `a < b`.
    pub shared: BTreeMap<(usize, usize), Vec<usize>>,
}

impl LineGraph {
    pub fn edge_count(&self) -> usize {
        self.shared.len()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.shared.contains_key(&(a.min(b), a.max(b)))
    }
}

pub fn build_line_adjacency(h: &Hypergraph) -> LineGraph {
    let mut shared: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (v, members) in h.units_by_node().iter().enumerate() {
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                shared.entry((a, b)).or_default().push(v);
            }
        }
    }
    let mut neighbors = alloc::vec![Vec::new(); h.units.len()];
    for &(a, b) in shared.keys() {
        neighbors[a].push(b);
        neighbors[b].push(a);
    }
    for list in &mut neighbors {
        list.sort_unstable();
    }
    LineGraph { neighbors, shared }
}

/// A directed graph on units given by successor and predecessor lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientation {
    pub out_adj: Vec<Vec<usize>>,
    pub in_adj: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrientationError {
    #[error("arc ({0}, {1}) leaves the vertex range")]
    OutOfRange(usize, usize),
    #[error("arc ({0}, {0}) is a loop")]
    Loop(usize),
    #[error("pair {{{0}, {1}}} is oriented twice")]
    Duplicate(usize, usize),
}

impl Orientation {
    /// Builds an orientation from arcs `(from, to)`; each unordered pair may
    /// appear at most once.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Self, OrientationError> {
        let mut out_adj = alloc::vec![Vec::new(); n];
        let mut in_adj = alloc::vec![Vec::new(); n];
        let mut seen = alloc::collections::BTreeSet::new();
        for &(a, b) in arcs {
            if a >= n || b >= n {
                return Err(OrientationError::OutOfRange(a, b));
            }
            if a == b {
                return Err(OrientationError::Loop(a));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(OrientationError::Duplicate(a.min(b), a.max(b)));
            }
            out_adj[a].push(b);
            in_adj[b].push(a);
        }
        for l in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            l.sort_unstable();
        }
        Ok(Self { out_adj, in_adj })
    }

    pub fn vertex_count(&self) -> usize {
        self.out_adj.len()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_adj[v].len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_adj[v].len()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out_adj.iter().enumerate().flat_map(|(a, succ)| succ.iter().map(move |&b| (a, b)))
    }

    /// Kahn's algorithm; `None` if the orientation has a directed cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.vertex_count();
        let mut indeg: Vec<usize> = (0..n).map(|v| self.in_degree(v)).collect();
        let mut ready: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop() {
            order.push(v);
            for &w in &self.out_adj[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.push(w);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.topological_order().is_some()
    }

    /// One `from -> to` line per arc.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        for (a, b) in self.arcs() {
            let _ = writeln!(s, "{a} -> {b}");
        }
        s
    }
}

/// Directs every conflict from the later unit (higher id) to the earlier.
pub fn orient(h: &Hypergraph, adj: &LineGraph) -> Orientation {
    debug_assert_eq!(adj.neighbors.len(), h.units.len());
    let mut out_adj = Vec::with_capacity(adj.neighbors.len());
    let mut in_adj = Vec::with_capacity(adj.neighbors.len());
    for (e, nbrs) in adj.neighbors.iter().enumerate() {
        out_adj.push(nbrs.iter().copied().filter(|&f| f < e).collect());
        in_adj.push(nbrs.iter().copied().filter(|&f| f > e).collect());
    }
    Orientation { out_adj, in_adj }
}

/// Kernel of the orientation induced on `active`, built by repeatedly
/// taking all sinks and discarding their in-neighbours. Returned ascending.
///
/// On acyclic input the result is independent and every other active vertex
/// has an arc into it. If the induced subgraph has a cycle the vertices on
/// it are never reached and the partial set is returned.
pub fn find_kernel(o: &Orientation, active: &[bool]) -> Vec<usize> {
    let n = o.vertex_count();
    assert_eq!(active.len(), n, "active mask must cover every vertex");
    let mut alive = active.to_vec();
    let mut outdeg: Vec<usize> =
        (0..n).map(|v| if alive[v] { o.out_adj[v].iter().filter(|&&w| alive[w]).count() } else { 0 }).collect();
    let mut sinks: Vec<usize> = (0..n).filter(|&v| alive[v] && outdeg[v] == 0).collect();
    let mut kernel = Vec::new();
    let mut removed = Vec::new();
    while !sinks.is_empty() {
        removed.clear();
        for &v in &sinks {
            alive[v] = false;
            kernel.push(v);
            removed.push(v);
        }
        for &v in &sinks {
            for &p in &o.in_adj[v] {
                if alive[p] {
                    alive[p] = false;
                    removed.push(p);
                }
            }
        }
        let mut next = Vec::new();
        for &x in &removed {
            for &p in &o.in_adj[x] {
                if alive[p] {
                    outdeg[p] -= 1;
                    if outdeg[p] == 0 {
                        next.push(p);
                    }
                }
            }
        }
        next.sort_unstable();
        sinks = next;
    }
    kernel.sort_unstable();
    kernel
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutDegreeViolation {
    pub unit: usize,
    pub out_degree: usize,
    pub bound: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OutDegreeReport {
    pub checked: usize,
    pub violations: Vec<OutDegreeViolation>,
}

impl OutDegreeReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `|d⁺(e)| ≤ λ (D_e · avg(e) − 1)` for every unit with at least one
/// finite node; with unit capacities this is `λ (D_e − 1)`.
pub fn check_outdegree_bound(o: &Orientation, h: &Hypergraph) -> OutDegreeReport {
    let lambda = h.lambda as f64;
    let mut report = OutDegreeReport::default();
    for e in &h.units {
        let Some((avg, _)) = h.capacity_profile(e.unit_id) else {
            continue;
        };
        report.checked += 1;
        let bound = lambda * (e.deadline * avg - 1.0);
        let out_degree = o.out_degree(e.unit_id);
        if out_degree as f64 > bound + tol::BOUND_SLACK {
            report.violations.push(OutDegreeViolation { unit: e.unit_id, out_degree, bound });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{gen_fig4, gen_triangle, Coflow, Flow, Node};
    use crate::relaxation::DeadlineMode;
    use alloc::vec;

    fn dl(d: Vec<f64>) -> DeadlineSet {
        DeadlineSet { mode: DeadlineMode::Standard, d }
    }

    fn pipeline(inst: &Instance, d: Vec<f64>) -> (Hypergraph, LineGraph, Orientation) {
        let h = build_hypergraph(inst, &dl(d), DEFAULT_EXPANSION_CAP).unwrap();
        let adj = build_line_adjacency(&h);
        let o = orient(&h, &adj);
        (h, adj, o)
    }

    #[test]
    fn triangle_units() {
        let (h, adj, o) = pipeline(&gen_triangle(), vec![4.0]);
        assert_eq!(h.total_units(), 3);
        assert!(h.units.iter().all(|e| e.nodes.len() == 2 && e.deadline == 4.0));
        assert_eq!(adj.edge_count(), 3);
        let outs: Vec<usize> = (0..3).map(|e| o.out_degree(e)).collect();
        assert_eq!(outs, vec![0, 1, 2]);
        assert!(o.is_acyclic());
        let report = check_outdegree_bound(&o, &h);
        assert!(report.is_ok());
        assert_eq!(report.checked, 3);
    }

    #[test]
    fn fig4_line_graph_is_k4() {
        let (_, adj, _) = pipeline(&gen_fig4(), vec![6.0]);
        assert_eq!(adj.edge_count(), 6);
        assert!(adj.neighbors.iter().all(|n| n.len() == 3));
    }

    #[test]
    fn demand_expands_into_conflicting_copies() {
        let inst = Instance {
            name: None,
            nodes: vec![Node::new("a", Capacity::Finite(1))],
            coflows: vec![Coflow::new(1.0, 0, vec![Flow::new(vec![0], 5)])],
        };
        let (h, adj, o) = pipeline(&inst, vec![10.0]);
        assert_eq!(h.total_units(), 5);
        assert_eq!(h.units.iter().map(|e| e.copy).collect::<Vec<_>>(), vec![0, 1, 2, 3, 4]);
        assert_eq!(adj.edge_count(), 10);
        assert_eq!(o.out_adj[4], vec![0, 1, 2, 3]);
        assert!(matches!(
            build_hypergraph(&inst, &dl(vec![1.0]), 4),
            Err(HyperError::ExpansionCapExceeded { units: 5, cap: 4 })
        ));
        assert!(matches!(build_hypergraph(&inst, &dl(vec![]), 10), Err(HyperError::DeadlineCount { .. })));
    }

    #[test]
    fn unbounded_nodes_do_not_conflict() {
        let inst = Instance {
            name: None,
            nodes: vec![
                Node::new("a", Capacity::Finite(1)),
                Node::new("b", Capacity::Unbounded),
                Node::new("c", Capacity::Finite(1)),
            ],
            coflows: vec![Coflow::new(1.0, 0, vec![Flow::new(vec![0, 1, 2], 1), Flow::new(vec![1], 1)])],
        };
        let (h, adj, _) = pipeline(&inst, vec![2.0]);
        assert_eq!(h.units[0].finite_nodes, vec![0, 2]);
        assert_eq!(h.units[0].nodes, vec![0, 1, 2]);
        assert_eq!(adj.edge_count(), 0);
        assert_eq!(h.lambda, 2);
        assert_eq!(h.disparity(1), 1);
    }

    #[test]
    fn disjoint_flows_no_adjacency() {
        let inst = Instance {
            name: None,
            nodes: vec![Node::new("a", Capacity::Finite(1)), Node::new("b", Capacity::Finite(1))],
            coflows: vec![Coflow::new(1.0, 0, vec![Flow::new(vec![0], 1), Flow::new(vec![1], 1)])],
        };
        let (_, adj, _) = pipeline(&inst, vec![2.0]);
        assert_eq!(adj.edge_count(), 0);
    }

    #[test]
    fn later_deadline_points_to_earlier() {
        let inst = Instance {
            name: None,
            nodes: vec![Node::new("a", Capacity::Finite(1))],
            coflows: vec![
                Coflow::new(1.0, 0, vec![Flow::new(vec![0], 1)]),
                Coflow::new(1.0, 0, vec![Flow::new(vec![0], 1)]),
            ],
        };
        let (h, _, o) = pipeline(&inst, vec![6.0, 2.0]);
        assert_eq!(h.units[0].job, 1);
        assert_eq!(h.units[1].job, 0);
        assert_eq!(o.arcs().collect::<Vec<_>>(), vec![(1, 0)]);
        assert_eq!(o.to_edge_list(), "1 -> 0\n");
    }

    #[test]
    fn disparity_rounds_up() {
        let inst = Instance {
            name: None,
            nodes: vec![Node::new("a", Capacity::Finite(1)), Node::new("b", Capacity::Finite(2))],
            coflows: vec![Coflow::new(1.0, 0, vec![Flow::new(vec![0, 1], 1)])],
        };
        let (h, _, _) = pipeline(&inst, vec![2.0]);
        assert_eq!(h.capacity_profile(0), Some((1.5, 1)));
        assert_eq!(h.disparity(0), 2);
        assert_eq!(h.max_disparity(), 2);
    }

    #[test]
    fn kernel_examples() {
        let single = Orientation::from_arcs(1, &[]).unwrap();
        assert_eq!(find_kernel(&single, &[true]), vec![0]);
        // a=0 -> b=1 -> c=2
        let path = Orientation::from_arcs(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(find_kernel(&path, &[true; 3]), vec![0, 2]);
        // transitive tournament 2 -> 1 -> 0, 2 -> 0
        let tour = Orientation::from_arcs(3, &[(1, 0), (2, 0), (2, 1)]).unwrap();
        assert_eq!(find_kernel(&tour, &[true; 3]), vec![0]);
        // restricting to {1, 2}: sink becomes 1
        assert_eq!(find_kernel(&tour, &[false, true, true]), vec![1]);
        assert_eq!(find_kernel(&tour, &[false; 3]), Vec::<usize>::new());
    }

    #[test]
    fn from_arcs_rejects_malformed() {
        assert_eq!(Orientation::from_arcs(2, &[(0, 2)]), Err(OrientationError::OutOfRange(0, 2)));
        assert_eq!(Orientation::from_arcs(2, &[(1, 1)]), Err(OrientationError::Loop(1)));
        assert_eq!(Orientation::from_arcs(2, &[(0, 1), (1, 0)]), Err(OrientationError::Duplicate(0, 1)));
        let cyc = Orientation::from_arcs(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(!cyc.is_acyclic());
        assert!(find_kernel(&cyc, &[true; 3]).is_empty());
    }

    #[test]
    fn outdegree_negative_control() {
        let inst = Instance {
            name: None,
            nodes: vec![Node::new("a", Capacity::Finite(1))],
            coflows: vec![Coflow::new(1.0, 0, vec![Flow::new(vec![0], 2)])],
        };
        let (h, _, o) = pipeline(&inst, vec![1.0]);
        let report = check_outdegree_bound(&o, &h);
        assert_eq!(report.violations, vec![OutDegreeViolation { unit: 1, out_degree: 1, bound: 0.0 }]);
    }
}
