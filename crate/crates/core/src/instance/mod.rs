//! Problem model: nodes with capacities, coflows (jobs) made of flows along
//! fixed node paths.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub mod gen;
pub mod reduce;

pub use gen::{gen_bipartite, gen_coloring, gen_fig4, gen_random, gen_triangle, BipartiteParams, RandomParams};
pub use reduce::{reduce_edge_capacities, reduce_node_to_edge, CapEdge, EdgeCapInstance, EdgeCoflow, EdgeFlow, ReduceError};

/// Number of data units a node can forward per slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Capacity {
    Finite(u32),
    Unbounded,
}

impl Capacity {
    pub fn finite(self) -> Option<u32> {
        match self {
            Capacity::Finite(u) => Some(u),
            Capacity::Unbounded => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Capacity::Finite(_))
    }
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capacity::Finite(u) => write!(f, "{u}"),
            Capacity::Unbounded => f.write_str("unbounded"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub id: String,
    pub capacity: Capacity,
}

/// `demand` units sent along `path`, given as indices into
/// [`Instance::nodes`].
#[derive(Clone, Debug, PartialEq)]
pub struct Flow {
    pub path: Vec<usize>,
    pub demand: u32,
}

/// A job. Its flows may only use slots `release + 1, release + 2, ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct Coflow {
    pub weight: f64,
    pub release: u32,
    pub flows: Vec<Flow>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Instance {
    pub name: Option<String>,
    pub nodes: Vec<Node>,
    pub coflows: Vec<Coflow>,
}

impl Node {
    pub fn new(id: impl Into<String>, capacity: Capacity) -> Self {
        Self { id: id.into(), capacity }
    }
}

impl Flow {
    pub fn new(path: Vec<usize>, demand: u32) -> Self {
        Self { path, demand }
    }
}

impl Coflow {
    pub fn new(weight: f64, release: u32, flows: Vec<Flow>) -> Self {
        Self { weight, release, flows }
    }

    pub fn total_demand(&self) -> u64 {
        self.flows.iter().map(|f| u64::from(f.demand)).sum()
    }
}

impl Instance {
    pub fn job_count(&self) -> usize {
        self.coflows.len()
    }

    pub fn node_index(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    pub fn capacities(&self) -> Vec<Capacity> {
        self.nodes.iter().map(|n| n.capacity).collect()
    }

    pub fn total_units(&self) -> u64 {
        self.coflows.iter().map(Coflow::total_demand).sum()
    }

    pub fn zero_releases(&self) -> bool {
        self.coflows.iter().all(|c| c.release == 0)
    }

    /// True when every finite capacity equals one.
    pub fn unit_capacities(&self) -> bool {
        self.nodes.iter().all(|n| matches!(n.capacity, Capacity::Finite(1) | Capacity::Unbounded))
    }

    /// Finite-capacity nodes of a path, in path order.
    pub fn finite_nodes(&self, path: &[usize]) -> Vec<usize> {
        path.iter().copied().filter(|&v| self.nodes[v].capacity.is_finite()).collect()
    }

    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }
}

/// One broken invariant, naming the offending coflow/flow/node.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NoCoflows,
    NoFlows { coflow: usize },
    BadWeight { coflow: usize, weight: f64 },
    EmptyPath { coflow: usize, flow: usize },
    UnknownNode { coflow: usize, flow: usize, node: usize },
    PathNotSimple { coflow: usize, flow: usize, node: usize },
    ZeroDemand { coflow: usize, flow: usize },
    ZeroCapacity { node: usize },
    DuplicateNodeId { id: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoCoflows => f.write_str("instance has no coflows"),
            Violation::NoFlows { coflow } => write!(f, "coflow {coflow}: no flows"),
            Violation::BadWeight { coflow, weight } => {
                write!(f, "coflow {coflow}: weight {weight} is not a finite value ≥ 0")
            }
            Violation::EmptyPath { coflow, flow } => write!(f, "coflow {coflow} flow {flow}: empty path"),
            Violation::UnknownNode { coflow, flow, node } => {
                write!(f, "coflow {coflow} flow {flow}: unknown node index {node}")
            }
            Violation::PathNotSimple { coflow, flow, node } => {
                write!(f, "coflow {coflow} flow {flow}: path not simple (node {node} repeats)")
            }
            Violation::ZeroDemand { coflow, flow } => {
                write!(f, "coflow {coflow} flow {flow}: demand ≥ 1 required, got 0")
            }
            Violation::ZeroCapacity { node } => write!(f, "node {node}: capacity ≥ 1 required, got 0"),
            Violation::DuplicateNodeId { id } => write!(f, "node id {id:?} appears more than once"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

pub fn validate(inst: &Instance) -> ValidationReport {
    let mut violations = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, node) in inst.nodes.iter().enumerate() {
        if node.capacity == Capacity::Finite(0) {
            violations.push(Violation::ZeroCapacity { node: i });
        }
        if !seen.insert(node.id.as_str()) {
            violations.push(Violation::DuplicateNodeId { id: node.id.clone() });
        }
    }
    if inst.coflows.is_empty() {
        violations.push(Violation::NoCoflows);
    }
    for (k, coflow) in inst.coflows.iter().enumerate() {
        if !(coflow.weight.is_finite() && coflow.weight >= 0.0) {
            violations.push(Violation::BadWeight { coflow: k, weight: coflow.weight });
        }
        if coflow.flows.is_empty() {
            violations.push(Violation::NoFlows { coflow: k });
        }
        for (j, flow) in coflow.flows.iter().enumerate() {
            if flow.demand == 0 {
                violations.push(Violation::ZeroDemand { coflow: k, flow: j });
            }
            if flow.path.is_empty() {
                violations.push(Violation::EmptyPath { coflow: k, flow: j });
            }
            let mut on_path = BTreeSet::new();
            for &v in &flow.path {
                if v >= inst.nodes.len() {
                    violations.push(Violation::UnknownNode { coflow: k, flow: j, node: v });
                } else if !on_path.insert(v) {
                    violations.push(Violation::PathNotSimple { coflow: k, flow: j, node: v });
                }
            }
        }
    }
    ValidationReport { violations }
}

/// Per-(node, job) loads: the total demand of a job's flows through a node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadTable {
    jobs: usize,
    entries: Vec<u64>,
}

impl LoadTable {
    pub fn get(&self, node: usize, job: usize) -> u64 {
        self.entries[node * self.jobs + job]
    }

    pub fn node_count(&self) -> usize {
        if self.jobs == 0 {
            0
        } else {
            self.entries.len() / self.jobs
        }
    }

    pub fn job_count(&self) -> usize {
        self.jobs
    }

    /// Maximum load of a job over all nodes.
    pub fn max_for_job(&self, job: usize) -> u64 {
        (0..self.node_count()).map(|i| self.get(i, job)).max().unwrap_or(0)
    }
}

pub fn loads(inst: &Instance) -> LoadTable {
    let jobs = inst.coflows.len();
    let mut entries = alloc::vec![0u64; inst.nodes.len() * jobs];
    for (k, coflow) in inst.coflows.iter().enumerate() {
        for flow in &coflow.flows {
            for &v in &flow.path {
                entries[v * jobs + k] += u64::from(flow.demand);
            }
        }
    }
    LoadTable { jobs, entries }
}

/// Longest path length, counted over all nodes and over finite-capacity
/// nodes only.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathLambda {
    pub lambda: usize,
    pub lambda_finite: usize,
}

impl PathLambda {
    /// λ used in the guarantees: the finite-node count, floored at one so
    /// that instances without any finite node keep meaningful bounds.
    pub fn effective(self) -> usize {
        self.lambda_finite.max(1)
    }
}

pub fn path_lambda(inst: &Instance) -> PathLambda {
    let mut lambda = 0;
    let mut lambda_finite = 0;
    for flow in inst.coflows.iter().flat_map(|c| c.flows.iter()) {
        lambda = lambda.max(flow.path.len());
        let finite = flow.path.iter().filter(|&&v| inst.nodes[v].capacity.is_finite()).count();
        lambda_finite = lambda_finite.max(finite);
    }
    PathLambda { lambda, lambda_finite }
}
