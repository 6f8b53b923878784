//! Instance generators: the two counterexample instances, the coloring
//! reduction, and seeded random families.
//!
//! All randomness comes from ChaCha8 seeded with `seed_from_u64`, so every
//! generator is a pure function of its arguments on every platform.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Capacity, Coflow, Flow, Instance, Node};
use crate::graph::SimpleGraph;

fn unit_nodes<S: Into<String>>(ids: impl IntoIterator<Item = S>) -> Vec<Node> {
    ids.into_iter().map(|id| Node::new(id, Capacity::Finite(1))).collect()
}

/// Three unit flows around a triangle `a, b, c`. Every node carries load
/// two, yet no two flows can share a slot.
pub fn gen_triangle() -> Instance {
    Instance {
        name: Some("triangle".into()),
        nodes: unit_nodes(["a", "b", "c"]),
        coflows: alloc::vec![Coflow::new(
            1.0,
            0,
            alloc::vec![Flow::new(alloc::vec![0, 1], 1), Flow::new(alloc::vec![1, 2], 1), Flow::new(alloc::vec![2, 0], 1)],
        )],
    }
}

/// One coflow with four unit flows on three-node paths through a
/// three-layer graph, pairwise intersecting, with maximum load three.
pub fn gen_fig4() -> Instance {
    // A1 A2 B1 B2 C1 C2
    let (a1, a2, b1, b2, c1, c2) = (0, 1, 2, 3, 4, 5);
    Instance {
        name: Some("fig4".into()),
        nodes: unit_nodes(["A1", "A2", "B1", "B2", "C1", "C2"]),
        coflows: alloc::vec![Coflow::new(
            1.0,
            0,
            alloc::vec![
                Flow::new(alloc::vec![a1, b1, c2], 1),
                Flow::new(alloc::vec![a1, b2, c1], 1),
                Flow::new(alloc::vec![a1, b1, c1], 1),
                Flow::new(alloc::vec![a2, b1, c1], 1),
            ],
        )],
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("graph has no edges")]
    NoEdges,
    #[error("parameter {0} must be at least 1")]
    ZeroParameter(&'static str),
    #[error("density must lie in [0, 1]")]
    Density,
}

/// Vertex-coloring reduction: one unit-capacity node per graph edge and one
/// unit flow per (non-isolated) graph vertex through the nodes of its
/// incident edges. The single coflow's optimum equals the chromatic number.
pub fn gen_coloring(g: &SimpleGraph) -> Result<Instance, GenError> {
    if g.edges().is_empty() {
        return Err(GenError::NoEdges);
    }
    let nodes = unit_nodes((0..g.edges().len()).map(|e| format!("e{e}")));
    let mut flows = Vec::new();
    for x in 0..g.vertex_count() {
        let path: Vec<usize> =
            g.edges().iter().enumerate().filter(|(_, &(a, b))| a == x || b == x).map(|(e, _)| e).collect();
        // isolated vertices never conflict and need no flow
        if !path.is_empty() {
            flows.push(Flow::new(path, 1));
        }
    }
    Ok(Instance { name: Some("coloring".into()), nodes, coflows: alloc::vec![Coflow::new(1.0, 0, flows)] })
}

/// Parameters of [`gen_random`]; every field must be ≥ 1 except
/// `max_release`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomParams {
    pub coflows: usize,
    pub nodes: usize,
    pub max_flows: usize,
    pub max_path: usize,
    pub max_demand: u32,
    pub max_release: u32,
    pub max_capacity: u32,
}

impl RandomParams {
    pub fn new(
        coflows: usize,
        nodes: usize,
        max_flows: usize,
        max_path: usize,
        max_demand: u32,
        max_release: u32,
        max_capacity: u32,
    ) -> Self {
        Self { coflows, nodes, max_flows, max_path, max_demand, max_release, max_capacity }
    }

    fn check(&self) -> Result<(), GenError> {
        let fields = [
            ("coflows", self.coflows),
            ("nodes", self.nodes),
            ("max_flows", self.max_flows),
            ("max_path", self.max_path),
            ("max_demand", self.max_demand as usize),
            ("max_capacity", self.max_capacity as usize),
        ];
        for (name, value) in fields {
            if value == 0 {
                return Err(GenError::ZeroParameter(name));
            }
        }
        Ok(())
    }
}

/// Random instance: coflow count fixed, flow count per coflow, path length,
/// demand, weight (1..=10), release and capacity uniform in their ranges;
/// paths are uniformly sampled simple node sequences.
pub fn gen_random(params: &RandomParams, seed: u64) -> Result<Instance, GenError> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = (0..params.nodes)
        .map(|i| Node::new(format!("n{i}"), Capacity::Finite(rng.random_range(1..=params.max_capacity))))
        .collect();
    let longest = params.max_path.min(params.nodes);
    let mut coflows = Vec::with_capacity(params.coflows);
    for _ in 0..params.coflows {
        let weight = f64::from(rng.random_range(1..=10u32));
        let release = rng.random_range(0..=params.max_release);
        let n_flows = rng.random_range(1..=params.max_flows);
        let flows = (0..n_flows)
            .map(|_| {
                let len = rng.random_range(1..=longest);
                let path = index::sample(&mut rng, params.nodes, len).into_vec();
                Flow::new(path, rng.random_range(1..=params.max_demand))
            })
            .collect();
        coflows.push(Coflow::new(weight, release, flows));
    }
    Ok(Instance { name: Some(format!("random-{seed}")), nodes, coflows })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BipartiteParams {
    pub ports: usize,
    pub coflows: usize,
    /// Probability that a coflow sends data between a given port pair.
    pub density: f64,
    pub max_demand: u32,
    pub max_release: u32,
}

/// Switch-style instance: `ports` input and `ports` output unit-capacity
/// ports, every flow goes from one input to one output. Each coflow gets
/// at least one flow.
pub fn gen_bipartite(params: &BipartiteParams, seed: u64) -> Result<Instance, GenError> {
    if params.ports == 0 {
        return Err(GenError::ZeroParameter("ports"));
    }
    if params.coflows == 0 {
        return Err(GenError::ZeroParameter("coflows"));
    }
    if params.max_demand == 0 {
        return Err(GenError::ZeroParameter("max_demand"));
    }
    if !(0.0..=1.0).contains(&params.density) {
        return Err(GenError::Density);
    }
    let p = params.ports;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = unit_nodes((0..p).map(|i| format!("in{i}")).chain((0..p).map(|j| format!("out{j}"))));
    let mut coflows = Vec::with_capacity(params.coflows);
    for _ in 0..params.coflows {
        let weight = f64::from(rng.random_range(1..=10u32));
        let release = rng.random_range(0..=params.max_release);
        let mut flows = Vec::new();
        for i in 0..p {
            for j in 0..p {
                if rng.random_bool(params.density) {
                    flows.push(Flow::new(alloc::vec![i, p + j], rng.random_range(1..=params.max_demand)));
                }
            }
        }
        if flows.is_empty() {
            let i = rng.random_range(0..p);
            let j = rng.random_range(0..p);
            flows.push(Flow::new(alloc::vec![i, p + j], rng.random_range(1..=params.max_demand)));
        }
        coflows.push(Coflow::new(weight, release, flows));
    }
    Ok(Instance { name: Some(format!("bipartite-{seed}")), nodes, coflows })
}
