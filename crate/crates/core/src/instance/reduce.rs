//! Conversions between edge-capacitated and node-capacitated networks.
//!
//! Edge capacities become node capacities by subdividing every edge with a
//! fresh node carrying the edge's capacity (original nodes become
//! unbounded). Node capacities become edge capacities by splitting every
//! node `v` into `v_in -- v_out` joined by an edge of capacity `u(v)`;
//! connector edges between gadgets are unbounded.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{Capacity, Coflow, Flow, Instance, Node};

#[derive(Clone, Debug, PartialEq)]
pub struct CapEdge {
    pub a: usize,
    pub b: usize,
    pub capacity: Capacity,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeFlow {
    /// Indices into [`EdgeCapInstance::edges`], consecutive edges sharing an
    /// endpoint.
    pub edge_path: Vec<usize>,
    pub demand: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeCoflow {
    pub weight: f64,
    pub release: u32,
    pub flows: Vec<EdgeFlow>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct EdgeCapInstance {
    pub name: Option<String>,
    pub nodes: Vec<String>,
    pub edges: Vec<CapEdge>,
    pub coflows: Vec<EdgeCoflow>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReduceError {
    #[error("coflow {coflow} flow {flow}: edge {edge} does not exist")]
    UnknownEdge { coflow: usize, flow: usize, edge: usize },
    #[error("edge {edge} references node {node} which does not exist")]
    UnknownEdgeNode { edge: usize, node: usize },
    #[error("coflow {coflow} flow {flow}: empty edge path")]
    EmptyPath { coflow: usize, flow: usize },
    #[error("coflow {coflow} flow {flow}: edge sequence is not connected at position {position}")]
    Disconnected { coflow: usize, flow: usize, position: usize },
    #[error("coflow {coflow} flow {flow}: edge walk revisits node {node}")]
    NotSimple { coflow: usize, flow: usize, node: usize },
    #[error("node {node} has unbounded capacity and has no edge gadget")]
    UnboundedNode { node: usize },
}

impl EdgeCapInstance {
    /// Node sequence visited by an edge path.
    pub fn walk(&self, coflow: usize, flow: usize) -> Result<Vec<usize>, ReduceError> {
        let path = &self.coflows[coflow].flows[flow].edge_path;
        let edge = |position: usize| -> Result<&CapEdge, ReduceError> {
            let e = path[position];
            self.edges.get(e).ok_or(ReduceError::UnknownEdge { coflow, flow, edge: e })
        };
        if path.is_empty() {
            return Err(ReduceError::EmptyPath { coflow, flow });
        }
        let first = edge(0)?;
        let mut current = if path.len() > 1 {
            let second = edge(1)?;
            if first.b != second.a && first.b != second.b {
                first.b
            } else {
                first.a
            }
        } else {
            first.a
        };
        let mut nodes = alloc::vec![current];
        for position in 0..path.len() {
            let e = edge(position)?;
            current = if e.a == current {
                e.b
            } else if e.b == current {
                e.a
            } else {
                return Err(ReduceError::Disconnected { coflow, flow, position });
            };
            if nodes.contains(&current) {
                return Err(ReduceError::NotSimple { coflow, flow, node: current });
            }
            nodes.push(current);
        }
        Ok(nodes)
    }
}

fn fresh_id(taken: &mut BTreeSet<String>, base: String) -> String {
    let mut id = base;
    while taken.contains(&id) {
        id.push('\'');
    }
    taken.insert(id.clone());
    id
}

/// Subdivides every edge with a node carrying its capacity; all original
/// nodes become unbounded.
pub fn reduce_edge_capacities(e_inst: &EdgeCapInstance) -> Result<Instance, ReduceError> {
    let n = e_inst.nodes.len();
    for (i, e) in e_inst.edges.iter().enumerate() {
        for node in [e.a, e.b] {
            if node >= n {
                return Err(ReduceError::UnknownEdgeNode { edge: i, node });
            }
        }
    }
    let mut taken: BTreeSet<String> = e_inst.nodes.iter().cloned().collect();
    let mut nodes: Vec<Node> = e_inst.nodes.iter().map(|id| Node::new(id.clone(), Capacity::Unbounded)).collect();
    for (i, e) in e_inst.edges.iter().enumerate() {
        let id = fresh_id(&mut taken, format!("{}~{}#{}", e_inst.nodes[e.a], e_inst.nodes[e.b], i));
        nodes.push(Node::new(id, e.capacity));
    }
    let mut coflows = Vec::with_capacity(e_inst.coflows.len());
    for (k, c) in e_inst.coflows.iter().enumerate() {
        let mut flows = Vec::with_capacity(c.flows.len());
        for (j, f) in c.flows.iter().enumerate() {
            let walk = e_inst.walk(k, j)?;
            let mut path = Vec::with_capacity(2 * f.edge_path.len() + 1);
            path.push(walk[0]);
            for (step, &e) in f.edge_path.iter().enumerate() {
                path.push(n + e);
                path.push(walk[step + 1]);
            }
            flows.push(Flow::new(path, f.demand));
        }
        coflows.push(Coflow::new(c.weight, c.release, flows));
    }
    Ok(Instance { name: e_inst.name.clone(), nodes, coflows })
}

/// Replaces every node by an `in -- out` gadget edge of the node's
/// capacity. Requires all capacities finite.
pub fn reduce_node_to_edge(inst: &Instance) -> Result<EdgeCapInstance, ReduceError> {
    let mut nodes = Vec::with_capacity(2 * inst.nodes.len());
    let mut edges = Vec::with_capacity(inst.nodes.len());
    for (v, node) in inst.nodes.iter().enumerate() {
        if !node.capacity.is_finite() {
            return Err(ReduceError::UnboundedNode { node: v });
        }
        nodes.push(format!("{}_in", node.id));
        nodes.push(format!("{}_out", node.id));
        edges.push(CapEdge { a: 2 * v, b: 2 * v + 1, capacity: node.capacity });
    }
    let mut connectors: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut coflows = Vec::with_capacity(inst.coflows.len());
    for c in &inst.coflows {
        let mut flows = Vec::with_capacity(c.flows.len());
        for f in &c.flows {
            let mut edge_path = Vec::with_capacity(2 * f.path.len());
            for (step, &v) in f.path.iter().enumerate() {
                if step > 0 {
                    let u = f.path[step - 1];
                    let next = edges.len();
                    let idx = *connectors.entry((u, v)).or_insert(next);
                    if idx == next {
                        edges.push(CapEdge { a: 2 * u + 1, b: 2 * v, capacity: Capacity::Unbounded });
                    }
                    edge_path.push(idx);
                }
                edge_path.push(v);
            }
            flows.push(EdgeFlow { edge_path, demand: f.demand });
        }
        coflows.push(EdgeCoflow { weight: c.weight, release: c.release, flows });
    }
    Ok(EdgeCapInstance { name: inst.name.clone(), nodes, edges, coflows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{path_lambda, validate};
    use alloc::vec;

    fn edge_inst(nodes: &[&str], edges: &[(usize, usize, u32)], paths: &[&[usize]]) -> EdgeCapInstance {
        EdgeCapInstance {
            name: None,
            nodes: nodes.iter().map(|s| String::from(*s)).collect(),
            edges: edges.iter().map(|&(a, b, c)| CapEdge { a, b, capacity: Capacity::Finite(c) }).collect(),
            coflows: vec![EdgeCoflow {
                weight: 1.0,
                release: 0,
                flows: paths.iter().map(|p| EdgeFlow { edge_path: p.to_vec(), demand: 1 }).collect(),
            }],
        }
    }

    #[test]
    fn single_edge_subdivision() {
        let e = edge_inst(&["a", "b"], &[(0, 1, 1)], &[&[0]]);
        let inst = reduce_edge_capacities(&e).unwrap();
        assert!(validate(&inst).is_ok());
        assert_eq!(inst.coflows[0].flows[0].path, vec![0, 2, 1]);
        assert_eq!(inst.nodes[0].capacity, Capacity::Unbounded);
        assert_eq!(inst.nodes[1].capacity, Capacity::Unbounded);
        assert_eq!(inst.nodes[2].capacity, Capacity::Finite(1));
    }

    #[test]
    fn three_edge_path() {
        let e = edge_inst(&["a", "b", "c", "d"], &[(0, 1, 1), (1, 2, 1), (2, 3, 1)], &[&[0, 1, 2]]);
        let inst = reduce_edge_capacities(&e).unwrap();
        let path = &inst.coflows[0].flows[0].path;
        let finite = path.iter().filter(|&&v| inst.nodes[v].capacity.is_finite()).count();
        assert_eq!(finite, 3);
        assert_eq!(path.len() - finite, 4);
        assert_eq!(path.len(), 4 + 3);
        assert_eq!(path_lambda(&inst).lambda_finite, 3);
    }

    #[test]
    fn walk_handles_reversed_edges() {
        // c-b, b-a traversed as c, b, a
        let e = edge_inst(&["a", "b", "c"], &[(0, 1, 2), (2, 1, 3)], &[&[1, 0]]);
        assert_eq!(e.walk(0, 0).unwrap(), vec![2, 1, 0]);
        let inst = reduce_edge_capacities(&e).unwrap();
        assert_eq!(inst.coflows[0].flows[0].path, vec![2, 4, 1, 3, 0]);
        assert_eq!(inst.nodes[4].capacity, Capacity::Finite(3));
    }

    #[test]
    fn shared_edge_shares_node() {
        let e = edge_inst(&["a", "b", "c"], &[(0, 1, 1), (1, 2, 1)], &[&[0, 1], &[1]]);
        let inst = reduce_edge_capacities(&e).unwrap();
        let p0 = &inst.coflows[0].flows[0].path;
        let p1 = &inst.coflows[0].flows[1].path;
        assert!(p0.contains(&4) && p1.contains(&4));
    }

    #[test]
    fn edge_path_errors() {
        let e = edge_inst(&["a", "b"], &[(0, 1, 1)], &[&[3]]);
        assert_eq!(reduce_edge_capacities(&e), Err(ReduceError::UnknownEdge { coflow: 0, flow: 0, edge: 3 }));
        let e = edge_inst(&["a", "b", "c", "d"], &[(0, 1, 1), (2, 3, 1)], &[&[0, 1]]);
        assert!(matches!(reduce_edge_capacities(&e), Err(ReduceError::Disconnected { .. })));
        let e = edge_inst(&["a", "b", "c"], &[(0, 1, 1), (1, 2, 1), (2, 0, 1)], &[&[0, 1, 2]]);
        assert!(matches!(reduce_edge_capacities(&e), Err(ReduceError::NotSimple { .. })));
    }

    #[test]
    fn node_gadget_single_node() {
        let inst = Instance {
            name: None,
            nodes: vec![Node::new("v", Capacity::Finite(3))],
            coflows: vec![Coflow::new(1.0, 0, vec![Flow::new(vec![0], 2)])],
        };
        let e = reduce_node_to_edge(&inst).unwrap();
        assert_eq!(e.edges, vec![CapEdge { a: 0, b: 1, capacity: Capacity::Finite(3) }]);
        assert_eq!(e.coflows[0].flows[0], EdgeFlow { edge_path: vec![0], demand: 2 });
    }

    #[test]
    fn node_gadget_path_threads_connectors() {
        let inst = Instance {
            name: None,
            nodes: vec![Node::new("a", Capacity::Finite(1)), Node::new("b", Capacity::Finite(2))],
            coflows: vec![Coflow::new(1.0, 0, vec![Flow::new(vec![0, 1], 1), Flow::new(vec![0, 1], 1)])],
        };
        let e = reduce_node_to_edge(&inst).unwrap();
        assert_eq!(e.coflows[0].flows[0].edge_path, vec![0, 2, 1]);
        assert_eq!(e.coflows[0].flows[1].edge_path, vec![0, 2, 1]);
        assert_eq!(e.edges[2], CapEdge { a: 1, b: 2, capacity: Capacity::Unbounded });
        assert_eq!(e.walk(0, 0).unwrap(), vec![0, 1, 2, 3]);
        let back = reduce_edge_capacities(&e).unwrap();
        assert!(validate(&back).is_ok());
        assert_eq!(path_lambda(&back).lambda_finite, 2);
    }

    #[test]
    fn unbounded_node_is_rejected() {
        let inst = Instance {
            name: None,
            nodes: vec![Node::new("a", Capacity::Unbounded)],
            coflows: vec![Coflow::new(1.0, 0, vec![Flow::new(vec![0], 1)])],
        };
        assert_eq!(reduce_node_to_edge(&inst), Err(ReduceError::UnboundedNode { node: 0 }));
    }
}
