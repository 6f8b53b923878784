//! JSON documents for instances (node- and edge-capacitated) and schedules.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use coflow_core::instance::{reduce_edge_capacities, CapEdge, EdgeCapInstance, EdgeCoflow, EdgeFlow, ReduceError};
use coflow_core::scheduler::{Schedule, UnitRef};
use coflow_core::{Capacity, Coflow, Flow, Instance, Node};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("coflow {coflow} flow {flow}: unknown node id {id:?}")]
    UnknownNode { coflow: usize, flow: usize, id: String },
    #[error("edge {edge}: unknown node id {id:?}")]
    UnknownEdgeNode { edge: usize, id: String },
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
}

/// Capacity as written in files: a positive integer or `"unbounded"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CapacityDoc(pub Capacity);

impl Serialize for CapacityDoc {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0 {
            Capacity::Finite(u) => s.serialize_u32(u),
            Capacity::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for CapacityDoc {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = CapacityDoc;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a positive integer or \"unbounded\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<CapacityDoc, E> {
                u32::try_from(v)
                    .map(|u| CapacityDoc(Capacity::Finite(u)))
                    .map_err(|_| E::invalid_value(de::Unexpected::Unsigned(v), &self))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<CapacityDoc, E> {
                u64::try_from(v)
                    .map_err(|_| E::invalid_value(de::Unexpected::Signed(v), &self))
                    .and_then(|v| self.visit_u64(v))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<CapacityDoc, E> {
                if v == "unbounded" {
                    Ok(CapacityDoc(Capacity::Unbounded))
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub id: String,
    pub capacity: CapacityDoc,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FlowDoc {
    pub path: Vec<String>,
    pub demand: u32,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CoflowDoc {
    pub weight: f64,
    pub release: u32,
    pub flows: Vec<FlowDoc>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub nodes: Vec<NodeDoc>,
    pub coflows: Vec<CoflowDoc>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EdgeNodeDoc {
    pub id: String,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub a: String,
    pub b: String,
    pub capacity: CapacityDoc,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EdgeFlowDoc {
    pub edge_path: Vec<usize>,
    pub demand: u32,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EdgeCoflowDoc {
    pub weight: f64,
    pub release: u32,
    pub flows: Vec<EdgeFlowDoc>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EdgeInstanceDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub nodes: Vec<EdgeNodeDoc>,
    pub edges: Vec<EdgeDoc>,
    pub coflows: Vec<EdgeCoflowDoc>,
}

impl From<&Instance> for InstanceDoc {
    fn from(inst: &Instance) -> Self {
        InstanceDoc {
            name: inst.name.clone(),
            nodes: inst.nodes.iter().map(|n| NodeDoc { id: n.id.clone(), capacity: CapacityDoc(n.capacity) }).collect(),
            coflows: inst
                .coflows
                .iter()
                .map(|c| CoflowDoc {
                    weight: c.weight,
                    release: c.release,
                    flows: c
                        .flows
                        .iter()
                        .map(|f| FlowDoc {
                            path: f.path.iter().map(|&v| inst.nodes[v].id.clone()).collect(),
                            demand: f.demand,
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl InstanceDoc {
    /// Resolves node ids; does not run validation.
    pub fn resolve(&self) -> Result<Instance, FormatError> {
        let nodes: Vec<Node> = self.nodes.iter().map(|n| Node::new(n.id.clone(), n.capacity.0)).collect();
        let lookup = |id: &str| self.nodes.iter().position(|n| n.id == id);
        let mut coflows = Vec::with_capacity(self.coflows.len());
        for (k, c) in self.coflows.iter().enumerate() {
            let mut flows = Vec::with_capacity(c.flows.len());
            for (j, f) in c.flows.iter().enumerate() {
                let path = f
                    .path
                    .iter()
                    .map(|id| lookup(id).ok_or_else(|| FormatError::UnknownNode { coflow: k, flow: j, id: id.clone() }))
                    .collect::<Result<Vec<_>, _>>()?;
                flows.push(Flow::new(path, f.demand));
            }
            coflows.push(Coflow::new(c.weight, c.release, flows));
        }
        Ok(Instance { name: self.name.clone(), nodes, coflows })
    }
}

impl From<&EdgeCapInstance> for EdgeInstanceDoc {
    fn from(e: &EdgeCapInstance) -> Self {
        EdgeInstanceDoc {
            name: e.name.clone(),
            nodes: e.nodes.iter().map(|id| EdgeNodeDoc { id: id.clone() }).collect(),
            edges: e
                .edges
                .iter()
                .map(|x| EdgeDoc { a: e.nodes[x.a].clone(), b: e.nodes[x.b].clone(), capacity: CapacityDoc(x.capacity) })
                .collect(),
            coflows: e
                .coflows
                .iter()
                .map(|c| EdgeCoflowDoc {
                    weight: c.weight,
                    release: c.release,
                    flows: c
                        .flows
                        .iter()
                        .map(|f| EdgeFlowDoc { edge_path: f.edge_path.clone(), demand: f.demand })
                        .collect(),
                })
                .collect(),
        }
    }
}

impl EdgeInstanceDoc {
    pub fn resolve(&self) -> Result<EdgeCapInstance, FormatError> {
        let lookup = |edge: usize, id: &str| {
            self.nodes
                .iter()
                .position(|n| n.id == id)
                .ok_or_else(|| FormatError::UnknownEdgeNode { edge, id: id.to_string() })
        };
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, x)| Ok(CapEdge { a: lookup(i, &x.a)?, b: lookup(i, &x.b)?, capacity: x.capacity.0 }))
            .collect::<Result<Vec<_>, FormatError>>()?;
        Ok(EdgeCapInstance {
            name: self.name.clone(),
            nodes: self.nodes.iter().map(|n| n.id.clone()).collect(),
            edges,
            coflows: self
                .coflows
                .iter()
                .map(|c| EdgeCoflow {
                    weight: c.weight,
                    release: c.release,
                    flows: c.flows.iter().map(|f| EdgeFlow { edge_path: f.edge_path.clone(), demand: f.demand }).collect(),
                })
                .collect(),
        })
    }
}

fn check(inst: Instance) -> Result<Instance, FormatError> {
    let report = inst.validate();
    if report.is_ok() {
        Ok(inst)
    } else {
        let msgs: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
        Err(FormatError::Invalid(msgs.join("; ")))
    }
}

/// Parses a node-capacitated document without validating it.
pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    serde_json::from_str::<InstanceDoc>(text)?.resolve()
}

/// Parses and validates a node-capacitated document.
pub fn load_instance_str(text: &str) -> Result<Instance, FormatError> {
    check(parse_instance(text)?)
}

pub fn save_instance_string(inst: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(&InstanceDoc::from(inst)).expect("instance serializes");
    s.push('\n');
    s
}

pub fn parse_edge_instance(text: &str) -> Result<EdgeCapInstance, FormatError> {
    serde_json::from_str::<EdgeInstanceDoc>(text)?.resolve()
}

pub fn save_edge_instance_string(e: &EdgeCapInstance) -> String {
    let mut s = serde_json::to_string_pretty(&EdgeInstanceDoc::from(e)).expect("instance serializes");
    s.push('\n');
    s
}

/// Which document flavour a loaded file was.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SourceKind {
    Nodes,
    Edges,
}

/// Loads either flavour; edge-capacitated documents (those with an
/// `"edges"` key) are reduced to node capacities. The result is validated.
pub fn load_any_str(text: &str) -> Result<(Instance, SourceKind), FormatError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.get("edges").is_some() {
        let e = parse_edge_instance(text)?;
        Ok((check(reduce_edge_capacities(&e)?)?, SourceKind::Edges))
    } else {
        Ok((load_instance_str(text)?, SourceKind::Nodes))
    }
}

pub fn read_file(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.to_path_buf(), source })
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), FormatError> {
    fs::write(path, contents).map_err(|source| FormatError::Io { path: path.to_path_buf(), source })
}

pub fn load_instance(path: &Path) -> Result<Instance, FormatError> {
    load_instance_str(&read_file(path)?)
}

pub fn load_any(path: &Path) -> Result<(Instance, SourceKind), FormatError> {
    load_any_str(&read_file(path)?)
}

pub fn save_instance(path: &Path, inst: &Instance) -> Result<(), FormatError> {
    write_file(path, &save_instance_string(inst))
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct UnitDoc {
    pub job: usize,
    pub flow: usize,
    pub copy: u32,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SlotDoc {
    pub t: u32,
    pub units: Vec<UnitDoc>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScheduleDoc {
    pub slots: Vec<SlotDoc>,
    pub completion: Vec<u32>,
    pub objective: f64,
}

impl From<&Schedule> for ScheduleDoc {
    fn from(s: &Schedule) -> Self {
        let slots = s
            .by_slot()
            .into_iter()
            .map(|(t, idx)| {
                let mut units: Vec<UnitDoc> = idx
                    .into_iter()
                    .map(|i| {
                        let u = s.units[i];
                        UnitDoc { job: u.job, flow: u.flow, copy: u.copy }
                    })
                    .collect();
                units.sort_by_key(|u| (u.job, u.flow, u.copy));
                SlotDoc { t, units }
            })
            .collect();
        ScheduleDoc { slots, completion: s.completion.clone(), objective: s.objective }
    }
}

impl ScheduleDoc {
    /// Rebuilds a schedule keeping the recorded completions and objective,
    /// so that validation can compare them with recomputed values.
    pub fn to_schedule(&self) -> Schedule {
        let assignments = self
            .slots
            .iter()
            .flat_map(|s| s.units.iter().map(move |u| (UnitRef { job: u.job, flow: u.flow, copy: u.copy }, s.t)))
            .collect();
        let mut schedule = Schedule::new(&vec![0.0; self.completion.len()], assignments);
        schedule.completion = self.completion.clone();
        schedule.objective = self.objective;
        schedule
    }
}

pub fn save_schedule_string(s: &Schedule) -> String {
    let mut out = serde_json::to_string_pretty(&ScheduleDoc::from(s)).expect("schedule serializes");
    out.push('\n');
    out
}

pub fn parse_schedule(text: &str) -> Result<Schedule, FormatError> {
    Ok(serde_json::from_str::<ScheduleDoc>(text)?.to_schedule())
}

#[cfg(test)]
mod tests {
    use super::*;
    use coflow_core::instance::{gen_fig4, gen_triangle, reduce_node_to_edge};

    #[test]
    fn round_trip_reference_instances() {
        for inst in [gen_triangle(), gen_fig4()] {
            assert_eq!(load_instance_str(&save_instance_string(&inst)).unwrap(), inst);
        }
    }

    #[test]
    fn missing_coflows_names_the_field() {
        let err = load_instance_str(r#"{"nodes": []}"#).unwrap_err();
        assert!(err.to_string().contains("coflows"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = load_instance_str(r#"{"nodes": [], "coflows": [], "extra": 1}"#).unwrap_err();
        assert!(err.to_string().contains("extra"), "{err}");
    }

    #[test]
    fn unbounded_capacity_keyword() {
        let text = r#"{"nodes": [{"id": "x", "capacity": "unbounded"}, {"id": "y", "capacity": 2}],
            "coflows": [{"weight": 1, "release": 0, "flows": [{"path": ["x", "y"], "demand": 1}]}]}"#;
        let inst = load_instance_str(text).unwrap();
        assert_eq!(inst.nodes[0].capacity, Capacity::Unbounded);
        assert_eq!(inst.nodes[1].capacity, Capacity::Finite(2));
        assert!(load_instance_str(&text.replace("\"unbounded\"", "\"lots\"")).is_err());
    }

    #[test]
    fn unknown_node_and_invalid_instance() {
        let text = r#"{"nodes": [{"id": "x", "capacity": 1}],
            "coflows": [{"weight": 1, "release": 0, "flows": [{"path": ["x", "q"], "demand": 1}]}]}"#;
        assert!(matches!(load_instance_str(text), Err(FormatError::UnknownNode { .. })));
        let text = text.replace(", \"q\"", ", \"x\"");
        assert!(matches!(load_instance_str(&text), Err(FormatError::Invalid(m)) if m.contains("simple")));
    }

    #[test]
    fn edge_documents_are_reduced() {
        let e = reduce_node_to_edge(&gen_triangle()).unwrap();
        let text = save_edge_instance_string(&e);
        assert_eq!(parse_edge_instance(&text).unwrap(), e);
        let (inst, kind) = load_any_str(&text).unwrap();
        assert_eq!(kind, SourceKind::Edges);
        assert_eq!(inst.total_units(), 3);
    }

    #[test]
    fn schedule_round_trip() {
        let s = Schedule::new(
            &[2.0],
            vec![(UnitRef { job: 0, flow: 1, copy: 0 }, 2), (UnitRef { job: 0, flow: 0, copy: 0 }, 1)],
        );
        let back = parse_schedule(&save_schedule_string(&s)).unwrap();
        assert_eq!(back.objective, 4.0);
        assert_eq!(back.completion, vec![2]);
        assert_eq!(ScheduleDoc::from(&back), ScheduleDoc::from(&s));
    }
}
