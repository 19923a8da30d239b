// SPDX-License-Identifier: Apache-2.0

//! Transistor-level netlists: nodes, MOS devices, structural validation.

mod text;

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

pub use text::{parse_netlist, serialize_netlist, ParseError};

/// Default charge-storage weight of an output node.
pub const DEFAULT_OUTPUT_CAPACITANCE: f64 = 10.0;
/// Default charge-storage weight of an internal node (and of driven sources,
/// where it only weights switching activity).
pub const DEFAULT_INTERNAL_CAPACITANCE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Vdd,
    Gnd,
    Clock,
    Input,
    Output,
    Internal,
}

impl NodeKind {
    /// Rails, the clock, and primary inputs are infinite-drive sources.
    pub fn is_source(self) -> bool {
        matches!(
            self,
            NodeKind::Vdd | NodeKind::Gnd | NodeKind::Clock | NodeKind::Input
        )
    }

    pub fn default_capacitance(self) -> f64 {
        match self {
            NodeKind::Output => DEFAULT_OUTPUT_CAPACITANCE,
            _ => DEFAULT_INTERNAL_CAPACITANCE,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            NodeKind::Vdd => "vdd",
            NodeKind::Gnd => "gnd",
            NodeKind::Clock => "clock",
            NodeKind::Input => "input",
            NodeKind::Output => "output",
            NodeKind::Internal => "internal",
        }
    }

    pub fn from_keyword(s: &str) -> Option<NodeKind> {
        Some(match s {
            "vdd" => NodeKind::Vdd,
            "gnd" => NodeKind::Gnd,
            "clock" => NodeKind::Clock,
            "input" => NodeKind::Input,
            "output" => NodeKind::Output,
            "internal" => NodeKind::Internal,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Node {
    pub name: String,
    pub kind: NodeKind,
    pub capacitance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MosKind {
    #[serde(rename = "NMOS")]
    Nmos,
    #[serde(rename = "PMOS")]
    Pmos,
}

impl MosKind {
    pub fn keyword(self) -> &'static str {
        match self {
            MosKind::Nmos => "NMOS",
            MosKind::Pmos => "PMOS",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MosDevice {
    pub name: String,
    pub kind: MosKind,
    pub gate: NodeId,
    pub source: NodeId,
    pub drain: NodeId,
}

impl MosDevice {
    /// True if the channel joins `a` and `b`, in either orientation.
    pub fn channel_joins(&self, a: NodeId, b: NodeId) -> bool {
        (self.source == a && self.drain == b) || (self.source == b && self.drain == a)
    }

    pub fn channel_touches(&self, n: NodeId) -> bool {
        self.source == n || self.drain == n
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum NetlistError {
    #[error("duplicate node {0}")]
    DuplicateNode(String),
    #[error("duplicate device {0}")]
    DuplicateDevice(String),
    #[error("undeclared node {0}")]
    UndeclaredNode(String),
    #[error("multiple {0} declarations")]
    MultipleRail(&'static str),
    #[error("node {0} is not an input node")]
    NotAnInput(String),
    #[error("capacitance of node {0} must be positive and finite")]
    BadCapacitance(String),
}

/// A transistor-level circuit.
///
/// Nodes and devices keep declaration order. `inputs` lists the Input-kind
/// nodes in priority order (index 0 highest) excluding the look-ahead input;
/// `outputs` lists the Output-kind nodes in declaration order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Netlist {
    nodes: Vec<Node>,
    devices: Vec<MosDevice>,
    lookahead_in: Option<NodeId>,
    lookahead_out: Option<NodeId>,
    by_name: HashMap<String, NodeId>,
    device_names: HashMap<String, usize>,
}

impl Netlist {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declare a node; `capacitance` of `None` applies the kind default.
    pub fn add_node(
        &mut self,
        name: &str,
        kind: NodeKind,
        capacitance: Option<f64>,
    ) -> Result<NodeId, NetlistError> {
        if self.by_name.contains_key(name) {
            return Err(NetlistError::DuplicateNode(name.to_string()));
        }
        let capacitance = capacitance.unwrap_or_else(|| kind.default_capacitance());
        if !(capacitance.is_finite() && capacitance > 0.0) {
            return Err(NetlistError::BadCapacitance(name.to_string()));
        }
        match kind {
            NodeKind::Vdd | NodeKind::Gnd | NodeKind::Clock if self.rail(kind).is_some() => {
                return Err(NetlistError::MultipleRail(kind.keyword()));
            }
            _ => {}
        }
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(Node {
            name: name.to_string(),
            kind,
            capacitance,
        });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn add_device(
        &mut self,
        name: &str,
        kind: MosKind,
        gate: NodeId,
        source: NodeId,
        drain: NodeId,
    ) -> Result<(), NetlistError> {
        if self.device_names.contains_key(name) {
            return Err(NetlistError::DuplicateDevice(name.to_string()));
        }
        for n in [gate, source, drain] {
            if n.index() >= self.nodes.len() {
                return Err(NetlistError::UndeclaredNode(format!("#{}", n.0)));
            }
        }
        self.device_names
            .insert(name.to_string(), self.devices.len());
        self.devices.push(MosDevice {
            name: name.to_string(),
            kind,
            gate,
            source,
            drain,
        });
        Ok(())
    }

    /// Add a device with terminals given by node name.
    pub fn add_device_by_name(
        &mut self,
        name: &str,
        kind: MosKind,
        gate: &str,
        source: &str,
        drain: &str,
    ) -> Result<(), NetlistError> {
        let g = self.require(gate)?;
        let s = self.require(source)?;
        let d = self.require(drain)?;
        self.add_device(name, kind, g, s, d)
    }

    fn require(&self, name: &str) -> Result<NodeId, NetlistError> {
        self.node_id(name)
            .ok_or_else(|| NetlistError::UndeclaredNode(name.to_string()))
    }

    pub fn set_lookahead_in(&mut self, id: NodeId) -> Result<(), NetlistError> {
        if self.node(id).kind != NodeKind::Input {
            return Err(NetlistError::NotAnInput(self.node(id).name.clone()));
        }
        self.lookahead_in = Some(id);
        Ok(())
    }

    pub fn set_lookahead_out(&mut self, id: NodeId) {
        self.lookahead_out = Some(id);
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn devices(&self) -> &[MosDevice] {
        &self.devices
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn node_id(&self, name: &str) -> Option<NodeId> {
        self.by_name.get(name).copied()
    }

    pub fn node_name(&self, id: NodeId) -> &str {
        &self.nodes[id.index()].name
    }

    /// The unique node of a rail or clock kind, if declared.
    pub fn rail(&self, kind: NodeKind) -> Option<NodeId> {
        self.nodes
            .iter()
            .position(|n| n.kind == kind)
            .map(|i| NodeId(i as u32))
    }

    pub fn lookahead_in(&self) -> Option<NodeId> {
        self.lookahead_in
    }

    pub fn lookahead_out(&self) -> Option<NodeId> {
        self.lookahead_out
    }

    /// Primary inputs in priority order; the look-ahead input is excluded.
    pub fn inputs(&self) -> Vec<NodeId> {
        self.ids_of(NodeKind::Input)
            .filter(|&id| Some(id) != self.lookahead_in)
            .collect()
    }

    pub fn outputs(&self) -> Vec<NodeId> {
        self.ids_of(NodeKind::Output).collect()
    }

    fn ids_of(&self, kind: NodeKind) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .enumerate()
            .filter(move |(_, n)| n.kind == kind)
            .map(|(i, _)| NodeId(i as u32))
    }

    /// Structural violations; `two_pulldown_rule` adds the robust-encoder
    /// output rule.
    pub fn validate(&self, rules: ValidationRules) -> Vec<StructuralViolation> {
        validate(self, rules)
    }

    pub fn device_count(&self) -> DeviceCount {
        let nmos = self
            .devices
            .iter()
            .filter(|d| d.kind == MosKind::Nmos)
            .count();
        DeviceCount {
            nmos,
            pmos: self.devices.len() - nmos,
            total: self.devices.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DeviceCount {
    pub nmos: usize,
    pub pmos: usize,
    pub total: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ValidationRules {
    /// Every output must have exactly two NMOS channels to ground and no
    /// other NMOS channel.
    pub two_pulldown: bool,
}

impl ValidationRules {
    pub const BASIC: ValidationRules = ValidationRules {
        two_pulldown: false,
    };
    pub const ROBUST_PE: ValidationRules = ValidationRules { two_pulldown: true };
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum StructuralViolation {
    MissingRail { kind: NodeKind },
    MultipleRail { kind: NodeKind, count: usize },
    NonPositiveCapacitance { node: String },
    SourceEqualsDrain { device: String },
    RailShort { device: String },
    LookaheadNotInput { node: String },
    Pulldowns { output: String, to_ground: usize, other_nmos: usize },
}

impl fmt::Display for StructuralViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MissingRail { kind } => write!(f, "missing {} node", kind.keyword()),
            Self::MultipleRail { kind, count } => {
                write!(f, "{count} {} nodes declared", kind.keyword())
            }
            Self::NonPositiveCapacitance { node } => {
                write!(f, "node {node} needs positive capacitance")
            }
            Self::SourceEqualsDrain { device } => {
                write!(f, "device {device} has source equal to drain")
            }
            Self::RailShort { device } => write!(f, "rail short through device {device}"),
            Self::LookaheadNotInput { node } => {
                write!(f, "look-ahead input {node} is not an input node")
            }
            Self::Pulldowns {
                output,
                to_ground,
                other_nmos,
            } => write!(
                f,
                "output {output} has {to_ground} NMOS pull-downs to ground \
                 and {other_nmos} other NMOS channels (want 2 and 0)"
            ),
        }
    }
}

fn validate(n: &Netlist, rules: ValidationRules) -> Vec<StructuralViolation> {
    let mut out = Vec::new();
    for kind in [NodeKind::Vdd, NodeKind::Gnd, NodeKind::Clock] {
        match n.nodes.iter().filter(|x| x.kind == kind).count() {
            0 => out.push(StructuralViolation::MissingRail { kind }),
            1 => {}
            count => out.push(StructuralViolation::MultipleRail { kind, count }),
        }
    }
    for node in &n.nodes {
        if matches!(node.kind, NodeKind::Internal | NodeKind::Output)
            && !(node.capacitance.is_finite() && node.capacitance > 0.0)
        {
            out.push(StructuralViolation::NonPositiveCapacitance {
                node: node.name.clone(),
            });
        }
    }
    if let Some(la) = n.lookahead_in {
        if n.node(la).kind != NodeKind::Input {
            out.push(StructuralViolation::LookaheadNotInput {
                node: n.node(la).name.clone(),
            });
        }
    }
    let vdd = n.rail(NodeKind::Vdd);
    let gnd = n.rail(NodeKind::Gnd);
    for d in &n.devices {
        if d.source == d.drain {
            out.push(StructuralViolation::SourceEqualsDrain {
                device: d.name.clone(),
            });
        }
        if let (Some(v), Some(g)) = (vdd, gnd) {
            if d.channel_joins(v, g) {
                out.push(StructuralViolation::RailShort {
                    device: d.name.clone(),
                });
            }
        }
    }
    if rules.two_pulldown {
        if let Some(g) = gnd {
            for o in n.outputs() {
                let nmos = n
                    .devices
                    .iter()
                    .filter(|d| d.kind == MosKind::Nmos && d.channel_touches(o));
                let (to_ground, other) =
                    nmos.fold((0, 0), |(tg, ot), d| match d.channel_joins(o, g) {
                        true => (tg + 1, ot),
                        false => (tg, ot + 1),
                    });
                if to_ground != 2 || other != 0 {
                    out.push(StructuralViolation::Pulldowns {
                        output: n.node(o).name.clone(),
                        to_ground,
                        other_nmos: other,
                    });
                }
            }
        }
    }
    out
}
