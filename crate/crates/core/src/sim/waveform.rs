// SPDX-License-Identifier: Apache-2.0

use std::io;
use std::sync::Arc;

use serde::Serialize;

use crate::netlist::{Netlist, NodeId, NodeKind};

use super::state::{Logic, NodeState, Thresholds};
use super::{SimError, SimTime};

/// Per-node metadata shared by every waveform of one netlist.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeTable {
    pub names: Vec<String>,
    pub kinds: Vec<NodeKind>,
    pub capacitance: Vec<f64>,
}

impl NodeTable {
    pub fn new(n: &Netlist) -> Self {
        NodeTable {
            names: n.nodes().iter().map(|x| x.name.clone()).collect(),
            kinds: n.nodes().iter().map(|x| x.kind).collect(),
            capacitance: n.nodes().iter().map(|x| x.capacitance).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RailShortEvent {
    pub time: SimTime,
    pub nodes: Vec<NodeId>,
}

/// Time-ordered per-node state changes of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub(crate) nodes: Arc<NodeTable>,
    pub(crate) changes: Vec<Vec<(SimTime, NodeState)>>,
    pub(crate) duration: SimTime,
    pub(crate) rail_shorts: Vec<RailShortEvent>,
    pub(crate) thresholds: Thresholds,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct TransitionCount {
    pub rising: usize,
    pub falling: usize,
    /// Transitions into or out of X.
    pub x: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeActivity {
    pub node: String,
    #[serde(flatten)]
    pub transitions: TransitionCount,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Activity {
    /// Sum over 0/1 logic transitions of the switching node's capacitance.
    pub weighted: f64,
    pub x_transitions: usize,
    pub per_node: Vec<NodeActivity>,
}

impl Waveform {
    pub fn duration(&self) -> SimTime {
        self.duration
    }

    pub fn node_table(&self) -> &NodeTable {
        &self.nodes
    }

    pub fn thresholds(&self) -> Thresholds {
        self.thresholds
    }

    /// Change records of one node; the first is at tick 0.
    pub fn changes(&self, id: NodeId) -> &[(SimTime, NodeState)] {
        &self.changes[id.index()]
    }

    pub fn rail_shorts(&self) -> &[RailShortEvent] {
        &self.rail_shorts
    }

    pub fn final_states(&self) -> Vec<NodeState> {
        self.changes
            .iter()
            .map(|c| c.last().expect("record at tick 0").1)
            .collect()
    }

    /// State of one node at `time` (last change at or before it).
    pub fn state_at(&self, id: NodeId, time: SimTime) -> NodeState {
        let recs = &self.changes[id.index()];
        let i = recs.partition_point(|&(t, _)| t <= time);
        recs[i.saturating_sub(1)].1
    }

    pub fn logic_at(&self, id: NodeId, time: SimTime) -> Logic {
        self.thresholds.logic(self.state_at(id, time).voltage)
    }

    /// State of every node at `time`.
    pub fn sample(&self, time: SimTime) -> Result<Vec<NodeState>, SimError> {
        if time > self.duration {
            return Err(SimError::TimeOutOfRange {
                time,
                duration: self.duration,
            });
        }
        Ok((0..self.changes.len())
            .map(|i| self.state_at(NodeId(i as u32), time))
            .collect())
    }

    /// Logic transitions of one node with timestamps in `[from, to)`.
    pub fn transitions(&self, id: NodeId, from: SimTime, to: SimTime) -> TransitionCount {
        let mut count = TransitionCount::default();
        let mut prev = None;
        for &(t, s) in &self.changes[id.index()] {
            if t >= to {
                break;
            }
            let l = self.thresholds.logic(s.voltage);
            if let Some(p) = prev {
                if p != l && t >= from {
                    match (p, l) {
                        (Logic::Zero, Logic::One) => count.rising += 1,
                        (Logic::One, Logic::Zero) => count.falling += 1,
                        _ => count.x += 1,
                    }
                }
            }
            prev = Some(l);
        }
        count
    }

    pub fn switching_activity(&self) -> Activity {
        let mut weighted = 0.0;
        let mut x_transitions = 0;
        let mut per_node = Vec::with_capacity(self.changes.len());
        for i in 0..self.changes.len() {
            let tc = self.transitions(NodeId(i as u32), 0, SimTime::MAX);
            weighted += (tc.rising + tc.falling) as f64 * self.nodes.capacitance[i];
            x_transitions += tc.x;
            per_node.push(NodeActivity {
                node: self.nodes.names[i].clone(),
                transitions: tc,
            });
        }
        Activity {
            weighted,
            x_transitions,
            per_node,
        }
    }

    /// Write the logic view as a VCD document (one 1-bit wire per node).
    pub fn write_vcd<W: io::Write>(&self, w: W) -> io::Result<()> {
        use vcd::{TimescaleUnit, Value};
        let mut out = vcd::Writer::new(w);
        out.timescale(1, TimescaleUnit::PS)?;
        out.add_module("top")?;
        let mut codes = Vec::with_capacity(self.changes.len());
        for name in &self.nodes.names {
            codes.push(out.add_wire(1, name)?);
        }
        out.upscope()?;
        out.enddefinitions()?;
        let value = |l: Logic| match l {
            Logic::Zero => Value::V0,
            Logic::One => Value::V1,
            Logic::X => Value::X,
        };
        // Merge logic changes of all nodes into one time-ordered stream.
        let mut events: Vec<(SimTime, usize, Logic)> = Vec::new();
        for (i, recs) in self.changes.iter().enumerate() {
            let mut prev = None;
            for &(t, s) in recs {
                let l = self.thresholds.logic(s.voltage);
                if prev != Some(l) {
                    events.push((t, i, l));
                    prev = Some(l);
                }
            }
        }
        events.sort_by_key(|&(t, i, _)| (t, i));
        let mut current = None;
        for (t, i, l) in events {
            if current != Some(t) {
                out.timestamp(t)?;
                current = Some(t);
            }
            out.change_scalar(codes[i], value(l))?;
        }
        if current != Some(self.duration) {
            out.timestamp(self.duration)?;
        }
        out.flush()
    }
}
