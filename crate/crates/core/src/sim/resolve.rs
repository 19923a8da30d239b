// SPDX-License-Identifier: Apache-2.0

//! One switch-level resolution step.
//!
//! Conducting channels partition the non-source nodes into components.
//! A component touching only high sources is driven to 1, only low sources
//! to 0, both is a short (X); a component touching no source shares its
//! charge. Channels whose gate is X are resolved twice, all-on and all-off,
//! and nodes that disagree between the two passes become X.

use crate::netlist::{MosKind, Netlist, NodeId, NodeKind};

use super::state::{Logic, NodeState, Strength, Thresholds};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Conduction {
    Off,
    On,
    Unknown,
}

#[derive(Debug, Clone, Copy)]
struct Device {
    kind: MosKind,
    gate: u32,
    a: u32,
    b: u32,
}

/// Flattened netlist for the inner loop.
#[derive(Debug, Clone)]
pub(crate) struct Circuit {
    pub(crate) is_source: Vec<bool>,
    pub(crate) capacitance: Vec<f64>,
    devices: Vec<Device>,
}

impl Circuit {
    pub(crate) fn new(n: &Netlist) -> Self {
        Circuit {
            is_source: n.nodes().iter().map(|x| x.kind.is_source()).collect(),
            capacitance: n.nodes().iter().map(|x| x.capacitance).collect(),
            devices: n
                .devices()
                .iter()
                .map(|d| Device {
                    kind: d.kind,
                    gate: d.gate.0,
                    a: d.source.0,
                    b: d.drain.0,
                })
                .collect(),
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.is_source.len()
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Acc {
    sum_cv: f64,
    sum_c: f64,
    vmin: f64,
    vmax: f64,
    high: bool,
    low: bool,
}

/// Scratch space for repeated resolution over one circuit.
#[derive(Debug, Clone)]
pub(crate) struct Resolver {
    parent: Vec<u32>,
    acc: Vec<Acc>,
    attach: Vec<(u32, bool)>,
    conduction: Vec<Conduction>,
    alt: Vec<NodeState>,
    short_alt: Vec<u32>,
}

impl Resolver {
    pub(crate) fn new(c: &Circuit) -> Self {
        Resolver {
            parent: vec![0; c.len()],
            acc: vec![Acc::default(); c.len()],
            attach: Vec::new(),
            conduction: vec![Conduction::Off; c.devices.len()],
            alt: vec![NodeState::STORED_LOW; c.len()],
            short_alt: Vec::new(),
        }
    }

    /// Resolve `cur` into `next`; shorted nodes are appended to `shorted`.
    pub(crate) fn step(
        &mut self,
        c: &Circuit,
        th: &Thresholds,
        cur: &[NodeState],
        next: &mut [NodeState],
        shorted: &mut Vec<u32>,
    ) {
        let mut any_unknown = false;
        for (d, slot) in c.devices.iter().zip(self.conduction.iter_mut()) {
            let g = th.logic(cur[d.gate as usize].voltage);
            *slot = match (d.kind, g) {
                (_, Logic::X) => {
                    any_unknown = true;
                    Conduction::Unknown
                }
                (MosKind::Nmos, Logic::One) | (MosKind::Pmos, Logic::Zero) => Conduction::On,
                _ => Conduction::Off,
            };
        }
        if !any_unknown {
            self.pass(c, cur, next, false, shorted);
            return;
        }
        let mut alt = std::mem::take(&mut self.alt);
        let mut short_alt = std::mem::take(&mut self.short_alt);
        short_alt.clear();
        self.pass(c, cur, &mut alt, true, &mut short_alt);
        self.pass(c, cur, next, false, shorted);
        for i in 0..c.len() {
            if !c.is_source[i] && th.logic(alt[i].voltage) != th.logic(next[i].voltage) {
                next[i] = NodeState::UNKNOWN;
            }
        }
        self.alt = alt;
        self.short_alt = short_alt;
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            // Smaller index becomes the root; keeps the result order-independent.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }

    fn pass(
        &mut self,
        c: &Circuit,
        cur: &[NodeState],
        out: &mut [NodeState],
        unknown_on: bool,
        shorted: &mut Vec<u32>,
    ) {
        let n = c.len();
        for i in 0..n {
            self.parent[i] = i as u32;
        }
        self.attach.clear();
        for (k, d) in c.devices.iter().enumerate() {
            let on = match self.conduction[k] {
                Conduction::On => true,
                Conduction::Off => false,
                Conduction::Unknown => unknown_on,
            };
            if !on {
                continue;
            }
            let sa = c.is_source[d.a as usize];
            let sb = c.is_source[d.b as usize];
            match (sa, sb) {
                (false, false) => self.union(d.a, d.b),
                (true, false) => self.attach.push((d.b, cur[d.a as usize].voltage >= 0.5)),
                (false, true) => self.attach.push((d.a, cur[d.b as usize].voltage >= 0.5)),
                (true, true) => {}
            }
        }
        for i in 0..n {
            if c.is_source[i] {
                continue;
            }
            let r = self.find(i as u32) as usize;
            let v = cur[i].voltage;
            let cap = c.capacitance[i];
            let a = &mut self.acc[r];
            if r == i {
                *a = Acc {
                    sum_cv: 0.0,
                    sum_c: 0.0,
                    vmin: v,
                    vmax: v,
                    high: false,
                    low: false,
                };
            }
            a.sum_cv += cap * v;
            a.sum_c += cap;
            a.vmin = a.vmin.min(v);
            a.vmax = a.vmax.max(v);
        }
        for j in 0..self.attach.len() {
            let (node, high) = self.attach[j];
            let r = self.find(node) as usize;
            if high {
                self.acc[r].high = true;
            } else {
                self.acc[r].low = true;
            }
        }
        for i in 0..n {
            if c.is_source[i] {
                out[i] = cur[i];
                continue;
            }
            let r = self.find(i as u32) as usize;
            let a = self.acc[r];
            out[i] = match (a.high, a.low) {
                (true, true) => {
                    shorted.push(i as u32);
                    NodeState::UNKNOWN
                }
                (true, false) => NodeState::DRIVEN_HIGH,
                (false, true) => NodeState::DRIVEN_LOW,
                (false, false) if a.vmin == a.vmax => NodeState {
                    voltage: a.vmin,
                    strength: Strength::Stored,
                },
                (false, false) => NodeState::stored(a.sum_cv / a.sum_c),
            };
        }
    }
}

/// Result of one resolution step over a whole netlist.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolution {
    pub states: Vec<NodeState>,
    /// Nodes whose component connects opposite-valued sources.
    pub rail_short: Vec<NodeId>,
}

/// Apply one resolution step to `states` (indexed by node id).
///
/// Source nodes keep their states. Panics if `states` does not cover every
/// node of `netlist`.
pub fn resolve(netlist: &Netlist, states: &[NodeState], thresholds: &Thresholds) -> Resolution {
    assert_eq!(states.len(), netlist.nodes().len(), "one state per node");
    let c = Circuit::new(netlist);
    let mut r = Resolver::new(&c);
    let mut next = states.to_vec();
    let mut shorted = Vec::new();
    r.step(&c, thresholds, states, &mut next, &mut shorted);
    Resolution {
        states: next,
        rail_short: shorted.into_iter().map(NodeId).collect(),
    }
}

/// Initial state: sources at the given values, everything else stored at 0.
pub fn initial_states(netlist: &Netlist, source_value: impl Fn(NodeId) -> bool) -> Vec<NodeState> {
    netlist
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, n)| match n.kind {
            NodeKind::Vdd => NodeState::DRIVEN_HIGH,
            NodeKind::Gnd => NodeState::DRIVEN_LOW,
            NodeKind::Clock | NodeKind::Input => NodeState::driven(source_value(NodeId(i as u32))),
            NodeKind::Output | NodeKind::Internal => NodeState::STORED_LOW,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_netlist;

    fn th() -> Thresholds {
        Thresholds::default()
    }

    fn id(n: &Netlist, s: &str) -> usize {
        n.node_id(s).unwrap().index()
    }

    #[test]
    fn nmos_pulls_drain_to_ground() {
        let n = parse_netlist(
            "NODE VDD vdd\nNODE GND gnd\nNODE CLK clock\nNODE g input\nNODE d internal\n\
             MOS m NMOS g GND d",
        )
        .unwrap();
        let mut s = initial_states(&n, |_| true);
        s[id(&n, "d")] = NodeState::stored(1.0);
        let r = resolve(&n, &s, &th());
        assert_eq!(r.states[id(&n, "d")], NodeState::DRIVEN_LOW);
        assert!(r.rail_short.is_empty());
    }

    fn pair(ca: f64, cb: f64) -> Netlist {
        parse_netlist(&format!(
            "NODE VDD vdd\nNODE GND gnd\nNODE CLK clock\nNODE g input\n\
             NODE a internal {ca}\nNODE b internal {cb}\nMOS m NMOS g a b"
        ))
        .unwrap()
    }

    #[test]
    fn symmetric_charge_sharing_gives_x() {
        let n = pair(10.0, 10.0);
        let mut s = initial_states(&n, |_| true);
        s[id(&n, "a")] = NodeState::stored(1.0);
        let r = resolve(&n, &s, &th());
        for node in ["a", "b"] {
            let st = r.states[id(&n, node)];
            assert_eq!(st.voltage, 0.5);
            assert_eq!(st.strength, Strength::Stored);
            assert_eq!(st.logic(), Logic::X);
        }
    }

    #[test]
    fn lopsided_charge_sharing_degrades() {
        let n = pair(9.0, 1.0);
        let mut s = initial_states(&n, |_| true);
        s[id(&n, "a")] = NodeState::stored(1.0);
        let r = resolve(&n, &s, &th());
        let a = r.states[id(&n, "a")];
        assert!((a.voltage - 0.9).abs() < 1e-15);
        assert_eq!(a.logic(), Logic::One);
        assert_eq!(r.states[id(&n, "b")].voltage, a.voltage);
    }

    #[test]
    fn opposite_sources_short() {
        let n = parse_netlist(
            "NODE VDD vdd\nNODE GND gnd\nNODE CLK clock\nNODE g input\nNODE y internal\n\
             MOS p PMOS GND VDD y\nMOS m NMOS g y GND",
        )
        .unwrap();
        let s = initial_states(&n, |_| true);
        let r = resolve(&n, &s, &th());
        assert_eq!(r.states[id(&n, "y")], NodeState::UNKNOWN);
        assert_eq!(r.rail_short, vec![n.node_id("y").unwrap()]);
    }

    #[test]
    fn unknown_gate_agreeing_passes_keep_value() {
        // y is driven low regardless of the X-gated device.
        let n = parse_netlist(
            "NODE VDD vdd\nNODE GND gnd\nNODE CLK clock\nNODE g input\nNODE x internal\n\
             NODE y internal\nMOS m1 NMOS g y GND\nMOS m2 NMOS x y GND",
        )
        .unwrap();
        let mut s = initial_states(&n, |_| true);
        s[id(&n, "x")] = NodeState::UNKNOWN;
        s[id(&n, "y")] = NodeState::stored(1.0);
        let r = resolve(&n, &s, &th());
        assert_eq!(r.states[id(&n, "y")], NodeState::DRIVEN_LOW);
    }

    #[test]
    fn unknown_gate_disagreeing_passes_give_x() {
        let n = parse_netlist(
            "NODE VDD vdd\nNODE GND gnd\nNODE CLK clock\nNODE x internal\nNODE y internal\n\
             MOS m NMOS x y GND",
        )
        .unwrap();
        let mut s = initial_states(&n, |_| true);
        s[id(&n, "x")] = NodeState::UNKNOWN;
        s[id(&n, "y")] = NodeState::stored(1.0);
        let r = resolve(&n, &s, &th());
        assert_eq!(r.states[id(&n, "y")], NodeState::UNKNOWN);
    }

    #[test]
    fn sources_do_not_join_components() {
        // y1 is tied to VDD, y2 to GND; both touch the gate input only.
        let n = parse_netlist(
            "NODE VDD vdd\nNODE GND gnd\nNODE CLK clock\nNODE g input\n\
             NODE y1 internal\nNODE y2 internal\nMOS a NMOS g VDD y1\nMOS b NMOS g y2 GND\n\
             MOS c NMOS g y1 g\nMOS d NMOS g y2 g",
        )
        .unwrap();
        let s = initial_states(&n, |_| true);
        let r = resolve(&n, &s, &th());
        assert_eq!(r.states[id(&n, "y1")], NodeState::DRIVEN_HIGH);
        assert_eq!(r.rail_short, vec![n.node_id("y2").unwrap()]);
    }
}
