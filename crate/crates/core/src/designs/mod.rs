// SPDX-License-Identifier: Apache-2.0

//! Netlist constructors: the race-free, charge-sharing-free 8-bit encoder,
//! two failure archetypes, and wide encoders built from 8-bit cells.

mod cells;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::behavior::{self, PeVector};
use crate::netlist::{DeviceCount, MosKind, Netlist, NodeId, NodeKind};

use cells::Cells;

/// Capacitance of the exposed stack node under each lower-half output of the
/// charge-sharing archetype.
pub const CSHARE_STACK_CAPACITANCE: f64 = 16.0;
/// Capacitance of the dynamic nodes behind the archetype's output inverters.
pub const CSHARE_DYNAMIC_CAPACITANCE: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DesignId {
    Robust8,
    RaceProne8,
    ChargeShareProne8,
    Cascaded(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DesignError {
    #[error("cascade width {0} is not a positive multiple of 8")]
    InvalidWidth(usize),
    #[error("unknown design {0:?} (expected robust8, raceprone8, cshare8 or cascade<N>)")]
    UnknownDesign(String),
}

impl DesignId {
    pub fn cascaded(bits: usize) -> Result<Self, DesignError> {
        if bits == 0 || !bits.is_multiple_of(8) {
            return Err(DesignError::InvalidWidth(bits));
        }
        Ok(DesignId::Cascaded(bits))
    }

    pub fn width(self) -> usize {
        match self {
            DesignId::Cascaded(n) => n,
            _ => 8,
        }
    }

    pub fn name(self) -> String {
        match self {
            DesignId::Robust8 => "robust8".into(),
            DesignId::RaceProne8 => "raceprone8".into(),
            DesignId::ChargeShareProne8 => "cshare8".into(),
            DesignId::Cascaded(n) => format!("cascade{n}"),
        }
    }

    /// True when the stage is enabled by a high look-ahead input.
    pub fn lookahead_active_high(self) -> bool {
        matches!(self, DesignId::RaceProne8)
    }

    pub fn build(self) -> Result<Netlist, DesignError> {
        Ok(match self {
            DesignId::Robust8 => build_robust_pe8(),
            DesignId::RaceProne8 => build_race_prone_pe8(),
            DesignId::ChargeShareProne8 => build_charge_share_prone_pe8(),
            DesignId::Cascaded(n) => build_cascaded(n)?,
        })
    }

    /// Expected outputs for inputs `ip` under look-ahead level `la`.
    pub fn golden(self, ip: &PeVector, la: bool) -> PeVector {
        let disabled = if self.lookahead_active_high() { !la } else { la };
        if disabled {
            return PeVector::zeros(ip.width());
        }
        behavior::pe_general(ip).expect("nonzero width")
    }
}

impl fmt::Display for DesignId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for DesignId {
    type Err = DesignError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "robust8" => Ok(DesignId::Robust8),
            "raceprone8" => Ok(DesignId::RaceProne8),
            "cshare8" => Ok(DesignId::ChargeShareProne8),
            _ => match s.strip_prefix("cascade").map(str::parse::<usize>) {
                Some(Ok(n)) => DesignId::cascaded(n),
                _ => Err(DesignError::UnknownDesign(s.to_string())),
            },
        }
    }
}

impl Serialize for DesignId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Rails, clock, `IP0..IP{w-1}`, the look-ahead input `LA`, and
/// `OP0..OP{w-1}`, declared in that order.
fn frame(width: usize) -> (Netlist, Vec<NodeId>, NodeId, Vec<NodeId>) {
    let mut n = Netlist::new();
    n.add_node("VDD", NodeKind::Vdd, None).unwrap();
    n.add_node("GND", NodeKind::Gnd, None).unwrap();
    n.add_node("CLK", NodeKind::Clock, None).unwrap();
    let ip: Vec<NodeId> = (0..width)
        .map(|i| n.add_node(&format!("IP{i}"), NodeKind::Input, None).unwrap())
        .collect();
    let la = n.add_node("LA", NodeKind::Input, None).unwrap();
    n.set_lookahead_in(la).unwrap();
    let op: Vec<NodeId> = (0..width)
        .map(|i| n.add_node(&format!("OP{i}"), NodeKind::Output, None).unwrap())
        .collect();
    (n, ip, la, op)
}

struct RobustPorts {
    la_out: NodeId,
}

/// One race-free 8-bit cell.
///
/// Outputs are p-type dynamic nodes: pre-discharged through a clock-gated
/// NMOS while CLK is low, and charged during evaluation through a PMOS stack
/// hanging off a shared clock-gated supply node. Each output has exactly one
/// more NMOS to ground, the reset device `rs<i>`, gated by `LA` (outputs 0-3)
/// or `LA_inter` (outputs 4-7). The first-level signals `la0..la2` are
/// `LA | IP0..IPk`, so the upper four stacks are only two devices deep.
fn robust_cell(c: &mut Cells, ip: &[NodeId], la: NodeId, op: &[NodeId]) -> RobustPorts {
    let (vdd, gnd, clk) = (c.vdd, c.gnd, c.clk);
    let clkb = c.inv("inv", "clkb", clk);
    let lab = c.inv("inv", "lab", la);
    let ipb: Vec<NodeId> = (0..8)
        .map(|i| c.inv("inv", &format!("ipb{i}"), ip[i]))
        .collect();

    let vp = c.node("vp", None);
    c.mos("eval", "vp", MosKind::Pmos, clkb, vdd, vp);

    // la_k = LA | IP0 | .. | IPk, la_inter = LA | IP0..IP3
    let mut la_k = Vec::new();
    for k in 0..3 {
        let mut ins = vec![lab];
        ins.extend_from_slice(&ipb[..=k]);
        la_k.push(c.nand("la", &format!("la{k}"), &ins));
    }
    let mut ins = vec![lab];
    ins.extend_from_slice(&ipb[..4]);
    let la_inter = c.nand("la", "LA_inter", &ins);

    for i in 0..4 {
        let enable = if i == 0 { la } else { la_k[i - 1] };
        c.stack("pu", &format!("op{i}_"), MosKind::Pmos, vp, &[enable, ipb[i]], op[i], None);
    }
    for i in 4..8 {
        let mut gates = vec![la_inter];
        gates.extend_from_slice(&ip[4..i]);
        gates.push(ipb[i]);
        c.stack("pu", &format!("op{i}_"), MosKind::Pmos, vp, &gates, op[i], None);
    }
    for i in 0..8 {
        c.mos("pd", &i.to_string(), MosKind::Nmos, clkb, op[i], gnd);
    }
    for i in 0..8 {
        let reset = if i < 4 { la } else { la_inter };
        c.mos("rs", &i.to_string(), MosKind::Nmos, reset, op[i], gnd);
    }

    // la_out = LA_inter | IP4..IP7
    let la_inter_b = c.inv("lao", "LA_inter_b", la_inter);
    let mut ins = vec![la_inter_b];
    ins.extend_from_slice(&ipb[4..]);
    let la_out = c.nand("lao", "la_out", &ins);
    RobustPorts { la_out }
}

/// The race-free, charge-sharing-free 8-bit priority encoder.
pub fn build_robust_pe8() -> Netlist {
    let (mut n, ip, la, op) = frame(8);
    let ports = {
        let mut c = Cells::new(&mut n, "");
        robust_cell(&mut c, &ip, la, &op)
    };
    n.set_lookahead_out(ports.la_out);
    n
}

/// Active-high look-ahead encoder without reset devices.
///
/// Same pre-discharged p-type outputs as the robust cell, but `LA = 1`
/// enables the stage and each output's only NMOS is its pre-discharge
/// device: an output charged while `LA` was still high stays charged until
/// the next pre-discharge phase.
pub fn build_race_prone_pe8() -> Netlist {
    let (mut n, ip, la, op) = frame(8);
    let mut c = Cells::new(&mut n, "");
    let (vdd, gnd, clk) = (c.vdd, c.gnd, c.clk);
    let clkb = c.inv("inv", "clkb", clk);
    let lab = c.inv("inv", "lab", la);
    let ipb: Vec<NodeId> = (0..8)
        .map(|i| c.inv("inv", &format!("ipb{i}"), ip[i]))
        .collect();
    let vp = c.node("vp", None);
    c.mos("eval", "vp", MosKind::Pmos, clkb, vdd, vp);

    // en_k low iff LA = 1 and IP0..IPk = 0
    let mut en = Vec::new();
    for k in 0..4 {
        let mut ins = vec![la];
        ins.extend_from_slice(&ipb[..=k]);
        en.push(c.nand("la", &format!("en{k}"), &ins));
    }
    for i in 0..4 {
        let enable = if i == 0 { lab } else { en[i - 1] };
        c.stack("pu", &format!("op{i}_"), MosKind::Pmos, vp, &[enable, ipb[i]], op[i], None);
    }
    for i in 4..8 {
        let mut gates = vec![en[3]];
        gates.extend_from_slice(&ip[4..i]);
        gates.push(ipb[i]);
        c.stack("pu", &format!("op{i}_"), MosKind::Pmos, vp, &gates, op[i], None);
    }
    for i in 0..8 {
        c.mos("pd", &i.to_string(), MosKind::Nmos, clkb, op[i], gnd);
    }
    n
}

/// n-type domino encoder whose lower-priority half exposes a large stack node.
///
/// Every output is an inverter on a dynamic node precharged high while CLK
/// is low. The upper half uses footed stacks. The lower half is enabled by a
/// domino signal `en_lo` that only rises during evaluation, and it sits in
/// the middle of each stack: the node `x<i>` below it is never precharged.
/// When `IP<i>` grounded `x<i>` in one cycle and is low in the next, the
/// dynamic node shares charge with `x<i>` as soon as `en_lo` rises.
///
/// The gates are clocked from a buffered copy of CLK that lags it by the
/// same delay as the inverted look-ahead signal.
pub fn build_charge_share_prone_pe8() -> Netlist {
    let (mut n, ip, la, op) = frame(8);
    let mut c = Cells::new(&mut n, "");
    let (vdd, gnd) = (c.vdd, c.gnd);
    let clk_b = c.inv("inv", "clk_b", c.clk);
    let clk = c.inv("inv", "clk_d", clk_b);
    let lab = c.inv("inv", "lab", la);
    let ipb: Vec<NodeId> = (0..8)
        .map(|i| c.inv("inv", &format!("ipb{i}"), ip[i]))
        .collect();

    let precharged = |c: &mut Cells, name: &str| {
        let d = c.node(name, Some(CSHARE_DYNAMIC_CAPACITANCE));
        c.mos("pre", name, MosKind::Pmos, clk, vdd, d);
        d
    };

    let mut dyn_nodes = Vec::new();
    for i in 0..4 {
        let d = precharged(&mut c, &format!("d{i}"));
        let mut gates = vec![ip[i]];
        gates.extend_from_slice(&ipb[..i]);
        gates.push(lab);
        gates.push(clk);
        c.stack("pdn", &format!("d{i}_"), MosKind::Nmos, d, &gates, gnd, None);
        dyn_nodes.push(d);
    }

    // en_lo rises during evaluation iff LA = 0 and IP0..IP3 = 0.
    let g = c.node("g_lo", None);
    c.mos("pre", "g_lo", MosKind::Pmos, clk, vdd, g);
    let mut gates = vec![lab];
    gates.extend_from_slice(&ipb[..4]);
    gates.push(clk);
    c.stack("pdn", "g_lo_", MosKind::Nmos, g, &gates, gnd, None);
    let en_lo = c.inv("inv", "en_lo", g);

    for i in 4..8 {
        let d = precharged(&mut c, &format!("d{i}"));
        let x = c.node(&format!("x{i}"), Some(CSHARE_STACK_CAPACITANCE));
        let mut gates = ipb[4..i].to_vec();
        gates.push(en_lo);
        c.stack("pdn", &format!("d{i}_"), MosKind::Nmos, d, &gates, x, None);
        c.mos("pdn", &format!("x{i}"), MosKind::Nmos, ip[i], x, gnd);
        dyn_nodes.push(d);
    }

    for i in 0..8 {
        let y = op[i];
        c.mos("out", &format!("{i}_p"), MosKind::Pmos, dyn_nodes[i], vdd, y);
        c.mos("out", &format!("{i}_n"), MosKind::Nmos, dyn_nodes[i], y, gnd);
    }
    n
}

/// Wide encoder from robust 8-bit cells with parallel look-ahead glue.
///
/// Block `b` receives `LA | any(block 0) | .. | any(block b-1)`, where each
/// `any` is a static OR tree over that block's raw inputs.
pub fn build_cascaded(n_bits: usize) -> Result<Netlist, DesignError> {
    if n_bits == 0 || !n_bits.is_multiple_of(8) {
        return Err(DesignError::InvalidWidth(n_bits));
    }
    let blocks = n_bits / 8;
    let (mut n, ip, la, op) = frame(n_bits);
    let mut block_la = vec![la];
    {
        let mut glue = Cells::new(&mut n, "g/");
        let any: Vec<NodeId> = (0..blocks - 1)
            .map(|b| glue.or_tree("glue", &format!("any{b}"), &ip[8 * b..8 * b + 8]))
            .collect();
        for b in 1..blocks {
            let mut ins = vec![la];
            ins.extend_from_slice(&any[..b]);
            block_la.push(glue.or_tree("glue", &format!("la{b}"), &ins));
        }
    }
    let mut la_out = None;
    for b in 0..blocks {
        let mut c = Cells::new(&mut n, &format!("b{b}/"));
        let ports = robust_cell(&mut c, &ip[8 * b..8 * b + 8], block_la[b], &op[8 * b..8 * b + 8]);
        la_out = Some(ports.la_out);
    }
    n.set_lookahead_out(la_out.expect("at least one block"));
    Ok(n)
}

/// Device counts grouped by role tag (`inv`, `eval`, `la`, `pu`, `pd`, `rs`,
/// `lao`, `glue`, ...).
pub fn device_breakdown(n: &Netlist) -> BTreeMap<String, DeviceCount> {
    let mut out: BTreeMap<String, DeviceCount> = BTreeMap::new();
    for d in n.devices() {
        let e = out.entry(cells::role_of(&d.name).to_string()).or_insert(DeviceCount {
            nmos: 0,
            pmos: 0,
            total: 0,
        });
        match d.kind {
            MosKind::Nmos => e.nmos += 1,
            MosKind::Pmos => e.pmos += 1,
        }
        e.total += 1;
    }
    out
}
