// SPDX-License-Identifier: Apache-2.0

//! Static CMOS and dynamic cell builders used by the encoder constructors.
//!
//! Device names are `<prefix><role>_<detail>`; the role tag drives the
//! device-count breakdown.

use crate::netlist::{MosKind, Netlist, NodeId, NodeKind};

pub(crate) struct Cells<'a> {
    pub n: &'a mut Netlist,
    pub prefix: String,
    pub vdd: NodeId,
    pub gnd: NodeId,
    pub clk: NodeId,
    seq: usize,
}

impl<'a> Cells<'a> {
    pub fn new(n: &'a mut Netlist, prefix: &str) -> Self {
        let vdd = n.rail(NodeKind::Vdd).expect("vdd declared");
        let gnd = n.rail(NodeKind::Gnd).expect("gnd declared");
        let clk = n.rail(NodeKind::Clock).expect("clock declared");
        Cells {
            n,
            prefix: prefix.to_string(),
            vdd,
            gnd,
            clk,
            seq: 0,
        }
    }

    pub fn node(&mut self, name: &str, cap: Option<f64>) -> NodeId {
        let full = format!("{}{}", self.prefix, name);
        self.n
            .add_node(&full, NodeKind::Internal, cap)
            .unwrap_or_else(|e| panic!("constructor bug: {e}"))
    }

    /// Fresh internal node for stack interiors.
    pub fn tmp(&mut self, stem: &str, cap: Option<f64>) -> NodeId {
        self.seq += 1;
        let name = format!("{stem}.{}", self.seq);
        self.node(&name, cap)
    }

    pub fn mos(&mut self, role: &str, detail: &str, kind: MosKind, g: NodeId, s: NodeId, d: NodeId) {
        let name = format!("{}{}_{}", self.prefix, role, detail);
        self.n
            .add_device(&name, kind, g, s, d)
            .unwrap_or_else(|e| panic!("constructor bug: {e}"));
    }

    /// Series chain of devices from `top` to `bottom`, gates in order.
    pub fn stack(
        &mut self,
        role: &str,
        detail: &str,
        kind: MosKind,
        top: NodeId,
        gates: &[NodeId],
        bottom: NodeId,
        interior_cap: Option<f64>,
    ) {
        let mut upper = top;
        for (k, &g) in gates.iter().enumerate() {
            let lower = if k + 1 == gates.len() {
                bottom
            } else {
                self.tmp(&format!("{detail}_s"), interior_cap)
            };
            self.mos(role, &format!("{detail}{k}"), kind, g, upper, lower);
            upper = lower;
        }
    }

    pub fn inv(&mut self, role: &str, out: &str, input: NodeId) -> NodeId {
        let y = self.node(out, None);
        self.mos(role, &format!("{out}_p"), MosKind::Pmos, input, self.vdd, y);
        self.mos(role, &format!("{out}_n"), MosKind::Nmos, input, y, self.gnd);
        y
    }

    /// Parallel PMOS pull-up, series NMOS pull-down.
    pub fn nand(&mut self, role: &str, out: &str, inputs: &[NodeId]) -> NodeId {
        let y = self.node(out, None);
        for (k, &a) in inputs.iter().enumerate() {
            self.mos(role, &format!("{out}_p{k}"), MosKind::Pmos, a, self.vdd, y);
        }
        let gnd = self.gnd;
        self.stack(role, &format!("{out}_n"), MosKind::Nmos, y, inputs, gnd, None);
        y
    }

    /// Series PMOS pull-up, parallel NMOS pull-down.
    pub fn nor(&mut self, role: &str, out: &str, inputs: &[NodeId]) -> NodeId {
        let y = self.node(out, None);
        let vdd = self.vdd;
        self.stack(role, &format!("{out}_p"), MosKind::Pmos, vdd, inputs, y, None);
        for (k, &a) in inputs.iter().enumerate() {
            self.mos(role, &format!("{out}_n{k}"), MosKind::Nmos, a, y, self.gnd);
        }
        y
    }

    /// Static OR of any number of signals: NOR4 leaves combined by NANDs.
    pub fn or_tree(&mut self, role: &str, out: &str, inputs: &[NodeId]) -> NodeId {
        assert!(!inputs.is_empty());
        if inputs.len() == 1 {
            return inputs[0];
        }
        if inputs.len() <= 4 {
            let nor = self.nor(role, &format!("{out}_nor"), inputs);
            return self.inv(role, out, nor);
        }
        if inputs.len() <= 16 {
            let nors: Vec<NodeId> = inputs
                .chunks(4)
                .enumerate()
                .map(|(k, c)| match c {
                    [single] => self.inv(role, &format!("{out}_nor{k}"), *single),
                    _ => self.nor(role, &format!("{out}_nor{k}"), c),
                })
                .collect();
            return self.nand(role, out, &nors);
        }
        let parts: Vec<NodeId> = inputs
            .chunks(16)
            .enumerate()
            .map(|(k, c)| self.or_tree(role, &format!("{out}_part{k}"), c))
            .collect();
        self.or_tree(role, out, &parts)
    }
}

/// Role tag of a device name built by [`Cells`].
pub(crate) fn role_of(device_name: &str) -> &str {
    let local = device_name.rsplit('/').next().unwrap_or(device_name);
    local.split('_').next().unwrap_or(local)
}
