// SPDX-License-Identifier: Apache-2.0

//! Line-oriented netlist text format.
//!
//! ```text
//! NODE <name> <vdd|gnd|clock|input|output|internal> [<capacitance>]
//! MOS <name> <NMOS|PMOS> <gate> <source> <drain>
//! LAIN <name>
//! LAOUT <name>
//! ```
//!
//! `#` starts a comment. Input declaration order is priority order.

use std::fmt::Write as _;

use super::{MosKind, Netlist, NetlistError, NodeKind};

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("line {line}: {reason}")]
pub struct ParseError {
    pub line: usize,
    pub reason: String,
}

const RESERVED: [(&str, NodeKind); 3] = [
    ("VDD", NodeKind::Vdd),
    ("GND", NodeKind::Gnd),
    ("CLK", NodeKind::Clock),
];

pub fn parse_netlist(text: &str) -> Result<Netlist, ParseError> {
    let mut n = Netlist::new();
    // LAIN/LAOUT may name nodes declared further down.
    let mut lain = None;
    let mut laout = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |reason: String| ParseError { line, reason };
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        let Some(&head) = toks.first() else { continue };
        match head {
            "NODE" => {
                if !(3..=4).contains(&toks.len()) {
                    return Err(err(format!(
                        "NODE expects 2 or 3 arguments, found {}",
                        toks.len() - 1
                    )));
                }
                let name = toks[1];
                let kind = NodeKind::from_keyword(toks[2])
                    .ok_or_else(|| err(format!("unknown node kind {}", toks[2])))?;
                if let Some((_, k)) = RESERVED.iter().find(|(r, _)| *r == name) {
                    if *k != kind {
                        return Err(err(format!(
                            "reserved name {name} must be a {} node",
                            k.keyword()
                        )));
                    }
                }
                let cap = match toks.get(3) {
                    Some(c) => Some(
                        c.parse::<f64>()
                            .map_err(|_| err(format!("bad capacitance {c}")))?,
                    ),
                    None => None,
                };
                n.add_node(name, kind, cap).map_err(|e| err(e.to_string()))?;
            }
            "MOS" => {
                if toks.len() != 6 {
                    return Err(err(format!(
                        "MOS expects 5 arguments, found {}",
                        toks.len() - 1
                    )));
                }
                let kind = match toks[2] {
                    "NMOS" => MosKind::Nmos,
                    "PMOS" => MosKind::Pmos,
                    other => return Err(err(format!("unknown device kind {other}"))),
                };
                n.add_device_by_name(toks[1], kind, toks[3], toks[4], toks[5])
                    .map_err(|e| err(e.to_string()))?;
            }
            "LAIN" | "LAOUT" => {
                if toks.len() != 2 {
                    return Err(err(format!("{head} expects 1 argument")));
                }
                let slot = if head == "LAIN" { &mut lain } else { &mut laout };
                if slot.is_some() {
                    return Err(err(format!("duplicate {head}")));
                }
                *slot = Some((line, toks[1].to_string()));
            }
            other => return Err(err(format!("unknown directive {other}"))),
        }
    }
    if let Some((line, name)) = lain {
        let id = n.node_id(&name).ok_or_else(|| ParseError {
            line,
            reason: NetlistError::UndeclaredNode(name.clone()).to_string(),
        })?;
        n.set_lookahead_in(id).map_err(|e| ParseError {
            line,
            reason: e.to_string(),
        })?;
    }
    if let Some((line, name)) = laout {
        let id = n.node_id(&name).ok_or_else(|| ParseError {
            line,
            reason: NetlistError::UndeclaredNode(name.clone()).to_string(),
        })?;
        n.set_lookahead_out(id);
    }
    Ok(n)
}

/// Render a netlist in the text format. Capacitances are always written, so
/// parsing the result reproduces the netlist exactly.
pub fn serialize_netlist(n: &Netlist) -> String {
    let mut s = String::new();
    for node in n.nodes() {
        let _ = writeln!(
            s,
            "NODE {} {} {}",
            node.name,
            node.kind.keyword(),
            node.capacitance
        );
    }
    for d in n.devices() {
        let _ = writeln!(
            s,
            "MOS {} {} {} {} {}",
            d.name,
            d.kind.keyword(),
            n.node_name(d.gate),
            n.node_name(d.source),
            n.node_name(d.drain)
        );
    }
    if let Some(la) = n.lookahead_in() {
        let _ = writeln!(s, "LAIN {}", n.node_name(la));
    }
    if let Some(la) = n.lookahead_out() {
        let _ = writeln!(s, "LAOUT {}", n.node_name(la));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str =
        "NODE VDD vdd\nNODE GND gnd\nNODE CLK clock\nNODE a input\nNODE y output 10\nMOS m1 NMOS a y GND";

    #[test]
    fn parses_small_netlist() {
        let n = parse_netlist(SMALL).unwrap();
        assert_eq!(n.nodes().len(), 5);
        assert_eq!(n.devices().len(), 1);
        assert_eq!(n.node(n.node_id("y").unwrap()).capacitance, 10.0);
    }

    #[test]
    fn undeclared_node() {
        let e = parse_netlist("MOS m1 NMOS a y GND").unwrap_err();
        assert_eq!(e.line, 1);
        assert_eq!(e.reason, "undeclared node a");
    }

    #[test]
    fn default_capacitances() {
        let n = parse_netlist("NODE o output\nNODE i internal\n").unwrap();
        assert_eq!(n.nodes()[0].capacitance, 10.0);
        assert_eq!(n.nodes()[1].capacitance, 1.0);
    }

    #[test]
    fn comments_and_blank_lines() {
        let n = parse_netlist("# header\n\nNODE a input # trailing\n   \n").unwrap();
        assert_eq!(n.nodes().len(), 1);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let cases = [
            ("NODE a input\nNODE a internal", 2, "duplicate node a"),
            ("NODE v vdd\nNODE w vdd", 2, "multiple vdd declarations"),
            ("NODE a wire", 1, "unknown node kind wire"),
            ("NODE a internal x", 1, "bad capacitance x"),
            ("NODE a internal -1", 1, "capacitance of node a must be positive and finite"),
            ("NODE a input\nMOS m JFET a a a", 2, "unknown device kind JFET"),
            ("NODE a input\nMOS m NMOS a a", 2, "MOS expects 5 arguments, found 4"),
            ("WIRE x", 1, "unknown directive WIRE"),
            ("NODE GND input", 1, "reserved name GND must be a gnd node"),
            ("NODE o output\nLAIN o", 2, "node o is not an input node"),
            ("LAIN q", 1, "undeclared node q"),
            (
                "NODE a input\nNODE b input\nMOS m NMOS a b b\nMOS m NMOS a a b",
                4,
                "duplicate device m",
            ),
        ];
        for (text, line, reason) in cases {
            let e = parse_netlist(text).unwrap_err();
            assert_eq!((e.line, e.reason.as_str()), (line, reason), "{text}");
        }
    }

    #[test]
    fn lookahead_directives_may_precede_nodes() {
        let n = parse_netlist("LAIN la\nLAOUT lo\nNODE la input\nNODE x input\nNODE lo internal")
            .unwrap();
        assert_eq!(n.lookahead_in(), n.node_id("la"));
        assert_eq!(n.lookahead_out(), n.node_id("lo"));
        assert_eq!(n.inputs(), vec![n.node_id("x").unwrap()]);
    }

    #[test]
    fn round_trip_keeps_fractional_capacitance() {
        let n = parse_netlist("NODE a internal 0.1\nNODE b output 16.25\n").unwrap();
        assert_eq!(parse_netlist(&serialize_netlist(&n)).unwrap(), n);
    }
}
