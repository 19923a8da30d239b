// SPDX-License-Identifier: Apache-2.0

//! Deterministic unit-delay switch-level simulation.
//!
//! Time advances in integer ticks. External transitions (inputs and clock
//! edges) land at their scheduled tick; each resolution step computed from
//! the state at tick `t` lands at `t + device_delay`. Steps repeat until a
//! fixpoint, then time jumps to the next external event.

mod resolve;
mod state;
mod stimulus;
mod waveform;

use std::sync::Arc;

use serde::Serialize;

use crate::netlist::{Netlist, NodeId, NodeKind, StructuralViolation, ValidationRules};

pub use resolve::{initial_states, resolve, Resolution};
pub use state::{Logic, NodeState, Strength, Thresholds};
pub use stimulus::{Stimulus, StimulusParseError};
pub use waveform::{
    Activity, NodeActivity, NodeTable, RailShortEvent, TransitionCount, Waveform,
};

use resolve::{Circuit, Resolver};

/// Tick count; one tick is one nominal device delay.
pub type SimTime = u64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub device_delay: SimTime,
    pub thresholds: Thresholds,
    pub max_settle_iterations: u32,
    /// Sampling happens this many ticks before a falling clock edge.
    pub sample_offset: SimTime,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            device_delay: 1,
            thresholds: Thresholds::default(),
            max_settle_iterations: 1000,
            sample_offset: 1,
        }
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum SimError {
    #[error("netlist has structural violations: {}", join(.0))]
    InvalidNetlist(Vec<StructuralViolation>),
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("invalid stimulus: {0}")]
    BadStimulus(String),
    #[error("no fixpoint after {iterations} settle iterations at tick {time}; oscillating nodes: {}", .nodes.join(", "))]
    OscillationDetected {
        time: SimTime,
        iterations: u32,
        nodes: Vec<String>,
    },
    #[error("tick {time} outside waveform of duration {duration}")]
    TimeOutOfRange { time: SimTime, duration: SimTime },
}

fn join(v: &[StructuralViolation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

/// A netlist prepared for repeated simulation.
///
/// `run` takes `&self`, so one simulator can serve many concurrent runs.
#[derive(Debug, Clone)]
pub struct Simulator {
    circuit: Circuit,
    table: Arc<NodeTable>,
    config: SimConfig,
    clock: NodeId,
}

impl Simulator {
    pub fn new(netlist: &Netlist, config: SimConfig) -> Result<Self, SimError> {
        if !config.thresholds.is_valid() {
            return Err(SimError::BadConfig(
                "thresholds must satisfy 0 < low < high < 1".into(),
            ));
        }
        if config.device_delay == 0 {
            return Err(SimError::BadConfig("device_delay must be positive".into()));
        }
        let violations = netlist.validate(ValidationRules::BASIC);
        if !violations.is_empty() {
            return Err(SimError::InvalidNetlist(violations));
        }
        Ok(Simulator {
            circuit: Circuit::new(netlist),
            table: Arc::new(NodeTable::new(netlist)),
            config,
            clock: netlist.rail(NodeKind::Clock).expect("validated"),
        })
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn node_table(&self) -> &Arc<NodeTable> {
        &self.table
    }

    fn node_index(&self, name: &str) -> Result<u32, SimError> {
        let i = self
            .table
            .names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| SimError::BadStimulus(format!("unknown node {name}")))?;
        if self.table.kinds[i] != NodeKind::Input {
            return Err(SimError::BadStimulus(format!(
                "node {name} is not an input or look-ahead node"
            )));
        }
        Ok(i as u32)
    }

    /// External events sorted by time: `(tick, node, value)`.
    fn events(&self, stim: &Stimulus) -> Result<Vec<(SimTime, u32, bool)>, SimError> {
        if stim.clock_period < 2 {
            return Err(SimError::BadStimulus("clock period must be at least 2".into()));
        }
        if stim.duration < stim.clock_period {
            return Err(SimError::BadStimulus(
                "duration must cover at least one clock period".into(),
            ));
        }
        let mut ev = Vec::new();
        for (name, list) in &stim.input_schedule {
            let id = self.node_index(name)?;
            if list.windows(2).any(|w| w[0].0 >= w[1].0) {
                return Err(SimError::BadStimulus(format!(
                    "transitions for {name} must be strictly time-ascending"
                )));
            }
            ev.extend(list.iter().map(|&(t, v)| (t, id, v)));
        }
        let clk = self.clock.0;
        ev.extend(stim.clock_edges().into_iter().map(|(t, v)| (t, clk, v)));
        ev.sort_by_key(|&(t, id, _)| (t, id));
        Ok(ev)
    }

    pub fn run(&self, stim: &Stimulus) -> Result<Waveform, SimError> {
        let events = self.events(stim)?;
        let c = &self.circuit;
        let th = self.config.thresholds;
        let n = c.len();

        let mut state: Vec<NodeState> = (0..n)
            .map(|i| match self.table.kinds[i] {
                NodeKind::Vdd => NodeState::DRIVEN_HIGH,
                NodeKind::Gnd => NodeState::DRIVEN_LOW,
                NodeKind::Clock => NodeState::driven(stim.clock_level(0)),
                NodeKind::Input => NodeState::DRIVEN_LOW,
                NodeKind::Output | NodeKind::Internal => NodeState::STORED_LOW,
            })
            .collect();
        let mut ei = 0;
        while ei < events.len() && events[ei].0 == 0 {
            state[events[ei].1 as usize] = NodeState::driven(events[ei].2);
            ei += 1;
        }
        let mut changes: Vec<Vec<(SimTime, NodeState)>> =
            state.iter().map(|&s| vec![(0, s)]).collect();
        let mut rail_shorts = Vec::new();

        let mut resolver = Resolver::new(c);
        let mut next = state.clone();
        let mut shorted = Vec::new();
        let mut pending: Vec<u32> = Vec::new();
        let mut pending_at: Option<SimTime> = None;
        let mut dirty = true;
        let mut iterations = 0u32;
        let mut t: SimTime = 0;

        loop {
            if dirty && pending_at.is_none() {
                shorted.clear();
                resolver.step(c, &th, &state, &mut next, &mut shorted);
                pending.clear();
                pending.extend((0..n as u32).filter(|&i| next[i as usize] != state[i as usize]));
                dirty = false;
                if pending.is_empty() {
                    iterations = 0;
                } else {
                    iterations += 1;
                    if iterations > self.config.max_settle_iterations {
                        return Err(SimError::OscillationDetected {
                            time: t,
                            iterations: iterations - 1,
                            nodes: pending
                                .iter()
                                .map(|&i| self.table.names[i as usize].clone())
                                .collect(),
                        });
                    }
                    pending_at = Some(t + self.config.device_delay);
                }
            }
            let next_event = events.get(ei).map(|e| e.0);
            let next_t = match (pending_at, next_event) {
                (Some(a), Some(b)) => a.min(b),
                (Some(a), None) => a,
                (None, Some(b)) => b,
                (None, None) => break,
            };
            if next_t > stim.duration {
                break;
            }
            t = next_t;
            if pending_at == Some(t) {
                for &i in &pending {
                    let i = i as usize;
                    state[i] = next[i];
                    changes[i].push((t, state[i]));
                }
                if !shorted.is_empty() {
                    rail_shorts.push(RailShortEvent {
                        time: t,
                        nodes: shorted.iter().map(|&i| NodeId(i)).collect(),
                    });
                }
                pending_at = None;
                dirty = true;
            }
            while ei < events.len() && events[ei].0 == t {
                let (_, id, v) = events[ei];
                let s = NodeState::driven(v);
                if state[id as usize] != s {
                    state[id as usize] = s;
                    changes[id as usize].push((t, s));
                    dirty = true;
                }
                ei += 1;
            }
        }

        Ok(Waveform {
            nodes: self.table.clone(),
            changes,
            duration: stim.duration,
            rail_shorts,
            thresholds: th,
        })
    }
}

/// Simulate `netlist` under `stimulus`.
pub fn simulate(
    netlist: &Netlist,
    stimulus: &Stimulus,
    config: &SimConfig,
) -> Result<Waveform, SimError> {
    Simulator::new(netlist, *config)?.run(stimulus)
}

/// State of every node at `time`.
pub fn sample(waveform: &Waveform, time: SimTime) -> Result<Vec<NodeState>, SimError> {
    waveform.sample(time)
}

pub fn switching_activity(waveform: &Waveform) -> Activity {
    waveform.switching_activity()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_netlist;

    const INVERTER: &str = "NODE vdd vdd\nNODE gnd gnd\nNODE clk clock\nNODE a input\n\
                            NODE y output 1\nMOS mp PMOS a vdd y\nMOS mn NMOS a y gnd\n";

    fn inverter() -> Netlist {
        parse_netlist(INVERTER).unwrap()
    }

    fn step_stimulus() -> Stimulus {
        let mut s = Stimulus::new(10, false, 20);
        s.at(5, "a", true);
        s
    }

    #[test]
    fn inverter_step() {
        let n = inverter();
        let w = simulate(&n, &step_stimulus(), &SimConfig::default()).unwrap();
        let y = n.node_id("y").unwrap();
        assert_eq!(
            w.changes(y),
            &[
                (0, NodeState::STORED_LOW),
                (1, NodeState::DRIVEN_HIGH),
                (6, NodeState::DRIVEN_LOW)
            ]
        );
    }

    #[test]
    fn device_delay_scales_response() {
        let n = inverter();
        let cfg = SimConfig {
            device_delay: 3,
            ..SimConfig::default()
        };
        let w = simulate(&n, &step_stimulus(), &cfg).unwrap();
        let y = n.node_id("y").unwrap();
        assert_eq!(w.changes(y).last().unwrap().0, 8);
    }

    #[test]
    fn sample_at_zero_is_initial() {
        let n = inverter();
        let w = simulate(&n, &step_stimulus(), &SimConfig::default()).unwrap();
        let s = sample(&w, 0).unwrap();
        assert_eq!(s[n.node_id("y").unwrap().index()], NodeState::STORED_LOW);
        assert_eq!(s, initial_states(&n, |_| false));
        assert_eq!(sample(&w, 20).unwrap(), w.final_states());
        assert_eq!(
            sample(&w, 21),
            Err(SimError::TimeOutOfRange {
                time: 21,
                duration: 20
            })
        );
    }

    #[test]
    fn activity_of_toggled_inverter() {
        let n = inverter();
        let w = simulate(&n, &step_stimulus(), &SimConfig::default()).unwrap();
        let act = switching_activity(&w);
        let y = act.per_node.iter().find(|a| a.node == "y").unwrap();
        // 0 -> 1 at power-up, then 1 -> 0 when the input rises.
        assert_eq!(y.transitions.rising, 1);
        assert_eq!(y.transitions.falling, 1);
        let a = act.per_node.iter().find(|a| a.node == "a").unwrap();
        assert_eq!(a.transitions.rising, 1);
        let in_window = w.transitions(n.node_id("y").unwrap(), 5, 20);
        assert_eq!(in_window, TransitionCount { rising: 0, falling: 1, x: 0 });
    }

    #[test]
    fn quiet_waveform_has_zero_activity() {
        let n = parse_netlist("NODE vdd vdd\nNODE gnd gnd\nNODE clk clock\nNODE q internal\n")
            .unwrap();
        let w = simulate(&n, &Stimulus::new(10, false, 10), &SimConfig::default()).unwrap();
        let act = w.switching_activity();
        // Only the clock toggles; its default weight is 1 per transition.
        assert_eq!(act.weighted, 2.0);
        assert_eq!(act.per_node[3].transitions, TransitionCount::default());
    }

    #[test]
    fn ring_oscillator_is_reported() {
        let n = parse_netlist(
            "NODE vdd vdd\nNODE gnd gnd\nNODE clk clock\n\
             NODE a internal\nNODE b internal\nNODE c internal\n\
             MOS p1 PMOS a vdd b\nMOS n1 NMOS a b gnd\n\
             MOS p2 PMOS b vdd c\nMOS n2 NMOS b c gnd\n\
             MOS p3 PMOS c vdd a\nMOS n3 NMOS c a gnd\n",
        )
        .unwrap();
        let err = simulate(&n, &Stimulus::new(10, false, 5000), &SimConfig::default()).unwrap_err();
        match err {
            SimError::OscillationDetected { iterations, nodes, .. } => {
                assert_eq!(iterations, 1000);
                assert!(!nodes.is_empty());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stimulus_errors() {
        let n = inverter();
        let sim = Simulator::new(&n, SimConfig::default()).unwrap();
        let mut s = Stimulus::new(10, false, 20);
        s.at(1, "y", true);
        assert!(matches!(sim.run(&s), Err(SimError::BadStimulus(_))));
        let mut s = Stimulus::new(10, false, 20);
        s.at(1, "nope", true);
        assert!(matches!(sim.run(&s), Err(SimError::BadStimulus(_))));
        let mut s = Stimulus::new(10, false, 20);
        s.at(4, "a", true).at(2, "a", false);
        assert!(matches!(sim.run(&s), Err(SimError::BadStimulus(_))));
        assert!(matches!(
            sim.run(&Stimulus::new(10, false, 5)),
            Err(SimError::BadStimulus(_))
        ));
    }

    #[test]
    fn invalid_netlist_or_config_rejected() {
        let n = parse_netlist("NODE a input").unwrap();
        assert!(matches!(
            Simulator::new(&n, SimConfig::default()),
            Err(SimError::InvalidNetlist(_))
        ));
        let cfg = SimConfig {
            thresholds: Thresholds { low: 0.7, high: 0.6 },
            ..SimConfig::default()
        };
        assert!(matches!(
            Simulator::new(&inverter(), cfg),
            Err(SimError::BadConfig(_))
        ));
    }

    #[test]
    fn vcd_has_one_output_transition_after_step() {
        let n = inverter();
        let w = simulate(&n, &step_stimulus(), &SimConfig::default()).unwrap();
        let mut buf = Vec::new();
        w.write_vcd(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("$timescale 1 ps $end"));
        assert!(text.contains("$var wire 1"));
        assert!(text.contains("#6"));
    }
}
