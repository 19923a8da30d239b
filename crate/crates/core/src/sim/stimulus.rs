// SPDX-License-Identifier: Apache-2.0

//! Clock definition plus scheduled input transitions.
//!
//! Text form:
//!
//! ```text
//! CLOCK <period> <high_first 0|1>
//! AT <tick> <node> <0|1>
//! RUN <duration>
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::SimTime;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stimulus {
    pub clock_period: SimTime,
    pub clock_high_first: bool,
    /// Per-node transitions, strictly time-ascending. A node with no
    /// transition at tick 0 starts low.
    pub input_schedule: BTreeMap<String, Vec<(SimTime, bool)>>,
    pub duration: SimTime,
}

impl Stimulus {
    pub fn new(clock_period: SimTime, clock_high_first: bool, duration: SimTime) -> Self {
        Stimulus {
            clock_period,
            clock_high_first,
            input_schedule: BTreeMap::new(),
            duration,
        }
    }

    /// Schedule a transition; transitions for a node must be added in
    /// ascending time order (checked when the stimulus is run).
    pub fn at(&mut self, time: SimTime, node: &str, value: bool) -> &mut Self {
        self.input_schedule
            .entry(node.to_string())
            .or_default()
            .push((time, value));
        self
    }

    /// Clock level at tick `t`.
    pub fn clock_level(&self, t: SimTime) -> bool {
        let high_len = self.clock_period / 2;
        let low_len = self.clock_period - high_len;
        let phase = t % self.clock_period;
        if self.clock_high_first {
            phase < high_len
        } else {
            phase >= low_len
        }
    }

    /// Clock edges in `(0, duration]` as `(time, new level)`.
    pub fn clock_edges(&self) -> Vec<(SimTime, bool)> {
        let half = self.clock_period / 2;
        let first = self.clock_period - half;
        let (a, b) = if self.clock_high_first {
            (half, self.clock_period)
        } else {
            (first, self.clock_period)
        };
        let mut edges = Vec::new();
        let mut base = 0;
        while base <= self.duration {
            for off in [a, b] {
                let t = base + off;
                if t > 0 && t <= self.duration {
                    edges.push((t, self.clock_level(t)));
                }
            }
            base += self.clock_period;
        }
        edges
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "CLOCK {} {}",
            self.clock_period, self.clock_high_first as u8
        );
        let mut events: Vec<(SimTime, &str, bool)> = self
            .input_schedule
            .iter()
            .flat_map(|(n, v)| v.iter().map(move |&(t, b)| (t, n.as_str(), b)))
            .collect();
        events.sort_by(|x, y| x.0.cmp(&y.0).then(x.1.cmp(y.1)));
        for (t, n, b) in events {
            let _ = writeln!(s, "AT {t} {n} {}", b as u8);
        }
        let _ = writeln!(s, "RUN {}", self.duration);
        s
    }

    pub fn parse(text: &str) -> Result<Stimulus, StimulusParseError> {
        let mut clock = None;
        let mut duration = None;
        let mut schedule: BTreeMap<String, Vec<(SimTime, bool)>> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |reason: String| StimulusParseError { line, reason };
            let toks: Vec<&str> = raw
                .split('#')
                .next()
                .unwrap_or("")
                .split_whitespace()
                .collect();
            let Some(&head) = toks.first() else { continue };
            let num = |s: &str| {
                s.parse::<SimTime>()
                    .map_err(|_| err(format!("bad tick count {s}")))
            };
            let bit = |s: &str| match s {
                "0" => Ok(false),
                "1" => Ok(true),
                _ => Err(err(format!("expected 0 or 1, found {s}"))),
            };
            match (head, toks.len()) {
                ("CLOCK", 3) => {
                    if clock.is_some() {
                        return Err(err("duplicate CLOCK".into()));
                    }
                    clock = Some((num(toks[1])?, bit(toks[2])?));
                }
                ("AT", 4) => {
                    let t = num(toks[1])?;
                    let v = bit(toks[3])?;
                    let list = schedule.entry(toks[2].to_string()).or_default();
                    if list.last().is_some_and(|&(p, _)| p >= t) {
                        return Err(err(format!(
                            "transitions for {} must be strictly time-ascending",
                            toks[2]
                        )));
                    }
                    list.push((t, v));
                }
                ("RUN", 2) => {
                    if duration.is_some() {
                        return Err(err("duplicate RUN".into()));
                    }
                    duration = Some(num(toks[1])?);
                }
                ("CLOCK" | "AT" | "RUN", _) => {
                    return Err(err(format!("wrong argument count for {head}")))
                }
                _ => return Err(err(format!("unknown directive {head}"))),
            }
        }
        let eof = text.lines().count().max(1);
        let (clock_period, clock_high_first) = clock.ok_or(StimulusParseError {
            line: eof,
            reason: "missing CLOCK".into(),
        })?;
        let duration = duration.ok_or(StimulusParseError {
            line: eof,
            reason: "missing RUN".into(),
        })?;
        Ok(Stimulus {
            clock_period,
            clock_high_first,
            input_schedule: schedule,
            duration,
        })
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("line {line}: {reason}")]
pub struct StimulusParseError {
    pub line: usize,
    pub reason: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clock_low_first() {
        let s = Stimulus::new(10, false, 20);
        let levels: Vec<bool> = (0..10).map(|t| s.clock_level(t)).collect();
        assert_eq!(
            levels,
            [false, false, false, false, false, true, true, true, true, true]
        );
        assert_eq!(
            s.clock_edges(),
            vec![(5, true), (10, false), (15, true), (20, false)]
        );
    }

    #[test]
    fn clock_high_first() {
        let s = Stimulus::new(4, true, 8);
        assert!(s.clock_level(0));
        assert_eq!(
            s.clock_edges(),
            vec![(2, false), (4, true), (6, false), (8, true)]
        );
    }

    #[test]
    fn text_round_trip() {
        let mut s = Stimulus::new(100, false, 200);
        s.at(0, "a", true).at(50, "a", false).at(3, "la", true);
        let back = Stimulus::parse(&s.to_text()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn parse_errors() {
        let cases = [
            ("CLOCK 10 0\nAT 5 a 1\nAT 5 a 0\nRUN 10", 3, "transitions for a must be strictly time-ascending"),
            ("CLOCK 10 2\nRUN 10", 1, "expected 0 or 1, found 2"),
            ("CLOCK 10 0", 1, "missing RUN"),
            ("RUN 10", 1, "missing CLOCK"),
            ("CLOCK 10 0\nAT x a 1\nRUN 1", 2, "bad tick count x"),
            ("CLOCK 10 0\nWAIT 3", 2, "unknown directive WAIT"),
            ("CLOCK 10\nRUN 3", 1, "wrong argument count for CLOCK"),
        ];
        for (text, line, reason) in cases {
            let e = Stimulus::parse(text).unwrap_err();
            assert_eq!((e.line, e.reason.as_str()), (line, reason), "{text}");
        }
    }
}
