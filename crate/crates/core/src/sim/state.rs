// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Logic {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "x")]
    X,
}

impl Logic {
    pub fn from_bit(b: bool) -> Self {
        if b {
            Logic::One
        } else {
            Logic::Zero
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Logic::Zero => '0',
            Logic::One => '1',
            Logic::X => 'x',
        }
    }

    pub fn is_known(self) -> bool {
        self != Logic::X
    }
}

impl fmt::Display for Logic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strength {
    Driven,
    Stored,
}

/// Voltage thresholds separating logic 0, X and logic 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub low: f64,
    pub high: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            low: 0.4,
            high: 0.6,
        }
    }
}

impl Thresholds {
    pub fn is_valid(&self) -> bool {
        0.0 < self.low && self.low < self.high && self.high < 1.0
    }

    #[inline]
    pub fn logic(&self, v: f64) -> Logic {
        if v >= self.high {
            Logic::One
        } else if v <= self.low {
            Logic::Zero
        } else {
            Logic::X
        }
    }
}

/// Normalized node voltage plus drive strength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodeState {
    pub voltage: f64,
    pub strength: Strength,
}

impl NodeState {
    pub const DRIVEN_LOW: NodeState = NodeState {
        voltage: 0.0,
        strength: Strength::Driven,
    };
    pub const DRIVEN_HIGH: NodeState = NodeState {
        voltage: 1.0,
        strength: Strength::Driven,
    };
    pub const STORED_LOW: NodeState = NodeState {
        voltage: 0.0,
        strength: Strength::Stored,
    };
    /// Unknown value: mid-rail, stored.
    pub const UNKNOWN: NodeState = NodeState {
        voltage: 0.5,
        strength: Strength::Stored,
    };

    pub fn driven(bit: bool) -> Self {
        if bit {
            Self::DRIVEN_HIGH
        } else {
            Self::DRIVEN_LOW
        }
    }

    pub fn stored(voltage: f64) -> Self {
        NodeState {
            voltage: voltage.clamp(0.0, 1.0),
            strength: Strength::Stored,
        }
    }

    /// Logic value under the default thresholds.
    pub fn logic(&self) -> Logic {
        Thresholds::default().logic(self.voltage)
    }

    pub fn logic_with(&self, t: &Thresholds) -> Logic {
        t.logic(self.voltage)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_grid_is_monotone() {
        let t = Thresholds::default();
        for i in 0..=1000 {
            let v = i as f64 / 1000.0;
            let want = if v <= 0.4 {
                Logic::Zero
            } else if v >= 0.6 {
                Logic::One
            } else {
                Logic::X
            };
            assert_eq!(t.logic(v), want, "v={v}");
        }
    }

    #[test]
    fn stored_clamps() {
        assert_eq!(NodeState::stored(1.2).voltage, 1.0);
        assert_eq!(NodeState::stored(-0.1).voltage, 0.0);
    }

    #[test]
    fn threshold_validity() {
        assert!(Thresholds::default().is_valid());
        assert!(!Thresholds { low: 0.6, high: 0.4 }.is_valid());
        assert!(!Thresholds { low: 0.0, high: 0.5 }.is_valid());
    }
}
