// SPDX-License-Identifier: Apache-2.0

//! Golden functional models of priority encoding.
//!
//! Bit index 0 has the highest priority. Look-ahead inputs are active-low:
//! `la = true` means a higher-priority stage owns the priority and this
//! stage is disabled.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PeVector {
    bits: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BehaviorError {
    #[error("vector width must be at least 1")]
    ZeroWidth,
    #[error("width {0} is not a positive multiple of 8")]
    NotMultipleOf8(usize),
    #[error("expected width {expected}, found {found}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("invalid bit character {0:?}")]
    BadBit(char),
}

impl PeVector {
    pub fn new(bits: Vec<bool>) -> Self {
        PeVector { bits }
    }

    pub fn zeros(width: usize) -> Self {
        PeVector {
            bits: vec![false; width],
        }
    }

    /// Vector whose bit `i` is bit `i` of `value` (LSB = index 0).
    pub fn from_u64(value: u64, width: usize) -> Self {
        assert!(width <= 64);
        PeVector {
            bits: (0..width).map(|i| value >> i & 1 == 1).collect(),
        }
    }

    pub fn to_u64(&self) -> u64 {
        assert!(self.bits.len() <= 64);
        self.bits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (b as u64) << i)
    }

    pub fn one_hot(index: usize, width: usize) -> Self {
        let mut v = Self::zeros(width);
        v.bits[index] = true;
        v
    }

    pub fn width(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn any(&self) -> bool {
        self.bits.iter().any(|&b| b)
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn first_set(&self) -> Option<usize> {
        self.bits.iter().position(|&b| b)
    }

    pub fn slice(&self, start: usize, len: usize) -> PeVector {
        PeVector {
            bits: self.bits[start..start + len].to_vec(),
        }
    }
}

/// Bits written index 0 first, e.g. `"00100100"` has bits 2 and 5 set.
impl fmt::Display for PeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for PeVector {
    type Err = BehaviorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(BehaviorError::BadBit(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if bits.is_empty() {
            return Err(BehaviorError::ZeroWidth);
        }
        Ok(PeVector { bits })
    }
}

impl Serialize for PeVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Pe8Result {
    pub op: PeVector,
    pub la_inter: bool,
    pub la_out: bool,
}

/// Output bit `i` is set iff input bit `i` is set and every higher-priority
/// bit is clear.
pub fn pe_general(ip: &PeVector) -> Result<PeVector, BehaviorError> {
    if ip.width() == 0 {
        return Err(BehaviorError::ZeroWidth);
    }
    let mut token = true;
    let bits = ip
        .bits
        .iter()
        .map(|&b| {
            let out = token && b;
            token &= !b;
            out
        })
        .collect();
    Ok(PeVector { bits })
}

/// 8-bit encoder with three-level look-ahead.
///
/// `la_inter = la | ip0 | ip1 | ip2 | ip3` disables the lower-priority half.
pub fn pe8(ip: &PeVector, la: bool) -> Result<Pe8Result, BehaviorError> {
    if ip.width() != 8 {
        return Err(BehaviorError::WidthMismatch {
            expected: 8,
            found: ip.width(),
        });
    }
    let b = &ip.bits;
    let la_inter = la || b[..4].iter().any(|&x| x);
    let mut op = [false; 8];
    let mut half = |base: usize, disabled: bool| {
        let mut token = !disabled;
        for i in base..base + 4 {
            op[i] = token && b[i];
            token &= !b[i];
        }
    };
    half(0, la);
    half(4, la_inter);
    Ok(Pe8Result {
        op: PeVector::new(op.to_vec()),
        la_inter,
        la_out: la || ip.any(),
    })
}

/// Compose 8-bit cells with parallel look-ahead: block `b` is disabled iff
/// any input bit of blocks `0..b` is set, computed from the raw inputs.
pub fn cascade(ip: &PeVector) -> Result<PeVector, BehaviorError> {
    cascade_with_la(ip, false)
}

pub fn cascade_with_la(ip: &PeVector, la: bool) -> Result<PeVector, BehaviorError> {
    let w = ip.width();
    if w == 0 || !w.is_multiple_of(8) {
        return Err(BehaviorError::NotMultipleOf8(w));
    }
    let blocks = w / 8;
    let any: Vec<bool> = (0..blocks).map(|k| ip.slice(8 * k, 8).any()).collect();
    let mut bits = Vec::with_capacity(w);
    for b in 0..blocks {
        let la_b = la || any[..b].iter().any(|&x| x);
        bits.extend_from_slice(pe8(&ip.slice(8 * b, 8), la_b)?.op.bits());
    }
    Ok(PeVector { bits })
}
