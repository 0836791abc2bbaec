//! Slicing strategies as bit strings over the free-decision space.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SliceSet;
use crate::space::DecisionSpace;

/// One accept/decline bit per entry of a [`DecisionSpace`]. Bit `k` is the
/// decision at entry `k`; pairs outside the space always decline.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StrategyCode {
    bits: Vec<bool>,
    fingerprint: u64,
}

impl StrategyCode {
    pub fn from_bits(dspace: &DecisionSpace, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != dspace.len() {
            return Err(Error::Dimension {
                what: "strategy code length vs. decision space",
                expected: dspace.len(),
                actual: bits.len(),
            });
        }
        Ok(StrategyCode {
            bits,
            fingerprint: dspace.fingerprint(),
        })
    }

    pub fn filled(dspace: &DecisionSpace, accept: bool) -> Self {
        StrategyCode {
            bits: vec![accept; dspace.len()],
            fingerprint: dspace.fingerprint(),
        }
    }

    /// The `value`-th code in ascending binary order; entry 0 is the most
    /// significant bit. Requires `|D| <= 64`.
    pub fn from_index(dspace: &DecisionSpace, value: u64) -> Self {
        let len = dspace.len();
        debug_assert!(len <= 64);
        let bits = (0..len)
            .map(|k| (value >> (len - 1 - k)) & 1 == 1)
            .collect();
        StrategyCode {
            bits,
            fingerprint: dspace.fingerprint(),
        }
    }

    /// Uniformly random code.
    pub fn random<R: Rng + ?Sized>(dspace: &DecisionSpace, rng: &mut R) -> Self {
        StrategyCode {
            bits: (0..dspace.len()).map(|_| rng.random::<bool>()).collect(),
            fingerprint: dspace.fingerprint(),
        }
    }

    /// Parses a 0/1 string, most significant character = entry 0.
    pub fn parse(dspace: &DecisionSpace, text: &str) -> Result<Self> {
        let bits = text
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!(
                    "invalid bit {other:?} in strategy code"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        StrategyCode::from_bits(dspace, bits)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn get(&self, k: usize) -> bool {
        self.bits[k]
    }

    pub fn set(&mut self, k: usize, accept: bool) {
        self.bits[k] = accept;
    }

    pub fn flip(&mut self, k: usize) {
        self.bits[k] = !self.bits[k];
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn hamming(&self, other: &StrategyCode) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
    }

    pub(crate) fn bits_mut(&mut self) -> &mut [bool] {
        &mut self.bits
    }

    /// Fails unless the code was built for `dspace`.
    pub fn check_against(&self, dspace: &DecisionSpace) -> Result<()> {
        if self.bits.len() != dspace.len() {
            return Err(Error::Dimension {
                what: "strategy code length vs. decision space",
                expected: dspace.len(),
                actual: self.bits.len(),
            });
        }
        if self.fingerprint != dspace.fingerprint() {
            return Err(Error::CodebookMismatch);
        }
        Ok(())
    }

    /// Decision for a type-`ty` request (zero-based) arriving in state `s`.
    pub fn decide(&self, dspace: &DecisionSpace, s: &SliceSet, ty: usize) -> Result<bool> {
        self.check_against(dspace)?;
        Ok(dspace.bit_index(s, ty).is_some_and(|k| self.bits[k]))
    }

    #[inline]
    pub(crate) fn decide_counts(&self, dspace: &DecisionSpace, counts: &[u32], ty: usize) -> bool {
        dspace
            .index_counts(counts, ty)
            .is_some_and(|k| self.bits[k])
    }
}

impl fmt::Display for StrategyCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Free-function form of [`StrategyCode::decide`].
pub fn decide(
    code: &StrategyCode,
    dspace: &DecisionSpace,
    s: &SliceSet,
    ty: usize,
) -> Result<bool> {
    code.decide(dspace, s, ty)
}

/// Static reference strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Baseline {
    /// Accept whenever the pool allows.
    Greedy,
    /// Accept type-2 requests only.
    Conservative,
    /// Accept type-1 requests only.
    Opportunistic,
}

impl Baseline {
    pub const ALL: [Baseline; 3] = [
        Baseline::Greedy,
        Baseline::Conservative,
        Baseline::Opportunistic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Baseline::Greedy => "greedy",
            Baseline::Conservative => "conservative",
            Baseline::Opportunistic => "opportunistic",
        }
    }

    pub fn code(self, dspace: &DecisionSpace) -> Result<StrategyCode> {
        let accepted_type = match self {
            Baseline::Greedy => return Ok(StrategyCode::filled(dspace, true)),
            Baseline::Conservative => 1,
            Baseline::Opportunistic => 0,
        };
        if dspace.slice_types() != 2 {
            return Err(Error::BaselineNeedsTwoTypes(self.name()));
        }
        let bits = dspace
            .entries()
            .iter()
            .map(|(_, ty)| *ty == accepted_type)
            .collect();
        StrategyCode::from_bits(dspace, bits)
    }
}

impl fmt::Display for Baseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Baseline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(Baseline::Greedy),
            "conservative" => Ok(Baseline::Conservative),
            "opportunistic" => Ok(Baseline::Opportunistic),
            other => Err(Error::Parse(format!("unknown baseline {other:?}"))),
        }
    }
}

/// Free-function form of [`Baseline::code`].
pub fn baseline_strategy(kind: Baseline, dspace: &DecisionSpace) -> Result<StrategyCode> {
    kind.code(dspace)
}
