//! Cost profiles: nonnegative integer weights per primitive gate class.
//!
//! The same profile is used for gate counts and cycle counts; hardware
//! figures for single-qubit gates typically sit in `1..=4` and for singly
//! controlled gates in `1..=39`, but nothing here enforces a range.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Counting alphabet: the classes in which closed-form counts are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GateClass {
    X,
    H,
    Ry,
    Rz,
    Cx,
    Ch,
    Cry,
    /// X with `m >= 2` controls.
    Mcx(usize),
}

impl fmt::Display for GateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateClass::X => f.write_str("x"),
            GateClass::H => f.write_str("h"),
            GateClass::Ry => f.write_str("ry"),
            GateClass::Rz => f.write_str("rz"),
            GateClass::Cx => f.write_str("cx"),
            GateClass::Ch => f.write_str("ch"),
            GateClass::Cry => f.write_str("cry"),
            GateClass::Mcx(m) => write!(f, "c{m}x"),
        }
    }
}

/// How multi-controlled X gates are priced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McxCost {
    /// Every `C^m X` costs the same.
    Uniform(u64),
    /// Explicit cost per control arity; arities not listed have no cost.
    PerArity(BTreeMap<usize, u64>),
    /// Toffoli = 6 CX + 7 RZ + 2 H; `C^m X` (m >= 3) = `4(m-2)` Toffolis
    /// from the borrowed-qubit toggle ladder.
    Derived,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostProfile {
    #[serde(default)]
    pub x: Option<u64>,
    #[serde(default)]
    pub h: Option<u64>,
    #[serde(default)]
    pub ry: Option<u64>,
    #[serde(default)]
    pub rz: Option<u64>,
    #[serde(default)]
    pub cx: Option<u64>,
    #[serde(default)]
    pub ch: Option<u64>,
    #[serde(default)]
    pub cry: Option<u64>,
    pub mcx: McxCost,
}

/// Upper bound on a single class cost accepted from files.
pub const MAX_COST: u64 = 1 << 32;

impl Default for CostProfile {
    fn default() -> Self {
        Self::unit()
    }
}

impl CostProfile {
    /// Every class costs 1 and `C^m X` is a single abstract gate.
    pub fn unit() -> Self {
        CostProfile {
            x: Some(1),
            h: Some(1),
            ry: Some(1),
            rz: Some(1),
            cx: Some(1),
            ch: Some(1),
            cry: Some(1),
            mcx: McxCost::Uniform(1),
        }
    }

    /// Unit single-qubit and CX costs with multi-controlled X priced by the
    /// derived Toffoli-ladder rule.
    pub fn unit_derived() -> Self {
        CostProfile { mcx: McxCost::Derived, ..Self::unit() }
    }

    /// Parses a profile; every cost must be at most [`MAX_COST`].
    pub fn from_json(text: &str) -> Result<Self> {
        let profile: CostProfile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let fixed = [profile.x, profile.h, profile.ry, profile.rz, profile.cx, profile.ch, profile.cry];
        let mcx: Vec<u64> = match &profile.mcx {
            McxCost::Uniform(c) => vec![*c],
            McxCost::PerArity(map) => map.values().copied().collect(),
            McxCost::Derived => Vec::new(),
        };
        if fixed.into_iter().flatten().chain(mcx).any(|c| c > MAX_COST) {
            return Err(Error::Parse(format!("costs must not exceed {MAX_COST}")));
        }
        Ok(profile)
    }

    /// Multiplies every cost by `factor`.
    pub fn scaled(&self, factor: u64) -> Self {
        let s = |c: Option<u64>| c.map(|v| v * factor);
        CostProfile {
            x: s(self.x),
            h: s(self.h),
            ry: s(self.ry),
            rz: s(self.rz),
            cx: s(self.cx),
            ch: s(self.ch),
            cry: s(self.cry),
            mcx: match &self.mcx {
                McxCost::Uniform(c) => McxCost::Uniform(c * factor),
                McxCost::PerArity(map) => McxCost::PerArity(map.iter().map(|(k, v)| (*k, v * factor)).collect()),
                McxCost::Derived => McxCost::Derived,
            },
        }
    }

    pub fn cost(&self, class: GateClass) -> Result<u64> {
        let missing = || Error::MissingCost(class.to_string());
        match class {
            GateClass::X => self.x.ok_or_else(missing),
            GateClass::H => self.h.ok_or_else(missing),
            GateClass::Ry => self.ry.ok_or_else(missing),
            GateClass::Rz => self.rz.ok_or_else(missing),
            GateClass::Cx => self.cx.ok_or_else(missing),
            GateClass::Ch => self.ch.ok_or_else(missing),
            GateClass::Cry => self.cry.ok_or_else(missing),
            GateClass::Mcx(m) if m < 2 => Err(missing()),
            GateClass::Mcx(m) => match &self.mcx {
                McxCost::Uniform(c) => Ok(*c),
                McxCost::PerArity(map) => map.get(&m).copied().ok_or_else(missing),
                McxCost::Derived => {
                    let toffoli =
                        6 * self.cost(GateClass::Cx)? + 7 * self.cost(GateClass::Rz)? + 2 * self.cost(GateClass::H)?;
                    if m == 2 {
                        Ok(toffoli)
                    } else {
                        Ok(4 * (m as u64 - 2) * toffoli)
                    }
                }
            },
        }
    }

    /// Cost of an X gate carrying `controls` controls, whatever its arity.
    pub fn controlled_x(&self, controls: usize) -> Result<u64> {
        match controls {
            0 => self.cost(GateClass::X),
            1 => self.cost(GateClass::Cx),
            m => self.cost(GateClass::Mcx(m)),
        }
    }
}
