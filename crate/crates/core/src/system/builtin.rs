//! Named systems shipped with the library.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use super::density::DensityLineSystem;
use super::model::SystemModel;
use super::profile::{ExtensionRule, MeasureProfile};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinSystem {
    /// Density `e^{2x}` on `x ≤ 0`, `e^x` on `x ≥ 0`.
    TwoRate,
    /// The shift with `w ≡ 1`, i.e. the constant profile `μ(f^k(W)) = 1`.
    Unweighted,
    /// The shift with `w_k = 2` for `k ≥ 1` and `w_k = 1` otherwise.
    ForwardDominant,
    /// Constant profile `μ(f^k(W)) = 1/2`.
    Constant,
}

impl BuiltinSystem {
    pub const ALL: [BuiltinSystem; 4] = [
        BuiltinSystem::TwoRate,
        BuiltinSystem::Unweighted,
        BuiltinSystem::ForwardDominant,
        BuiltinSystem::Constant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BuiltinSystem::TwoRate => "paper-example-sec4",
            BuiltinSystem::Unweighted => "unweighted",
            BuiltinSystem::ForwardDominant => "forward-dominant",
            BuiltinSystem::Constant => "constant",
        }
    }

    /// Builds the system for exponent `p`. Shift-defined entries are turned into
    /// profiles through `μ(f^i(W)) = ν(i)`, so they depend on `p`.
    pub fn instantiate(self, p: f64) -> Result<SystemModel> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::invalid(format!("p = {p} must be finite and >= 1")));
        }
        let geometric = ExtensionRule::GeometricExtrapolate;
        Ok(match self {
            BuiltinSystem::TwoRate => DensityLineSystem::two_rate_example().into(),
            BuiltinSystem::Unweighted => MeasureProfile::new(-1, vec![0.0; 3], geometric)?.into(),
            // ν(i) = 2^{-p i} for i > 0 and 1 for i ≤ 0
            BuiltinSystem::ForwardDominant => MeasureProfile::new(-1, vec![0.0, 0.0, -p * LN_2], geometric)?.into(),
            BuiltinSystem::Constant => MeasureProfile::new(-1, vec![-LN_2; 3], geometric)?.into(),
        })
    }
}

impl fmt::Display for BuiltinSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown built-in system `{s}`")))
    }
}
