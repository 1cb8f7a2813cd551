use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::density::DensityLineSystem;
use super::profile::MeasureProfile;
use crate::error::{Error, Result};

/// A dissipative system `X = ⋃̇_k f^k(W)` described by its cells.
///
/// Profile systems carry no density and are homogeneous inside `W`:
/// `μ(f^k(B)) = μ(f^k(W))·μ(B)/μ(W)` for `B ⊆ W`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SystemModel {
    Density(DensityLineSystem),
    Profile(MeasureProfile),
}

impl SystemModel {
    pub fn log_cell_mass(&self, k: i64) -> Result<f64> {
        match self {
            SystemModel::Density(d) => d.log_cell_mass(k),
            SystemModel::Profile(p) => p.log_mass(k),
        }
    }

    pub fn log_mu_w(&self) -> Result<f64> {
        self.log_cell_mass(0)
    }

    /// A tabulated profile over `range` (must contain 0).
    pub fn profile(&self, range: RangeInclusive<i64>) -> Result<MeasureProfile> {
        match self {
            SystemModel::Density(d) => d.profile_from_density(range),
            SystemModel::Profile(p) => p.retabulate(range),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self, SystemModel::Profile(_))
    }

    /// Masses of the sub-cells `f^k(W_j)` at the given refinement.
    pub fn cell_masses(&self, refinement: u32) -> Result<CellMasses<'_>> {
        if refinement > 20 {
            return Err(Error::invalid(format!("refinement {refinement} exceeds 20")));
        }
        let boundaries = match self {
            SystemModel::Density(d) => d.subcell_boundaries(refinement),
            SystemModel::Profile(_) => Vec::new(),
        };
        Ok(CellMasses { system: self, refinement, boundaries })
    }
}

impl From<DensityLineSystem> for SystemModel {
    fn from(d: DensityLineSystem) -> Self {
        SystemModel::Density(d)
    }
}

impl From<MeasureProfile> for SystemModel {
    fn from(p: MeasureProfile) -> Self {
        SystemModel::Profile(p)
    }
}

/// Sub-cell masses `μ(f^k(W_j))`, `W = ⋃_j W_j` split into `2^r` parts of equal measure.
#[derive(Debug, Clone)]
pub struct CellMasses<'a> {
    system: &'a SystemModel,
    refinement: u32,
    boundaries: Vec<f64>,
}

impl CellMasses<'_> {
    pub fn refinement(&self) -> u32 {
        self.refinement
    }

    pub fn parts(&self) -> u32 {
        1 << self.refinement
    }

    pub fn system(&self) -> &SystemModel {
        self.system
    }

    /// `log μ(f^k(W_j))`.
    pub fn log_subcell_mass(&self, k: i64, j: u32) -> Result<f64> {
        if j >= self.parts() {
            return Err(Error::invalid(format!("sub-cell {j} out of 0..{}", self.parts())));
        }
        match self.system {
            SystemModel::Profile(p) => Ok(p.log_mass(k)? - self.refinement as f64 * std::f64::consts::LN_2),
            SystemModel::Density(d) => {
                let shift = k as f64;
                let (lo, hi) = (self.boundaries[j as usize], self.boundaries[j as usize + 1]);
                d.log_window_mass(lo + shift, hi + shift)
            }
        }
    }
}
