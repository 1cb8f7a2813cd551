//! Numeric probe of projective-orbit proximity:
//! `min_{n ≤ n_max} min_λ ‖λ T^n x − target‖_p`.
//!
//! This reports achieved minima only. It is not evidence of density of the orbit.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::shift::{apply_backward_shift, apply_composition};
use super::vector::{SeqVector, StepFunction};
use super::weights::WeightSequence;
use crate::error::{Error, Result};
use crate::numerics::golden_section_min;
use crate::system::SystemModel;

const LAMBDA_REL_TOL: f64 = 1e-10;
const PHASE_SAMPLES: usize = 64;
const ALTERNATING_ROUNDS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LambdaMode {
    RealLine,
    PositiveRay,
    ComplexPlane,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrbitProbe {
    pub distance: f64,
    pub best_n: u32,
    pub best_lambda: Complex64,
}

/// Coefficient pairs `(u_i, g_i)` with the measure of coordinate `i`.
#[derive(Debug, Clone, Default)]
pub struct PairedCoordinates {
    pub p: f64,
    pub pairs: Vec<(Complex64, Complex64, f64)>,
}

impl PairedCoordinates {
    /// `‖λu − g‖_p^p`.
    pub fn residual_pow(&self, lambda: Complex64) -> f64 {
        self.pairs.iter().map(|&(u, g, m)| m * (lambda * u - g).norm().powf(self.p)).sum()
    }

    fn norm_u(&self) -> f64 {
        self.pairs.iter().map(|&(u, _, m)| m * u.norm().powf(self.p)).sum::<f64>().powf(1.0 / self.p)
    }

    fn norm_g(&self) -> f64 {
        self.pairs.iter().map(|&(_, g, m)| m * g.norm().powf(self.p)).sum::<f64>().powf(1.0 / self.p)
    }
}

/// An operator whose projective orbits can be probed.
pub trait OrbitOperator {
    type Vector;

    fn iterate(&self, x: &Self::Vector, n: u32) -> Result<Self::Vector>;

    fn is_zero(&self, x: &Self::Vector) -> bool;

    fn pair(&self, u: &Self::Vector, g: &Self::Vector) -> Result<PairedCoordinates>;
}

impl OrbitOperator for WeightSequence {
    type Vector = SeqVector;

    fn iterate(&self, x: &SeqVector, n: u32) -> Result<SeqVector> {
        apply_backward_shift(self, x, n)
    }

    fn is_zero(&self, x: &SeqVector) -> bool {
        x.is_zero()
    }

    fn pair(&self, u: &SeqVector, g: &SeqVector) -> Result<PairedCoordinates> {
        let mut idx: BTreeMap<i64, ()> = u.entries().keys().map(|&i| (i, ())).collect();
        idx.extend(g.entries().keys().map(|&i| (i, ())));
        let pairs = idx.keys().map(|&i| (u.get(i), g.get(i), 1.0)).collect();
        Ok(PairedCoordinates { p: u.p(), pairs })
    }
}

/// `T_f` acting on step functions over a system.
#[derive(Debug, Clone, Copy)]
pub struct CompositionOperator<'a> {
    pub system: &'a SystemModel,
}

impl OrbitOperator for CompositionOperator<'_> {
    type Vector = StepFunction;

    fn iterate(&self, x: &StepFunction, n: u32) -> Result<StepFunction> {
        Ok(apply_composition(x, n as i64))
    }

    fn is_zero(&self, x: &StepFunction) -> bool {
        x.is_zero()
    }

    fn pair(&self, u: &StepFunction, g: &StepFunction) -> Result<PairedCoordinates> {
        if u.refinement() != g.refinement() {
            return Err(Error::invalid("step functions have different refinements"));
        }
        let masses = self.system.cell_masses(u.refinement())?;
        let mut idx: BTreeMap<(i64, u32), ()> = u.cells().keys().map(|&c| (c, ())).collect();
        idx.extend(g.cells().keys().map(|&c| (c, ())));
        let pairs = idx
            .keys()
            .map(|&(k, j)| Ok((u.get((k, j)), g.get((k, j)), masses.log_subcell_mass(k, j)?.exp())))
            .collect::<Result<Vec<_>>>()?;
        Ok(PairedCoordinates { p: u.p(), pairs })
    }
}

/// Best `λ` for `min_λ ‖λu − g‖_p` under `mode`, with the attained distance.
pub fn best_scalar(coords: &PairedCoordinates, mode: LambdaMode) -> (Complex64, f64) {
    let p = coords.p;
    let dist = |l: Complex64| coords.residual_pow(l).max(0.0).powf(1.0 / p);
    let norm_u = coords.norm_u();
    let norm_g = coords.norm_g();
    if norm_u == 0.0 || norm_g == 0.0 {
        let zero = Complex64::default();
        return (zero, dist(zero));
    }
    if p == 2.0 {
        // orthogonal projection
        let uu: f64 = coords.pairs.iter().map(|&(u, _, m)| m * u.norm_sqr()).sum();
        let ug: Complex64 = coords.pairs.iter().map(|&(u, g, m)| u.conj() * g * m).sum();
        let proj = ug / uu;
        let lambda = match mode {
            LambdaMode::ComplexPlane => proj,
            LambdaMode::RealLine => Complex64::new(proj.re, 0.0),
            LambdaMode::PositiveRay => Complex64::new(proj.re.max(0.0), 0.0),
        };
        return (lambda, dist(lambda));
    }
    // |λ| > 2‖g‖/‖u‖ gives a residual above ‖g‖, the value at λ = 0
    let radius = 2.0 * norm_g / norm_u;
    let real = |lo: f64| {
        let m = golden_section_min(|t| coords.residual_pow(Complex64::new(t, 0.0)), lo, radius, LAMBDA_REL_TOL);
        Complex64::new(m.x, 0.0)
    };
    match mode {
        LambdaMode::RealLine => {
            let l = real(-radius);
            (l, dist(l))
        }
        LambdaMode::PositiveRay => {
            let l = real(0.0);
            (l, dist(l))
        }
        LambdaMode::ComplexPlane => complex_search(coords, radius, dist),
    }
}

// Alternating modulus / phase descent from the best of PHASE_SAMPLES phases. Heuristic.
fn complex_search<D: Fn(Complex64) -> f64>(coords: &PairedCoordinates, radius: f64, dist: D) -> (Complex64, f64) {
    let along = |theta: f64| {
        let dir = Complex64::from_polar(1.0, theta);
        golden_section_min(|r| coords.residual_pow(dir * r), 0.0, radius, LAMBDA_REL_TOL)
    };
    let (mut theta, mut r, mut best) = (0.0, 0.0, f64::INFINITY);
    for i in 0..PHASE_SAMPLES {
        let t = 2.0 * PI * i as f64 / PHASE_SAMPLES as f64;
        let m = along(t);
        if m.value < best {
            (theta, r, best) = (t, m.x, m.value);
        }
    }
    let mut width = 2.0 * PI / PHASE_SAMPLES as f64;
    for _ in 0..ALTERNATING_ROUNDS {
        let prev = best;
        let m = golden_section_min(
            |t| coords.residual_pow(Complex64::from_polar(r, t)),
            theta - width,
            theta + width,
            LAMBDA_REL_TOL,
        );
        if m.value < best {
            (theta, best) = (m.x, m.value);
        }
        let m = along(theta);
        if m.value < best {
            (r, best) = (m.x, m.value);
        }
        width *= 0.5;
        if prev - best <= 1e-15 * prev {
            break;
        }
    }
    let lambda = Complex64::from_polar(r, theta);
    (lambda, dist(lambda))
}

/// `min_{0 ≤ n ≤ n_max} min_λ ‖λ T^n x − target‖_p`; ties keep the smallest `n`.
pub fn projective_distance<T: OrbitOperator>(
    op: &T,
    x: &T::Vector,
    target: &T::Vector,
    n_max: u32,
    mode: LambdaMode,
) -> Result<OrbitProbe> {
    if op.is_zero(x) {
        return Err(Error::ZeroVector);
    }
    let mut best: Option<OrbitProbe> = None;
    for n in 0..=n_max {
        let u = op.iterate(x, n)?;
        let coords = op.pair(&u, target)?;
        let (lambda, distance) = best_scalar(&coords, mode);
        if best.is_none_or(|b| distance < b.distance) {
            best = Some(OrbitProbe { distance, best_n: n, best_lambda: lambda });
        }
    }
    Ok(best.expect("n_max >= 0 gives at least one probe"))
}
