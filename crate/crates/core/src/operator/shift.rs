//! The backward shift `(B_w x)_i = w_{i+1} x_{i+1}`, its inverse, the
//! composition operator on step functions, and `p`-norms.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::vector::{SeqVector, StepFunction};
use super::weights::WeightSequence;
use crate::error::Result;
use crate::numerics::log_sum_exp;
use crate::system::SystemModel;

/// `B_w^steps x`. After `n` steps the entry at `i` sits at `i - n`, scaled by `w_{i-n+1} ⋯ w_i`.
pub fn apply_backward_shift(w: &WeightSequence, x: &SeqVector, steps: u32) -> Result<SeqVector> {
    let n = steps as i64;
    let mut out = BTreeMap::new();
    for (&i, &c) in x.entries() {
        let log_factor = w.log_product(i - n + 1, i)?;
        *out.entry(i - n).or_insert_with(Complex64::default) += c * log_factor.exp();
    }
    Ok(SeqVector::from_raw(x.p(), out))
}

/// `B_w^{-steps} x`. One step moves the entry at `i` to `i + 1` divided by `w_{i+1}`.
pub fn apply_inverse_shift(w: &WeightSequence, x: &SeqVector, steps: u32) -> Result<SeqVector> {
    let n = steps as i64;
    let mut out = BTreeMap::new();
    for (&i, &c) in x.entries() {
        let log_factor = w.log_product(i + 1, i + n)?;
        *out.entry(i + n).or_insert_with(Complex64::default) += c * (-log_factor).exp();
    }
    Ok(SeqVector::from_raw(x.p(), out))
}

/// `T_f^steps φ = φ ∘ f^steps`: the coefficient on cell `(k, j)` moves to `(k - steps, j)`.
/// Negative `steps` applies the inverse.
pub fn apply_composition(phi: &StepFunction, steps: i64) -> StepFunction {
    let cells = phi.cells().iter().map(|(&(k, j), &c)| ((k - steps, j), c)).collect();
    StepFunction::from_raw(phi.p(), phi.refinement(), cells)
}

fn log_norm_from_terms(terms: &[f64], p: f64) -> f64 {
    log_sum_exp(terms) / p
}

/// `log ‖x‖_p` (`-inf` for the zero vector).
pub fn log_lp_norm_seq(x: &SeqVector) -> f64 {
    let p = x.p();
    let terms: Vec<f64> = x
        .entries()
        .values()
        .filter(|c| **c != Complex64::default())
        .map(|c| p * c.norm().ln())
        .collect();
    log_norm_from_terms(&terms, p)
}

/// `‖x‖_p` with counting measure on `ℤ`.
pub fn lp_norm_seq(x: &SeqVector) -> f64 {
    log_lp_norm_seq(x).exp()
}

/// `log ‖φ‖_p` with `‖φ‖_p^p = Σ |c_{k,j}|^p μ(f^k(W_j))`.
pub fn log_lp_norm_step(phi: &StepFunction, system: &SystemModel) -> Result<f64> {
    let masses = system.cell_masses(phi.refinement())?;
    let p = phi.p();
    let terms = phi
        .cells()
        .iter()
        .filter(|(_, c)| **c != Complex64::default())
        .map(|(&(k, j), c)| Ok(p * c.norm().ln() + masses.log_subcell_mass(k, j)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(log_norm_from_terms(&terms, p))
}

pub fn lp_norm_step(phi: &StepFunction, system: &SystemModel) -> Result<f64> {
    Ok(log_lp_norm_step(phi, system)?.exp())
}
