//! The shift/composition dictionary: weights from a measure profile, the
//! measure `ν` on `ℤ` from weights, and the factor map `Π` intertwining
//! `T_f` with `B_w`.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::KahanSum;
use crate::operator::{
    apply_backward_shift, apply_composition, log_lp_norm_step, lp_norm_seq, SeqVector, StepFunction, WeightSequence,
};
use crate::system::{MeasureProfile, SystemModel};

/// `log ν(i)` over a contiguous range containing 0, with `ν(0) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuMeasure {
    i_min: i64,
    log_nu: Vec<f64>,
    p: f64,
}

impl NuMeasure {
    pub fn i_range(&self) -> RangeInclusive<i64> {
        self.i_min..=self.i_min + self.log_nu.len() as i64 - 1
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn log_nu(&self, i: i64) -> Result<f64> {
        let r = self.i_range();
        if !r.contains(&i) {
            return Err(Error::OutOfRange { index: i, lo: *r.start(), hi: *r.end() });
        }
        Ok(self.log_nu[(i - self.i_min) as usize])
    }
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("p = {p} must be finite and >= 1")))
    }
}

/// `log w_k = (log μ(f^{k-1}(W)) − log μ(f^k(W))) / p` for `k` in `k_range`.
pub fn weights_from_profile_over(profile: &MeasureProfile, p: f64, k_range: RangeInclusive<i64>) -> Result<WeightSequence> {
    check_p(p)?;
    let k_min = *k_range.start();
    let values = k_range
        .map(|k| Ok((profile.log_mass(k - 1)? - profile.log_mass(k)?) / p))
        .collect::<Result<Vec<_>>>()?;
    WeightSequence::new(k_min, values)
}

/// Weights for every `k` whose two neighbouring masses are tabulated.
pub fn weights_from_profile(profile: &MeasureProfile, p: f64) -> Result<WeightSequence> {
    if profile.k_min() == profile.k_max() {
        return Err(Error::invalid("profile needs at least two entries to define a weight"));
    }
    weights_from_profile_over(profile, p, profile.k_min() + 1..=profile.k_max())
}

/// `ν(i) = (w_1⋯w_i)^{-p}` for `i > 0`, `(w_{i+1}⋯w_0)^p` for `i < 0`, as compensated running log-sums.
pub fn nu_from_weights(w: &WeightSequence, p: f64, i_range: RangeInclusive<i64>) -> Result<NuMeasure> {
    check_p(p)?;
    let (lo, hi) = (*i_range.start(), *i_range.end());
    if lo > 0 || hi < 0 {
        return Err(Error::invalid(format!("ν range {lo}..={hi} must contain 0")));
    }
    let mut log_nu = vec![0.0; (hi - lo + 1) as usize];
    let zero = (-lo) as usize;
    let mut acc = KahanSum::new();
    for i in 1..=hi {
        acc.add(w.log_weight(i)?);
        log_nu[zero + i as usize] = -p * acc.value();
    }
    let mut acc = KahanSum::new();
    for i in (lo..0).rev() {
        acc.add(w.log_weight(i + 1)?);
        log_nu[(i - lo) as usize] = p * acc.value();
    }
    Ok(NuMeasure { i_min: lo, log_nu, p })
}

/// Rebuilds `w_i = (ν(i−1)/ν(i))^{1/p}` from `ν` and returns `max |log ŵ_i − log w_i|`.
pub fn weights_roundtrip_check(w: &WeightSequence, p: f64, i_range: RangeInclusive<i64>) -> Result<f64> {
    let nu = nu_from_weights(w, p, i_range.clone())?;
    let mut worst = 0.0f64;
    for i in i_range.start() + 1..=*i_range.end() {
        let rebuilt = (nu.log_nu(i - 1)? - nu.log_nu(i)?) / p;
        worst = worst.max((rebuilt - w.log_weight(i)?).abs());
    }
    Ok(worst)
}

/// `Π(φ)_k = μ(f^k(W))^{1/p}/μ(W) · Σ_j c_{k,j} μ(W_j)`.
pub fn factor_map(phi: &StepFunction, system: &SystemModel) -> Result<SeqVector> {
    let p = phi.p();
    let masses = system.cell_masses(phi.refinement())?;
    let base: Vec<f64> = (0..phi.parts())
        .map(|j| masses.log_subcell_mass(0, j).map(f64::exp))
        .collect::<Result<_>>()?;
    let log_mu_w = system.log_mu_w()?;
    let mut sums: BTreeMap<i64, Complex64> = BTreeMap::new();
    for (&(k, j), &c) in phi.cells() {
        *sums.entry(k).or_default() += c * base[j as usize];
    }
    let entries = sums
        .into_iter()
        .map(|(k, s)| Ok((k, s * (system.log_cell_mass(k)? / p - log_mu_w).exp())))
        .collect::<Result<Vec<_>>>()?;
    SeqVector::from_entries(p, entries)
}

/// `‖Π(T_f φ) − B_w(Π φ)‖_p` with the weights derived from the system's profile.
pub fn semiconjugacy_residual(phi: &StepFunction, system: &SystemModel) -> Result<f64> {
    let p = phi.p();
    let image = factor_map(phi, system)?;
    let (Some(&lo), Some(&hi)) = (image.entries().keys().next(), image.entries().keys().next_back()) else {
        return Ok(0.0);
    };
    let span = (lo - 1).min(0)..=hi.max(0);
    let profile = system.profile(span)?;
    let w = weights_from_profile_over(&profile, p, lo..=hi)?;
    let lhs = factor_map(&apply_composition(phi, 1), system)?;
    let rhs = apply_backward_shift(&w, &image, 1)?;
    Ok(lp_norm_seq(&lhs.axpy(Complex64::new(-1.0, 0.0), &rhs)))
}

/// `‖Π φ‖_p / ‖φ‖_p`, or `None` for `φ = 0`.
pub fn factor_map_gain(phi: &StepFunction, system: &SystemModel) -> Result<Option<f64>> {
    let log_phi = log_lp_norm_step(phi, system)?;
    if log_phi == f64::NEG_INFINITY {
        return Ok(None);
    }
    let image = factor_map(phi, system)?;
    Ok(Some((crate::operator::log_lp_norm_seq(&image) - log_phi).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::{BuiltinSystem, DensityLineSystem, ExtensionRule};
    use proptest::prelude::*;
    use std::f64::consts::E;

    fn two_rate_profile(r: i64) -> MeasureProfile {
        DensityLineSystem::two_rate_example().profile_from_density(-r..=r).unwrap()
    }

    #[test]
    fn two_rate_weights() {
        let prof = two_rate_profile(10);
        let w2 = weights_from_profile(&prof, 2.0).unwrap();
        // μ(f^2 W)/μ(f^3 W) = e^{-1}
        assert!((w2.log_weight(3).unwrap() + 0.5).abs() < 1e-13);
        let w1 = weights_from_profile(&prof, 1.0).unwrap();
        // ½ e^{-2}(e² − 1)/(e − 1) = ½ e^{-2}(e + 1)
        let expected = (0.5 * (-2f64).exp() * (E + 1.0)).ln();
        assert!((w1.log_weight(0).unwrap() - expected).abs() < 1e-13);
        assert_eq!(w1.k_range(), -9..=10);
    }

    #[test]
    fn constant_profile_gives_unit_weights() {
        let prof = MeasureProfile::new(-3, vec![1.7; 7], ExtensionRule::Reject).unwrap();
        let w = weights_from_profile(&prof, 3.0).unwrap();
        assert!(w.iter().all(|(_, v)| v == 0.0));
    }

    #[test]
    fn nu_by_hand() {
        let ones = WeightSequence::constant(-10..=10, 0.0).unwrap();
        let nu = nu_from_weights(&ones, 2.0, -10..=10).unwrap();
        assert!((-10..=10).all(|i| nu.log_nu(i).unwrap() == 0.0));
        let twos = WeightSequence::constant(-10..=10, 2f64.ln()).unwrap();
        let nu = nu_from_weights(&twos, 1.0, -5..=5).unwrap();
        assert!((nu.log_nu(3).unwrap().exp() - 0.125).abs() < 1e-15);
        assert!((nu.log_nu(-2).unwrap().exp() - 4.0).abs() < 1e-14);
        assert!(nu_from_weights(&twos, 1.0, 1..=5).is_err());
        assert!(nu_from_weights(&twos, 1.0, -11..=0).is_ok());
        assert!(nu_from_weights(&twos, 1.0, -12..=0).is_err());
    }

    #[test]
    fn nu_matches_relative_masses() {
        let prof = two_rate_profile(30);
        for p in [1.0, 2.0, 3.0] {
            let w = weights_from_profile(&prof, p).unwrap();
            let nu = nu_from_weights(&w, p, -29..=30).unwrap();
            for i in -29..=30 {
                let expected = prof.log_mass(i).unwrap() - prof.log_mu_w();
                assert!((nu.log_nu(i).unwrap() - expected).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn roundtrip_exact_for_constant() {
        let w = WeightSequence::constant(-50..=50, 1.0).unwrap();
        assert_eq!(weights_roundtrip_check(&w, 2.0, -49..=50).unwrap(), 0.0);
    }

    #[test]
    fn factor_map_examples() {
        let sys = SystemModel::from(DensityLineSystem::two_rate_example());
        let chi_w = StepFunction::indicator_of_cell(1.0, 2, 0).unwrap();
        let img = factor_map(&chi_w, &sys).unwrap();
        assert_eq!(img.entries().len(), 1);
        assert!((img.get(0).re - (E - 1.0)).abs() < 1e-13);
        assert!(factor_map(&StepFunction::zero(1.0, 2).unwrap(), &sys).unwrap().is_zero());

        let hom = BuiltinSystem::ForwardDominant.instantiate(2.0).unwrap();
        let chi = StepFunction::indicator_of_cell(2.0, 3, 4).unwrap();
        let img = factor_map(&chi, &hom).unwrap();
        let expected = (hom.log_cell_mass(4).unwrap() / 2.0).exp();
        assert!((img.get(4).re - expected).abs() < 1e-15);
    }

    #[test]
    fn zero_residual_for_zero() {
        let sys = SystemModel::from(DensityLineSystem::two_rate_example());
        assert_eq!(semiconjugacy_residual(&StepFunction::zero(2.0, 1).unwrap(), &sys).unwrap(), 0.0);
    }

    fn arb_step(p: f64, r: u32) -> impl Strategy<Value = StepFunction> {
        let parts = 1u32 << r;
        proptest::collection::vec(((-12i64..12, 0..parts), -5.0f64..5.0, -5.0f64..5.0), 0..20).prop_map(move |v| {
            StepFunction::from_cells(p, r, v.into_iter().map(|(c, a, b)| (c, Complex64::new(a, b)))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn semiconjugacy_on_density(phi in arb_step(2.0, 4)) {
            let sys = SystemModel::from(DensityLineSystem::two_rate_example());
            prop_assert!(semiconjugacy_residual(&phi, &sys).unwrap() < 1e-8);
        }

        #[test]
        fn semiconjugacy_homogeneous(phi in arb_step(3.0, 2)) {
            let sys = BuiltinSystem::ForwardDominant.instantiate(3.0).unwrap();
            prop_assert!(semiconjugacy_residual(&phi, &sys).unwrap() < 1e-10);
        }

        #[test]
        fn factor_map_is_linear(phi in arb_step(2.0, 2), psi in arb_step(2.0, 2), a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let sys = SystemModel::from(DensityLineSystem::two_rate_example());
            let (a, b) = (Complex64::new(a, 0.0), Complex64::new(b, 0.0));
            let combo = phi.scale(a).axpy(b, &psi).unwrap();
            let lhs = factor_map(&combo, &sys).unwrap();
            let rhs = factor_map(&phi, &sys).unwrap().scale(a).axpy(b, &factor_map(&psi, &sys).unwrap());
            let scale = lp_norm_seq(&factor_map(&phi, &sys).unwrap()) * a.norm()
                + lp_norm_seq(&factor_map(&psi, &sys).unwrap()) * b.norm();
            prop_assert!(lp_norm_seq(&lhs.axpy(Complex64::new(-1.0, 0.0), &rhs)) <= 1e-12 * scale.max(1e-300));
        }

        #[test]
        fn roundtrip_random_weights(logs in proptest::collection::vec(-0.7f64..0.7, 401), p in 1.0f64..4.0) {
            let w = WeightSequence::new(-200, logs).unwrap();
            prop_assert!(weights_roundtrip_check(&w, p, -199..=200).unwrap() < 1e-12);
        }
    }
}
