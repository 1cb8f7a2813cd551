//! Log-domain product sequences behind the liminf criteria. Element `n`
//! (for `n = 1..=horizon`) is stored at index `n - 1`.

use crate::correspondence::weights_from_profile_over;
use crate::error::Result;
use crate::numerics::KahanSum;
use crate::operator::WeightSequence;
use crate::system::MeasureProfile;

/// Prefix sums `S(i)` over `[lo, hi] ∋ 0` with `S(0) = 0` and `S(i) − S(i−1) = log w_i`.
struct PrefixLogSums {
    lo: i64,
    values: Vec<f64>,
}

impl PrefixLogSums {
    fn new(w: &WeightSequence, lo: i64, hi: i64) -> Result<Self> {
        let (lo, hi) = (lo.min(0), hi.max(0));
        let mut values = vec![0.0; (hi - lo + 1) as usize];
        let zero = (-lo) as usize;
        let mut acc = KahanSum::new();
        for i in 1..=hi {
            acc.add(w.log_weight(i)?);
            values[zero + i as usize] = acc.value();
        }
        let mut acc = KahanSum::new();
        for i in (lo..0).rev() {
            acc.add(w.log_weight(i + 1)?);
            values[(i - lo) as usize] = -acc.value();
        }
        Ok(Self { lo, values })
    }

    #[inline]
    fn at(&self, i: i64) -> f64 {
        self.values[(i - self.lo) as usize]
    }
}

/// `log[(w_1⋯w_{n+q})^{-1} · (w_0⋯w_{q−n+1})]` for `n = 1..=horizon`.
///
/// With `S` the prefix sums above, element `n` is `−S(n+q) − S(q−n)`. When
/// `q − n ≥ 1` the backward "product" is read with the usual convention for
/// reversed bounds, i.e. as `(w_1⋯w_{q−n})^{-1}`, which is what makes
/// `p` times this sequence equal `log ν(q+n) + log ν(q−n)`.
pub fn shift_product_sequence(w: &WeightSequence, q: i64, horizon: u32) -> Result<Vec<f64>> {
    let h = horizon as i64;
    if h == 0 {
        return Ok(Vec::new());
    }
    let sums = PrefixLogSums::new(w, q - h, q + h)?;
    Ok((1..=h).map(|n| -sums.at(n + q) - sums.at(q - n)).collect())
}

/// `log[(w_1⋯w_n)^{-1} · (w_{−1}⋯w_{−n})]` for `n = 1..=horizon` (invertible shifts).
pub fn invertible_simplified_products(w: &WeightSequence, horizon: u32) -> Result<Vec<f64>> {
    let mut forward = KahanSum::new();
    let mut backward = KahanSum::new();
    (1..=horizon as i64)
        .map(|n| {
            forward.add(w.log_weight(n)?);
            backward.add(w.log_weight(-n)?);
            Ok(backward.value() - forward.value())
        })
        .collect()
}

/// `log μ(f^{q+n}(W)) + log μ(f^{q−n}(W))` for `n = 1..=horizon`.
pub fn dissipative_product_sequence(profile: &MeasureProfile, q: i64, horizon: u32) -> Result<Vec<f64>> {
    (1..=horizon as i64)
        .map(|n| Ok(profile.log_mass(q + n)? + profile.log_mass(q - n)?))
        .collect()
}

/// Checks `p · shift(n, q) = dissipative(n, q) − 2 log μ(W)` for the weights
/// derived from `profile`; returns the largest absolute discrepancy.
pub fn equivalence_identity_check(profile: &MeasureProfile, p: f64, q: i64, horizon: u32) -> Result<f64> {
    let h = horizon as i64;
    if h == 0 {
        return Ok(0.0);
    }
    let w = weights_from_profile_over(profile, p, (q - h + 1).min(1)..=(q + h).max(0))?;
    let shift = shift_product_sequence(&w, q, horizon)?;
    let diss = dissipative_product_sequence(profile, q, horizon)?;
    let log_mu_w = profile.log_mu_w();
    Ok(shift
        .iter()
        .zip(&diss)
        .map(|(s, d)| (p * s - (d - 2.0 * log_mu_w)).abs())
        .fold(0.0, f64::max))
}
