//! Measures on ℝ given by a piecewise-exponential density, with the
//! translation `f(x) = x + 1` and generating window `W = [0, 1)`.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::profile::{ExtensionRule, MeasureProfile};
use crate::error::{Error, Result};
use crate::numerics::{self, log_expm1_over, log_sum_exp, QuadratureEstimate};

/// `c · exp(a·x)` on the half-open interval `[from, to)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpPiece {
    pub from: f64,
    pub to: f64,
    pub c: f64,
    pub a: f64,
}

impl ExpPiece {
    pub fn new(from: f64, to: f64, c: f64, a: f64) -> Self {
        Self { from, to, c, a }
    }

    #[inline]
    fn log_value(&self, x: f64) -> f64 {
        self.c.ln() + self.a * x
    }

    /// `log ∫_{[lo, hi] ∩ [from, to)} c e^{a x} dx`, `-inf` when empty or `c = 0`.
    fn log_integral(&self, lo: f64, hi: f64) -> f64 {
        let l = lo.max(self.from);
        let u = hi.min(self.to);
        if u <= l || self.c == 0.0 {
            return f64::NEG_INFINITY;
        }
        let len = u - l;
        if !len.is_finite() {
            return f64::INFINITY;
        }
        self.c.ln() + self.a * l + len.ln() + log_expm1_over(self.a * len)
    }
}

/// A non-negative density that is `c_i e^{a_i x}` on finitely many disjoint intervals and 0 elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ExpPiece>", into = "Vec<ExpPiece>")]
pub struct PiecewiseExpDensity {
    pieces: Vec<ExpPiece>,
}

impl TryFrom<Vec<ExpPiece>> for PiecewiseExpDensity {
    type Error = Error;

    fn try_from(pieces: Vec<ExpPiece>) -> Result<Self> {
        Self::new(pieces)
    }
}

impl From<PiecewiseExpDensity> for Vec<ExpPiece> {
    fn from(d: PiecewiseExpDensity) -> Self {
        d.pieces
    }
}

impl PiecewiseExpDensity {
    pub fn new(mut pieces: Vec<ExpPiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::invalid("density needs at least one piece"));
        }
        for (i, p) in pieces.iter().enumerate() {
            if p.from.is_nan() || p.to.is_nan() || p.from >= p.to {
                return Err(Error::invalid(format!("piece {i}: need from < to, got [{}, {})", p.from, p.to)));
            }
            if !p.c.is_finite() || p.c < 0.0 || !p.a.is_finite() {
                return Err(Error::invalid(format!("piece {i}: need finite c >= 0 and finite a")));
            }
        }
        pieces.sort_by(|x, y| x.from.total_cmp(&y.from));
        if let Some(w) = pieces.windows(2).find(|w| w[0].to > w[1].from) {
            return Err(Error::invalid(format!(
                "pieces [{}, {}) and [{}, {}) overlap",
                w[0].from, w[0].to, w[1].from, w[1].to
            )));
        }
        Ok(Self { pieces })
    }

    pub fn pieces(&self) -> &[ExpPiece] {
        &self.pieces
    }

    /// Index of the piece containing `x`, if any.
    fn piece_at(&self, x: f64) -> Option<&ExpPiece> {
        let idx = self.pieces.partition_point(|p| p.from <= x);
        idx.checked_sub(1).map(|i| &self.pieces[i]).filter(|p| x < p.to)
    }

    pub fn value(&self, x: f64) -> f64 {
        self.piece_at(x).map_or(0.0, |p| p.c * (p.a * x).exp())
    }

    /// Finite endpoints of the pieces, ascending.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self
            .pieces
            .iter()
            .flat_map(|p| [p.from, p.to])
            .filter(|x| x.is_finite())
            .collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    /// Closed-form `log ∫_lo^hi h dλ`; `-inf` if the integral is zero.
    pub fn log_integral(&self, lo: f64, hi: f64) -> f64 {
        let terms: Vec<f64> = self.pieces.iter().map(|p| p.log_integral(lo, hi)).collect();
        log_sum_exp(&terms)
    }

    /// `log h(x)` evaluated with the formula of a given piece (one-sided limits at breakpoints).
    pub(crate) fn log_piece_value(&self, x_inside: f64, x_eval: f64) -> Option<f64> {
        self.piece_at(x_inside).filter(|p| p.c > 0.0).map(|p| p.log_value(x_eval))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadratureMethod {
    #[serde(rename = "gauss-kronrod-15")]
    GaussKronrod15,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    #[serde(default = "QuadratureConfig::default_method")]
    pub method: QuadratureMethod,
    #[serde(default = "QuadratureConfig::default_abs_tol")]
    pub abs_tol: f64,
    #[serde(default = "QuadratureConfig::default_rel_tol")]
    pub rel_tol: f64,
}

impl QuadratureConfig {
    fn default_method() -> QuadratureMethod {
        QuadratureMethod::GaussKronrod15
    }
    fn default_abs_tol() -> f64 {
        1e-300
    }
    fn default_rel_tol() -> f64 {
        1e-13
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            method: Self::default_method(),
            abs_tol: Self::default_abs_tol(),
            rel_tol: Self::default_rel_tol(),
        }
    }
}

/// Translation by +1 on ℝ with measure `μ(B) = ∫_B h dλ` and window `W = [0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityLineSystem {
    density: PiecewiseExpDensity,
    quadrature: QuadratureConfig,
}

impl DensityLineSystem {
    pub fn new(density: PiecewiseExpDensity, quadrature: QuadratureConfig) -> Result<Self> {
        if !(quadrature.abs_tol >= 0.0 && quadrature.rel_tol >= 0.0) {
            return Err(Error::invalid("quadrature tolerances must be non-negative"));
        }
        let sys = Self { density, quadrature };
        sys.log_window_mass(0.0, 1.0)?;
        Ok(sys)
    }

    /// `e^{2x}` for `x ≤ 0` and `e^x` for `x ≥ 0`.
    pub fn two_rate_example() -> Self {
        let density = PiecewiseExpDensity::new(vec![
            ExpPiece::new(f64::NEG_INFINITY, 0.0, 1.0, 2.0),
            ExpPiece::new(0.0, f64::INFINITY, 1.0, 1.0),
        ])
        .expect("static density is valid");
        Self { density, quadrature: QuadratureConfig::default() }
    }

    pub fn density(&self) -> &PiecewiseExpDensity {
        &self.density
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        self.quadrature
    }

    /// `log μ([lo, hi))` in closed form.
    pub fn log_window_mass(&self, lo: f64, hi: f64) -> Result<f64> {
        let v = self.density.log_integral(lo, hi);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonIntegrableDensity { lo, hi, value: v.exp() })
        }
    }

    /// `log μ(f^k(W)) = log ∫_k^{k+1} h dλ`.
    pub fn log_cell_mass(&self, k: i64) -> Result<f64> {
        let lo = k as f64;
        self.log_window_mass(lo, lo + 1.0)
    }

    /// Adaptive-quadrature estimate of `μ([lo, hi))`, split at the density's breakpoints.
    pub fn quadrature_mass(&self, lo: f64, hi: f64) -> QuadratureEstimate {
        let QuadratureConfig { method: QuadratureMethod::GaussKronrod15, abs_tol, rel_tol } = self.quadrature;
        let bps = self.density.breakpoints();
        numerics::integrate_adaptive(|x| self.density.value(x), lo, hi, &bps, abs_tol, rel_tol)
    }

    /// Tabulates `log μ(f^k(W))` over `k_range` (closed form).
    pub fn profile_from_density(&self, k_range: RangeInclusive<i64>) -> Result<MeasureProfile> {
        let k_min = *k_range.start();
        let values = k_range.map(|k| self.log_cell_mass(k)).collect::<Result<Vec<_>>>()?;
        MeasureProfile::new(k_min, values, ExtensionRule::Reject)
    }

    /// Boundaries `0 = x_0 < … < x_{2^r} = 1` splitting `W` into sub-cells of equal μ-measure.
    pub fn subcell_boundaries(&self, refinement: u32) -> Vec<f64> {
        let parts = 1u64 << refinement;
        let log_total = self.density.log_integral(0.0, 1.0);
        let mut out = Vec::with_capacity(parts as usize + 1);
        out.push(0.0);
        for j in 1..parts {
            let log_target = log_total + (j as f64 / parts as f64).ln();
            let (mut lo, mut hi) = (*out.last().unwrap(), 1.0f64);
            // cumulative mass is monotone; bisect to machine resolution
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if self.density.log_integral(0.0, mid) < log_target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        out.push(1.0);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn two_rate_window_masses() {
        let sys = DensityLineSystem::two_rate_example();
        // μ(f^5(W)) = e^5 (e - 1)
        let v = sys.log_cell_mass(5).unwrap();
        assert!((v - (5.0 + (E - 1.0).ln())).abs() < 1e-13);
        // μ(f^{-3}(W)) = ½ e^{-6} (e² - 1)
        let v = sys.log_cell_mass(-3).unwrap();
        assert!((v - (0.5 * (-6f64).exp() * (E * E - 1.0)).ln()).abs() < 1e-13);
        assert!((sys.log_cell_mass(0).unwrap() - (E - 1.0).ln()).abs() < 1e-14);
    }

    #[test]
    fn constant_density_unit_mass() {
        let d = PiecewiseExpDensity::new(vec![ExpPiece::new(f64::NEG_INFINITY, f64::INFINITY, 1.0, 0.0)]).unwrap();
        let sys = DensityLineSystem::new(d, QuadratureConfig::default()).unwrap();
        for k in [-40, -1, 0, 7, 1000] {
            assert_eq!(sys.log_cell_mass(k).unwrap(), 0.0);
        }
    }

    #[test]
    fn zero_window_is_non_integrable() {
        let d = PiecewiseExpDensity::new(vec![ExpPiece::new(0.0, 2.0, 1.0, 0.0)]).unwrap();
        let sys = DensityLineSystem::new(d, QuadratureConfig::default()).unwrap();
        assert!(matches!(sys.log_cell_mass(5), Err(Error::NonIntegrableDensity { .. })));
        assert!(sys.profile_from_density(-1..=1).is_err());
        // W itself must carry mass
        let d = PiecewiseExpDensity::new(vec![ExpPiece::new(3.0, 4.0, 1.0, 0.0)]).unwrap();
        assert!(DensityLineSystem::new(d, QuadratureConfig::default()).is_err());
    }

    #[test]
    fn overlapping_pieces_rejected() {
        let r = PiecewiseExpDensity::new(vec![ExpPiece::new(0.0, 2.0, 1.0, 0.0), ExpPiece::new(1.0, 3.0, 1.0, 0.0)]);
        assert!(r.is_err());
        assert!(PiecewiseExpDensity::new(vec![ExpPiece::new(0.0, 1.0, -1.0, 0.0)]).is_err());
    }

    #[test]
    fn value_is_right_continuous_at_breakpoints() {
        let d = PiecewiseExpDensity::new(vec![ExpPiece::new(0.0, 1.0, 1.0, 0.0), ExpPiece::new(1.0, 2.0, 3.0, 0.0)]).unwrap();
        assert_eq!(d.value(1.0), 3.0);
        assert_eq!(d.value(2.0), 0.0);
        assert_eq!(d.value(-0.5), 0.0);
    }

    #[test]
    fn quadrature_agrees_with_closed_form() {
        let sys = DensityLineSystem::two_rate_example();
        for k in -20..=20 {
            let exact = sys.log_cell_mass(k).unwrap().exp();
            let q = sys.quadrature_mass(k as f64, k as f64 + 1.0);
            assert!(((q.value - exact) / exact).abs() < 1e-12, "k = {k}");
        }
        // window straddling the breakpoint
        let exact = sys.log_window_mass(-0.5, 0.5).unwrap().exp();
        let q = sys.quadrature_mass(-0.5, 0.5);
        assert!(((q.value - exact) / exact).abs() < 1e-12);
    }

    #[test]
    fn subcells_have_equal_mass() {
        let sys = DensityLineSystem::two_rate_example();
        let b = sys.subcell_boundaries(3);
        assert_eq!(b.len(), 9);
        let total = sys.log_window_mass(0.0, 1.0).unwrap().exp();
        for w in b.windows(2) {
            let m = sys.log_window_mass(w[0], w[1]).unwrap().exp();
            assert!((m - total / 8.0).abs() < 1e-14, "{w:?}");
        }
        assert_eq!(sys.subcell_boundaries(0), vec![0.0, 1.0]);
    }

    #[test]
    fn window_mass_is_additive() {
        let sys = DensityLineSystem::two_rate_example();
        for k in [-30, -2, -1, 0, 1, 17] {
            let k = k as f64;
            for split in [0.5, 0.01, 0.99] {
                let a = sys.log_window_mass(k, k + split).unwrap().exp();
                let b = sys.log_window_mass(k + split, k + 1.0).unwrap().exp();
                let whole = sys.log_window_mass(k, k + 1.0).unwrap().exp();
                assert!(((a + b - whole) / whole).abs() < 1e-12, "k = {k}, split = {split}");
            }
        }
    }
}
