//! Log-domain arithmetic, compensated summation and small 1-D solvers.

pub mod line_search;
pub mod quadrature;

pub use line_search::{golden_section_min, LineMinimum};
pub use quadrature::{integrate_adaptive, QuadratureEstimate};

/// `log(exp(a) + exp(b))` without overflow.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `log Σ exp(x_i)`; `-inf` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let s: f64 = xs.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}

/// `log(exp(a) - exp(b))` for `a > b`.
#[inline]
pub fn log_sub_exp(a: f64, b: f64) -> f64 {
    debug_assert!(a >= b);
    if b == f64::NEG_INFINITY {
        return a;
    }
    a + (-(b - a).exp()).ln_1p()
}

/// `log(expm1(x) / x)`, continuous through `x = 0` and safe for large `|x|`.
pub fn log_expm1_over(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if x.abs() < 1e-5 {
        // expm1(x)/x = 1 + x/2 + x^2/6 + ...
        (x / 2.0 + x * x / 6.0).ln_1p()
    } else if x > 0.0 {
        if x > 30.0 {
            x + (-(-x).exp()).ln_1p() - x.ln()
        } else {
            (x.exp_m1() / x).ln()
        }
    } else {
        // expm1(x)/x = (1 - e^x)/|x| for x < 0
        (-x.exp_m1()).ln() - (-x).ln()
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = KahanSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Ordinary least-squares slope of `ys` against `xs`. Returns 0 for fewer than two points.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    // offsetting by ys[0] makes a constant series give exactly 0
    let y0 = ys[0];
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().map(|y| y - y0).sum::<f64>() / n as f64;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - y0 - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}
