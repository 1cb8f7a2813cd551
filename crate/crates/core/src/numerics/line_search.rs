//! Golden-section search for unimodal functions on a bracket.

const INV_PHI: f64 = 0.618_033_988_749_894_9; // (sqrt(5) - 1) / 2

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineMinimum {
    pub x: f64,
    pub value: f64,
    pub iterations: usize,
}

/// Minimizes `f` on `[lo, hi]` until the bracket is narrower than
/// `rel_tol * max(1, |lo| + |hi|)`. Endpoints are also compared so a
/// minimum sitting on the boundary is returned exactly.
pub fn golden_section_min<F>(f: F, lo: f64, hi: f64, rel_tol: f64) -> LineMinimum
where
    F: Fn(f64) -> f64,
{
    assert!(lo <= hi, "bracket reversed: [{lo}, {hi}]");
    let scale = (lo.abs() + hi.abs()).max(1.0);
    let tol = rel_tol * scale;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while (b - a) > tol && iterations < 500 {
        iterations += 1;
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    let mut best = LineMinimum { x: mid, value: f(mid), iterations };
    for x in [lo, hi] {
        let v = f(x);
        if v < best.value {
            best = LineMinimum { x, value: v, iterations };
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola() {
        let m = golden_section_min(|x| (x - 1.3).powi(2) + 2.0, -10.0, 10.0, 1e-12);
        // a quadratic minimum pins x only to about sqrt(eps)
        assert!((m.x - 1.3).abs() < 1e-7);
        assert!((m.value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_minimum() {
        let m = golden_section_min(|x| x + 1.0, 0.0, 4.0, 1e-10);
        assert_eq!(m.x, 0.0);
        assert_eq!(m.value, 1.0);
    }

    #[test]
    fn nonsmooth_convex() {
        let m = golden_section_min(|x: f64| (x - 0.25).abs() + (x + 2.0).abs(), -5.0, 5.0, 1e-12);
        assert!((m.value - 2.25).abs() < 1e-9);
    }
}
