//! Composite Gauss-Legendre quadrature for smooth oscillatory integrands.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// `m`-point rule; nodes are found by Newton's method on `P_m` in `f64`.
    pub fn new(m: usize) -> Self {
        assert!(m >= 1, "rule needs at least one node");
        let mut nodes = Vec::with_capacity(m);
        let mut weights = Vec::with_capacity(m);
        let mf = m as f64;
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (mf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(m, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(m, x);
            if d.is_finite() {
                dp = d;
            }
            nodes.push(T::lit(x));
            weights.push(T::lit(2.0 / ((1.0 - x * x) * dp * dp)));
        }
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Composite rule over `panels` equal panels of `[a, b]`; also returns the
    /// same sum with `|f|`, used as a round-off scale.
    pub fn composite<F>(&self, f: &F, a: T, b: T, panels: usize) -> (Complex<T>, T)
    where
        F: Fn(T) -> Complex<T>,
    {
        let width = (b - a) / T::from_index(panels);
        let half = width * T::half();
        let mut sum = Complex::new(T::zero(), T::zero());
        let mut abs_sum = T::zero();
        for p in 0..panels {
            let mid = a + (T::from_index(p) + T::half()) * width;
            for (&x, &w) in self.nodes.iter().zip(&self.weights) {
                let v = f(mid + half * x);
                sum = sum + v * (w * half);
                abs_sum = abs_sum + v.norm() * w * half;
            }
        }
        (sum, abs_sum)
    }
}

/// `(P_m(x), P_m'(x))` by the three-term recurrence.
fn legendre(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Settings for [`integrate_oscillatory`].
#[derive(Debug, Clone, Copy)]
pub struct OscillatoryRule<T> {
    /// Relative stopping tolerance.
    pub tol: T,
    /// Initial panel width, chosen to resolve the fastest oscillation.
    pub panel_width: T,
    /// Refinement gives up beyond this many panels.
    pub max_panels: usize,
}

const POINTS_PER_PANEL: usize = 16;

/// `∫_a^b f` with panels doubled until successive sums differ by at most
/// `tol·|I|`, or by no more than the round-off floor `1e3·ε·∫|f|`.
pub fn integrate_oscillatory<T, F>(f: F, a: T, b: T, rule: OscillatoryRule<T>) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(T) -> Complex<T>,
{
    if !(b > a) {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    let gl = GaussLegendre::<T>::new(POINTS_PER_PANEL);
    let start = ((b - a) / rule.panel_width).ceil().as_f64().max(1.0) as usize;
    let mut panels = start.max(1);
    let (mut prev, _) = gl.composite(&f, a, b, panels);
    let floor_factor = T::lit(1e3) * T::epsilon();
    loop {
        panels *= 2;
        let (next, abs) = gl.composite(&f, a, b, panels);
        let change = (next - prev).norm();
        if change <= rule.tol * next.norm() || change <= floor_factor * abs {
            return Ok(next);
        }
        if panels >= rule.max_panels {
            return Err(Error::Quadrature { tol: rule.tol.as_f64(), panels, change: change.as_f64() });
        }
        prev = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let gl = GaussLegendre::<f64>::new(8);
        let total: f64 = gl.weights().iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        // degree 15 is the limit of an 8-point rule
        let exact = 2.0 / 15.0;
        let approx: f64 = gl.nodes().iter().zip(gl.weights()).map(|(x, w)| w * x.powi(14)).sum();
        assert!((approx - exact).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_fourier_integral() {
        // ∫_0^{10} e^{i 7 x} dx = (e^{70 i} − 1)/(7i)
        let rule = OscillatoryRule { tol: 1e-10, panel_width: 0.2, max_panels: 1 << 14 };
        let got = integrate_oscillatory(|x: f64| Complex::new(0.0, 7.0 * x).exp(), 0.0, 10.0, rule).unwrap();
        let exact = (Complex::new(0.0, 70.0).exp() - 1.0) / Complex::new(0.0, 7.0);
        assert!((got - exact).norm() < 1e-12);
    }

    #[test]
    fn refinement_cap_reports_failure() {
        let rule = OscillatoryRule { tol: 1e-14, panel_width: 1.0, max_panels: 4 };
        let out = integrate_oscillatory(|x: f64| Complex::new((1e3 * x).sin(), 0.0) + 1.0, 0.0, 3.0, rule);
        assert!(matches!(out, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn empty_interval_is_zero() {
        let rule = OscillatoryRule { tol: 1e-8, panel_width: 1.0, max_panels: 16 };
        assert_eq!(integrate_oscillatory(|_: f64| Complex::new(1.0, 0.0), 1.0, 1.0, rule).unwrap().norm(), 0.0);
    }
}
