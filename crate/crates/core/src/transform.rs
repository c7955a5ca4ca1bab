//! Distorted Fourier transform for radial functions on the exterior of the
//! unit ball with Dirichlet data on `|x| = 1`.
//!
//! The generalized eigenfunctions of the Dirichlet Laplacian are
//! `e_λ(r) = sin(λ(r − 1))/r`, so with `g = r·f` the transform is a sine
//! transform in the offset `ρ = r − 1`. On the grid
//!
//! ```text
//! F_k = √(2/π) · dρ  · Σ_j sin(λ_k ρ_j) · r_j f_j
//! f_j = √(2/π) · π/L · Σ_k sin(λ_k ρ_j) · F_k / r_j
//! ```
//!
//! which is an exact inverse pair, and `(π/L) Σ_k F_k²` equals the grid
//! `L²(s² ds)` norm exactly.

use crate::dst::SineTransform;
use crate::error::{Error, Result};
use crate::grid::{weighted_power_sum, RadialField, RadialGrid, SpectralField};
use crate::scalar::Real;

/// Planned forward/inverse transform for one grid.
#[derive(Debug, Clone)]
pub struct DistortedFourier<T: Real> {
    grid: RadialGrid<T>,
    sine: SineTransform<T>,
    radii: Vec<T>,
    frequencies: Vec<T>,
    forward_scale: T,
    inverse_scale: T,
}

impl<T: Real> DistortedFourier<T> {
    pub fn new(grid: RadialGrid<T>) -> Self {
        let norm = (T::two() / T::PI()).sqrt();
        Self {
            grid,
            sine: SineTransform::new(grid.intervals()),
            radii: grid.radii(),
            frequencies: grid.frequencies(),
            forward_scale: norm * grid.spacing(),
            inverse_scale: norm * T::PI() / grid.length(),
        }
    }

    pub fn grid(&self) -> &RadialGrid<T> {
        &self.grid
    }

    pub fn frequencies(&self) -> &[T] {
        &self.frequencies
    }

    pub fn radii(&self) -> &[T] {
        &self.radii
    }

    fn check(&self, grid: &RadialGrid<T>) -> Result<()> {
        if *grid == self.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub(crate) fn forward_values(&self, f: &[T]) -> Vec<T> {
        let g: Vec<T> = f.iter().zip(&self.radii).map(|(&v, &r)| v * r).collect();
        let mut s = self.sine.apply(&g);
        s.iter_mut().for_each(|c| *c = *c * self.forward_scale);
        s
    }

    pub(crate) fn forward_pair_values(&self, a: &[T], b: &[T]) -> (Vec<T>, Vec<T>) {
        let ga: Vec<T> = a.iter().zip(&self.radii).map(|(&v, &r)| v * r).collect();
        let gb: Vec<T> = b.iter().zip(&self.radii).map(|(&v, &r)| v * r).collect();
        let (mut sa, mut sb) = self.sine.apply_pair(&ga, &gb);
        for c in sa.iter_mut().chain(sb.iter_mut()) {
            *c = *c * self.forward_scale;
        }
        (sa, sb)
    }

    pub(crate) fn inverse_values(&self, coeffs: &[T]) -> Vec<T> {
        let s = self.sine.apply(coeffs);
        s.iter().zip(&self.radii).map(|(&v, &r)| v * self.inverse_scale / r).collect()
    }

    pub(crate) fn inverse_pair_values(&self, a: &[T], b: &[T]) -> (Vec<T>, Vec<T>) {
        let (sa, sb) = self.sine.apply_pair(a, b);
        let scale =
            |s: Vec<T>| -> Vec<T> { s.iter().zip(&self.radii).map(|(&v, &r)| v * self.inverse_scale / r).collect() };
        (scale(sa), scale(sb))
    }

    pub fn forward(&self, f: &RadialField<T>) -> Result<SpectralField<T>> {
        self.check(f.grid())?;
        Ok(SpectralField::from_raw(self.grid, self.forward_values(f.values())))
    }

    pub fn inverse(&self, spectrum: &SpectralField<T>) -> Result<RadialField<T>> {
        self.check(spectrum.grid())?;
        Ok(RadialField::from_raw(self.grid, self.inverse_values(spectrum.coeffs())))
    }

    /// Transforms two fields with one FFT.
    pub fn forward_pair(&self, a: &RadialField<T>, b: &RadialField<T>) -> Result<(SpectralField<T>, SpectralField<T>)> {
        self.check(a.grid())?;
        self.check(b.grid())?;
        let (fa, fb) = self.forward_pair_values(a.values(), b.values());
        Ok((SpectralField::from_raw(self.grid, fa), SpectralField::from_raw(self.grid, fb)))
    }

    pub fn inverse_pair(&self, a: &SpectralField<T>, b: &SpectralField<T>) -> Result<(RadialField<T>, RadialField<T>)> {
        self.check(a.grid())?;
        self.check(b.grid())?;
        let (fa, fb) = self.inverse_pair_values(a.coeffs(), b.coeffs());
        Ok((RadialField::from_raw(self.grid, fa), RadialField::from_raw(self.grid, fb)))
    }

    /// `|‖f‖² − (π/L)Σ F_k²| / ‖f‖²`, zero for the zero field.
    pub fn parseval_residual(&self, f: &RadialField<T>) -> Result<T> {
        let spectrum = self.forward(f)?;
        let physical = weighted_power_sum(&self.grid, f.values(), 2);
        if physical.is_zero() {
            return Ok(T::zero());
        }
        let spectral = spectrum.l2_norm().powi(2);
        Ok((physical - spectral).abs() / physical)
    }

    /// `m(√−Δ) f` through the diagonal functional calculus.
    pub fn apply_symbol(&self, f: &RadialField<T>, m: impl Fn(T) -> T) -> Result<RadialField<T>> {
        self.check(f.grid())?;
        let mut coeffs = self.forward_values(f.values());
        self.multiply_symbol(&mut coeffs, m)?;
        Ok(RadialField::from_raw(self.grid, self.inverse_values(&coeffs)))
    }

    pub(crate) fn multiply_symbol(&self, coeffs: &mut [T], m: impl Fn(T) -> T) -> Result<()> {
        for (c, &lambda) in coeffs.iter_mut().zip(&self.frequencies) {
            let w = m(lambda);
            if !w.is_finite() {
                return Err(Error::NonFinite(format!("symbol value at λ = {lambda}")));
            }
            *c = *c * w;
        }
        Ok(())
    }
}

/// Forward distorted Fourier transform of a grid field.
pub fn forward<T: Real>(f: &RadialField<T>) -> SpectralField<T> {
    let engine = DistortedFourier::new(*f.grid());
    SpectralField::from_raw(*f.grid(), engine.forward_values(f.values()))
}

/// Inverse transform; exact inverse of [`forward`] up to round-off.
pub fn inverse<T: Real>(spectrum: &SpectralField<T>) -> RadialField<T> {
    let engine = DistortedFourier::new(*spectrum.grid());
    RadialField::from_raw(*spectrum.grid(), engine.inverse_values(spectrum.coeffs()))
}

/// Relative mismatch between the physical and spectral `L²` norms.
pub fn parseval_residual<T: Real>(f: &RadialField<T>) -> T {
    DistortedFourier::new(*f.grid()).parseval_residual(f).expect("grid matches its own engine")
}

/// `F_D⁻¹(m · F_D f)`. Fails if `m` is not finite at some grid frequency.
pub fn apply_symbol<T: Real>(f: &RadialField<T>, m: impl Fn(T) -> T) -> Result<RadialField<T>> {
    DistortedFourier::new(*f.grid()).apply_symbol(f, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn rho_exp(grid: RadialGrid<f64>) -> RadialField<f64> {
        RadialField::from_fn(grid, |r| (r - 1.0) * (-(r - 1.0)).exp() / r).unwrap()
    }

    #[test]
    fn zero_in_zero_out() {
        let g = RadialGrid::<f64>::new(8.0, 256).unwrap();
        assert!(forward(&RadialField::zeros(g)).coeffs().iter().all(|c| *c == 0.0));
        assert!(inverse(&SpectralField::zeros(g)).values().iter().all(|c| *c == 0.0));
        assert_eq!(parseval_residual(&RadialField::zeros(g)), 0.0);
    }

    #[test]
    fn rho_exp_closed_form_near_unit_frequency() {
        // ∫₀^∞ ρ e^{−ρ} sin(λρ) dρ = 2λ/(1+λ²)²
        let g = RadialGrid::<f64>::new(32.0, 4096).unwrap();
        let spec = forward(&rho_exp(g));
        let k = (1.0 * 32.0 / PI).round() as usize;
        let lambda = g.frequency(k);
        let exact = (2.0 / PI).sqrt() * 2.0 * lambda / (1.0 + lambda * lambda).powi(2);
        assert!((spec.coeffs()[k - 1] - exact).abs() < 1e-5);
        // the value at λ = 1 itself
        assert!(((2.0 / PI).sqrt() / 2.0 - 0.398942).abs() < 1e-6);
    }

    #[test]
    fn sine_arch_at_pi() {
        // f = sin(π(r−1))/r on [1,2]: F_D f(π) = √(2/π)·∫₀¹ sin²(πρ) dρ = √(2/π)/2.
        // L = 32 puts λ = π on the grid at k = 32.
        let g = RadialGrid::<f64>::new(32.0, 4096).unwrap();
        let f = RadialField::from_fn(g, |r| if r <= 2.0 { (PI * (r - 1.0)).sin() / r } else { 0.0 }).unwrap();
        let spec = forward(&f);
        let k = 32;
        assert!((g.frequency(k) - PI).abs() < 1e-14);
        let exact = (2.0 / PI).sqrt() * 0.5;
        assert!((spec.coeffs()[k - 1] - exact).abs() < 1e-5, "{}", spec.coeffs()[k - 1]);
    }

    #[test]
    fn single_coefficient_inverts_to_eigen_profile() {
        let g = RadialGrid::<f64>::new(4.0, 64).unwrap();
        let k = 5;
        let mut coeffs = vec![0.0; 63];
        coeffs[k - 1] = 1.0;
        let f = inverse(&SpectralField::new(g, coeffs).unwrap());
        let lambda = g.frequency(k);
        for j in 1..64 {
            let rho = g.offset(j);
            let expect = (2.0 / PI).sqrt() * (PI / 4.0) * (lambda * rho).sin() / (1.0 + rho);
            assert!((f.values()[j - 1] - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn parseval_of_rho_exp_is_a_quarter_both_ways() {
        let g = RadialGrid::<f64>::new(32.0, 4096).unwrap();
        let f = rho_exp(g);
        let spec = forward(&f);
        assert!((f.l2_norm().powi(2) - 0.25).abs() < 1e-6);
        assert!((spec.l2_norm().powi(2) - 0.25).abs() < 1e-6);
        assert!(parseval_residual(&f) < 1e-12);
    }

    #[test]
    fn eigenrelation_under_lambda_squared() {
        let g = RadialGrid::<f64>::new(4.0, 64).unwrap();
        let k = 9;
        let profile = inverse(
            &SpectralField::from_fn(g, |l| if (l - g.frequency(k)).abs() < 1e-12 { 1.0 } else { 0.0 }).unwrap(),
        );
        let lambda = g.frequency(k);
        let out = apply_symbol(&profile, |l| l * l).unwrap();
        let expect = profile.scaled(lambda * lambda);
        assert!(out.max_diff(&expect).unwrap() < 1e-12 * expect.max_abs());
    }

    #[test]
    fn identity_symbol_and_non_finite_rejection() {
        let g = RadialGrid::<f64>::new(8.0, 128).unwrap();
        let f = rho_exp(g);
        let same = apply_symbol(&f, |_| 1.0).unwrap();
        assert!(same.max_diff(&f).unwrap() < 1e-13);
        let bad = apply_symbol(&f, |l| if l > 10.0 { f64::INFINITY } else { 1.0 });
        assert!(matches!(bad, Err(Error::NonFinite(_))));
    }

    #[test]
    fn engine_rejects_foreign_grid() {
        let a = DistortedFourier::new(RadialGrid::<f64>::new(8.0, 128).unwrap());
        let f = RadialField::zeros(RadialGrid::<f64>::new(8.0, 256).unwrap());
        assert_eq!(a.forward(&f).unwrap_err(), Error::GridMismatch);
    }

    #[test]
    fn refinement_improves_closed_form_match() {
        fn max_err(l: f64, n: usize) -> f64 {
            let g = RadialGrid::new(l, n).unwrap();
            let spec = forward(&rho_exp(g));
            (1..n)
                .map(|k| (k, g.frequency(k)))
                .take_while(|(_, lam)| *lam <= 8.0)
                .map(|(k, lam)| {
                    let exact = (2.0 / PI).sqrt() * 2.0 * lam / (1.0 + lam * lam).powi(2);
                    (spec.coeffs()[k - 1] - exact).abs()
                })
                .fold(0.0, f64::max)
        }
        let coarse = max_err(32.0, 4096);
        let fine = max_err(64.0, 16384);
        assert!(fine < coarse, "{fine} !< {coarse}");
        assert!(coarse < 1e-5);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn round_trip_and_parseval(values in proptest::collection::vec(-1e3f64..1e3, 255)) {
                let g = RadialGrid::<f64>::new(7.5, 256).unwrap();
                let f = RadialField::new(g, values).unwrap();
                let back = inverse(&forward(&f));
                let scale = f.max_abs().max(1e-300);
                prop_assert!(back.max_diff(&f).unwrap() <= 1e-12 * scale);
                if !f.is_zero() {
                    prop_assert!(parseval_residual(&f) <= 1e-12);
                }
            }

            #[test]
            fn forward_is_linear(
                a in proptest::collection::vec(-1.0f64..1.0, 127),
                b in proptest::collection::vec(-1.0f64..1.0, 127),
                ca in -5.0f64..5.0,
                cb in -5.0f64..5.0,
            ) {
                let g = RadialGrid::<f64>::new(3.0, 128).unwrap();
                let fa = RadialField::new(g, a).unwrap();
                let fb = RadialField::new(g, b).unwrap();
                let lhs = forward(&fa.combine(ca, &fb, cb).unwrap());
                let (sa, sb) = (forward(&fa), forward(&fb));
                for k in 0..127 {
                    let rhs = ca * sa.coeffs()[k] + cb * sb.coeffs()[k];
                    prop_assert!((lhs.coeffs()[k] - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()));
                }
            }

            #[test]
            fn symbols_compose_multiplicatively(
                values in proptest::collection::vec(-1.0f64..1.0, 127),
                p in 0.1f64..2.0,
            ) {
                let g = RadialGrid::<f64>::new(5.0, 128).unwrap();
                let f = RadialField::new(g, values).unwrap();
                let m1 = |l: f64| (-l / 10.0).exp();
                let m2 = move |l: f64| 1.0 / (1.0 + l.powf(p));
                let chained = apply_symbol(&apply_symbol(&f, m1).unwrap(), m2).unwrap();
                let direct = apply_symbol(&f, |l| m1(l) * m2(l)).unwrap();
                prop_assert!(chained.max_diff(&direct).unwrap() <= 1e-12 * f.max_abs().max(1e-300));
            }
        }
    }
}
