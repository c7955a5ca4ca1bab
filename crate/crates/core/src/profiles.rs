//! Test data used across the probes, the CLI and the acceptance suite.

use crate::calculus::SmoothCutoff;
use crate::error::Result;
use crate::grid::{RadialField, RadialGrid, SpectralField};
use crate::scalar::Real;
use crate::transform::inverse;

/// `A·exp(−((ρ − ρ₀)/w)²)`.
pub fn gaussian_bump<T: Real>(grid: RadialGrid<T>, amplitude: T, center: T, width: T) -> Result<RadialField<T>> {
    RadialField::from_fn(grid, |r| {
        let x = (r - T::one() - center) / width;
        amplitude * (-x * x).exp()
    })
}

/// `ρ·A·exp(−((ρ − ρ₀)/w)²)`, vanishing linearly at the boundary.
pub fn weighted_gaussian<T: Real>(grid: RadialGrid<T>, amplitude: T, center: T, width: T) -> Result<RadialField<T>> {
    RadialField::from_fn(grid, |r| {
        let rho = r - T::one();
        let x = (rho - center) / width;
        amplitude * rho * (-x * x).exp()
    })
}

/// `(r − 1)e^{−(r−1)}/r`, with `‖f‖₂² = 1/4`.
pub fn rho_exp<T: Real>(grid: RadialGrid<T>) -> Result<RadialField<T>> {
    RadialField::from_fn(grid, |r| {
        let rho = r - T::one();
        rho * (-rho).exp() / r
    })
}

/// `sin(π(r−1))/r` on `1 ≤ r ≤ 2`, zero beyond.
pub fn sine_arch<T: Real>(grid: RadialGrid<T>) -> Result<RadialField<T>> {
    RadialField::from_fn(grid, |r| {
        let rho = r - T::one();
        if rho <= T::one() {
            (T::PI() * rho).sin() / r
        } else {
            T::zero()
        }
    })
}

/// Spectrally defined shell at offset `ρ₀` with coefficients
/// `A·sin(λρ₀)(1 + λ²)^{−(1+β)/2}`; it lies in `Ḣ^s` exactly for `s < β + 1/2`.
pub fn power_law_shell<T: Real>(grid: RadialGrid<T>, amplitude: T, center: T, beta: T) -> Result<RadialField<T>> {
    let decay = -(T::one() + beta) * T::half();
    let spec = SpectralField::from_fn(grid, |l| amplitude * (l * center).sin() * (T::one() + l * l).powf(decay))?;
    Ok(inverse(&spec))
}

/// The single block with coefficients `λψ_N(λ)`, `N = 2^exponent`.
pub fn boundary_dipole_block<T: Real>(grid: RadialGrid<T>, exponent: i32) -> Result<RadialField<T>> {
    let n = T::two().powi(exponent);
    let spec = SpectralField::from_fn(grid, |l| l * SmoothCutoff.psi(l, n))?;
    Ok(inverse(&spec))
}

/// Discrete eigenfunction at grid frequency `λ_k`.
pub fn eigen_profile<T: Real>(grid: RadialGrid<T>, k: usize) -> Result<RadialField<T>> {
    let mut coeffs = vec![T::zero(); grid.interior_len()];
    if (1..grid.intervals()).contains(&k) {
        coeffs[k - 1] = T::one();
    }
    Ok(inverse(&SpectralField::new(grid, coeffs)?))
}

/// Rescales a field to unit `L¹(s² ds)` norm; the zero field is returned
/// unchanged.
pub fn l1_normalized<T: Real>(f: &RadialField<T>) -> Result<RadialField<T>> {
    let n = f.lq_norm(T::one())?;
    Ok(if n.is_zero() { f.clone() } else { f.scaled(n.recip()) })
}
