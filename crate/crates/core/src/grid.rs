//! Radial meshes, field containers and quadrature norms.
//!
//! The exterior of the unit ball is truncated to `r ∈ [1, 1 + L]` and
//! sampled on the uniform offset grid `ρ_j = j·L/n`, `r_j = 1 + ρ_j`. Fields
//! store only the `n − 1` interior values; both endpoints are Dirichlet zeros
//! by representation. All integrals use the radial measure `s² ds` without
//! the `4π` angular factor.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform truncated radial mesh on `[1, 1 + L]` with `n` subintervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialGrid<T> {
    length: T,
    intervals: usize,
}

impl<T: Real> RadialGrid<T> {
    /// Builds a grid. `n` must be a power of two no smaller than 8.
    pub fn new(length: T, intervals: usize) -> Result<Self> {
        if !(length.is_finite() && length > T::zero()) {
            return Err(Error::InvalidGrid(format!("length must be positive and finite, got {length}")));
        }
        if intervals < 8 || !intervals.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("interval count must be a power of two >= 8, got {intervals}")));
        }
        Ok(Self { length, intervals })
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    /// Number of stored (interior) nodes, `n − 1`.
    pub fn interior_len(&self) -> usize {
        self.intervals - 1
    }

    /// Mesh width `dρ = L / n`.
    pub fn spacing(&self) -> T {
        self.length / T::from_index(self.intervals)
    }

    /// Offset `ρ_j = j·dρ` of node `j` (0 ≤ j ≤ n).
    pub fn offset(&self, j: usize) -> T {
        T::from_index(j) * self.spacing()
    }

    /// Radius `r_j = 1 + ρ_j`.
    pub fn radius(&self, j: usize) -> T {
        T::one() + self.offset(j)
    }

    /// Radii of the interior nodes `r_1 .. r_{n−1}`.
    pub fn radii(&self) -> Vec<T> {
        (1..self.intervals).map(|j| self.radius(j)).collect()
    }

    /// Offsets of the interior nodes `ρ_1 .. ρ_{n−1}`.
    pub fn offsets(&self) -> Vec<T> {
        (1..self.intervals).map(|j| self.offset(j)).collect()
    }

    /// Dual frequency `λ_k = kπ/L`.
    pub fn frequency(&self, k: usize) -> T {
        T::from_index(k) * T::PI() / self.length
    }

    /// Frequencies `λ_1 .. λ_{n−1}` carried by a [`SpectralField`].
    pub fn frequencies(&self) -> Vec<T> {
        (1..self.intervals).map(|k| self.frequency(k)).collect()
    }

    pub fn min_frequency(&self) -> T {
        self.frequency(1)
    }

    pub fn max_frequency(&self) -> T {
        self.frequency(self.intervals - 1)
    }

    /// Fails unless `support + horizon + 1 ≤ L`, the condition under which
    /// finite propagation speed makes the outer wall invisible.
    pub fn check_truncation(&self, support: T, horizon: T) -> Result<()> {
        if support + horizon.abs() + T::one() <= self.length {
            Ok(())
        } else {
            Err(Error::TruncationUnsafe {
                support: support.as_f64(),
                horizon: horizon.as_f64(),
                length: self.length.as_f64(),
            })
        }
    }
}

/// Real samples of a radial function at the interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField<T> {
    grid: RadialGrid<T>,
    values: Vec<T>,
}

impl<T: Real> RadialField<T> {
    pub fn new(grid: RadialGrid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.interior_len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} interior values, got {}",
                grid.interior_len(),
                values.len()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("field value at node {}", j + 1)));
        }
        Ok(Self { grid, values })
    }

    /// Caller guarantees the length; finiteness is not checked.
    pub(crate) fn from_raw(grid: RadialGrid<T>, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), grid.interior_len());
        Self { grid, values }
    }

    /// Samples `f(r)` at the interior radii.
    pub fn from_fn(grid: RadialGrid<T>, f: impl Fn(T) -> T) -> Result<Self> {
        let values = (1..grid.intervals()).map(|j| f(grid.radius(j))).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: RadialGrid<T>) -> Self {
        Self { grid, values: vec![T::zero(); grid.interior_len()] }
    }

    pub fn grid(&self) -> &RadialGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, c: T) -> Self {
        Self::from_raw(self.grid, self.values.iter().map(|&v| c * v).collect())
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Result<Self> {
        self.ensure_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&x, &y)| a * x + b * y).collect();
        Ok(Self::from_raw(self.grid, values))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(T::one(), other, T::one())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(T::one(), other, -T::one())
    }

    /// Largest node-wise difference `max_j |f_j − g_j|`.
    pub fn max_diff(&self, other: &Self) -> Result<T> {
        self.ensure_same_grid(other)?;
        Ok(self.values.iter().zip(&other.values).fold(T::zero(), |m, (&x, &y)| m.max((x - y).abs())))
    }

    /// Largest offset `ρ_j` where `|f_j|` exceeds `rel_tol · max|f|`; zero for
    /// the zero field.
    pub fn support_radius(&self, rel_tol: T) -> T {
        let cut = rel_tol * self.max_abs();
        match self.values.iter().rposition(|v| v.abs() > cut) {
            Some(i) if !self.is_zero() => self.grid.offset(i + 1),
            _ => T::zero(),
        }
    }

    /// `L^q(s² ds)` norm; see [`lq_norm`].
    pub fn lq_norm(&self, q: T) -> Result<T> {
        lq_norm(self, q)
    }

    pub fn l2_norm(&self) -> T {
        weighted_power_sum(&self.grid, &self.values, 2).sqrt()
    }

    pub(crate) fn ensure_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// `Σ_j |f_j|^p r_j² dρ` for an integer power, avoiding `powf`.
pub(crate) fn weighted_power_sum<T: Real>(grid: &RadialGrid<T>, values: &[T], p: i32) -> T {
    let h = grid.spacing();
    let sum: T = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let r = grid.radius(i + 1);
            v.abs().powi(p) * r * r
        })
        .sum();
    sum * h
}

/// `L^q([1, 1+L], s² ds)` norm by the trapezoid rule with zero endpoints;
/// `q = ∞` gives the node maximum.
pub fn lq_norm<T: Real>(f: &RadialField<T>, q: T) -> Result<T> {
    lq_norm_values(&f.grid, &f.values, q)
}

pub(crate) fn lq_norm_values<T: Real>(grid: &RadialGrid<T>, values: &[T], q: T) -> Result<T> {
    if q.is_nan() || q < T::one() {
        return Err(Error::InvalidArgument(format!("exponent q must satisfy q >= 1, got {q}")));
    }
    if q.is_infinite() {
        return Ok(values.iter().fold(T::zero(), |m, v| m.max(v.abs())));
    }
    if q == T::two() {
        return Ok(weighted_power_sum(grid, values, 2).sqrt());
    }
    let h = grid.spacing();
    let max = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if max.is_zero() {
        return Ok(T::zero());
    }
    // scale by the maximum so large exponents do not overflow
    let sum: T = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let r = grid.radius(i + 1);
            (v.abs() / max).powf(q) * r * r
        })
        .sum();
    Ok(max * (sum * h).powf(q.recip()))
}

/// A complex radial field, stored as real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexRadialField<T> {
    pub re: RadialField<T>,
    pub im: RadialField<T>,
}

impl<T: Real> ComplexRadialField<T> {
    pub fn new(re: RadialField<T>, im: RadialField<T>) -> Result<Self> {
        re.ensure_same_grid(&im)?;
        Ok(Self { re, im })
    }

    pub fn grid(&self) -> &RadialGrid<T> {
        self.re.grid()
    }

    /// Node-wise modulus `|f_j|`.
    pub fn modulus(&self) -> RadialField<T> {
        let values = self.re.values.iter().zip(&self.im.values).map(|(&a, &b)| a.hypot(b)).collect();
        RadialField::from_raw(self.re.grid, values)
    }

    pub fn l2_norm(&self) -> T {
        (self.re.l2_norm().powi(2) + self.im.l2_norm().powi(2)).sqrt()
    }

    /// `max_j |f_j − g_j|` with the complex modulus.
    pub fn max_diff(&self, other: &Self) -> Result<T> {
        self.re.ensure_same_grid(&other.re)?;
        let it = self.re.values.iter().zip(&self.im.values).zip(other.re.values.iter().zip(&other.im.values));
        Ok(it.fold(T::zero(), |m, ((&a, &b), (&c, &d))| m.max((a - c).hypot(b - d))))
    }
}

/// Distorted Fourier coefficients `F_k` at `λ_k = kπ/L`, `k = 1..n−1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField<T> {
    grid: RadialGrid<T>,
    coeffs: Vec<T>,
}

impl<T: Real> SpectralField<T> {
    pub fn new(grid: RadialGrid<T>, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != grid.interior_len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} coefficients, got {}",
                grid.interior_len(),
                coeffs.len()
            )));
        }
        if let Some(k) = coeffs.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("coefficient at k = {}", k + 1)));
        }
        Ok(Self { grid, coeffs })
    }

    pub(crate) fn from_raw(grid: RadialGrid<T>, coeffs: Vec<T>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.interior_len());
        Self { grid, coeffs }
    }

    /// Coefficients sampled from a function of the frequency.
    pub fn from_fn(grid: RadialGrid<T>, f: impl Fn(T) -> T) -> Result<Self> {
        let coeffs = (1..grid.intervals()).map(|k| f(grid.frequency(k))).collect();
        Self::new(grid, coeffs)
    }

    pub fn zeros(grid: RadialGrid<T>) -> Self {
        Self { grid, coeffs: vec![T::zero(); grid.interior_len()] }
    }

    pub fn grid(&self) -> &RadialGrid<T> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Pointwise product with a frequency symbol.
    pub fn multiplied(&self, m: impl Fn(T) -> T) -> Result<Self> {
        let coeffs = self.coeffs.iter().enumerate().map(|(i, &c)| m(self.grid.frequency(i + 1)) * c).collect();
        Self::new(self.grid, coeffs)
    }

    /// `((π/L) Σ_k F_k²)^{1/2}`, equal to the physical `L²` norm.
    pub fn l2_norm(&self) -> T {
        self.sobolev_norm(T::zero())
    }

    /// `((π/L) Σ_k λ_k^{2s} F_k²)^{1/2}`.
    pub fn sobolev_norm(&self, s: T) -> T {
        let two_s = T::two() * s;
        let sum: T = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let weight = if s.is_zero() { T::one() } else { self.grid.frequency(i + 1).powf(two_s) };
                weight * c * c
            })
            .sum();
        (sum * T::PI() / self.grid.length()).sqrt()
    }
}

/// `(u(t), ∂_t u(t))` at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState<T> {
    pub t: T,
    pub u: RadialField<T>,
    pub ut: RadialField<T>,
}

impl<T: Real> WaveState<T> {
    pub fn new(t: T, u: RadialField<T>, ut: RadialField<T>) -> Result<Self> {
        u.ensure_same_grid(&ut)?;
        Ok(Self { t, u, ut })
    }

    pub fn zeros(grid: RadialGrid<T>) -> Self {
        Self { t: T::zero(), u: RadialField::zeros(grid), ut: RadialField::zeros(grid) }
    }

    pub fn grid(&self) -> &RadialGrid<T> {
        self.u.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.u.values.iter().chain(&self.ut.values).all(|v| v.is_finite())
    }
}

/// Time-ordered snapshots on a single grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    states: Vec<WaveState<T>>,
    dt_sample: T,
}

impl<T: Real> Trajectory<T> {
    pub fn new(dt_sample: T) -> Self {
        Self { states: Vec::new(), dt_sample }
    }

    /// Appends a snapshot; times must increase strictly and the grid must
    /// match earlier snapshots.
    pub fn push(&mut self, state: WaveState<T>) -> Result<()> {
        if let Some(last) = self.states.last() {
            if state.grid() != last.grid() {
                return Err(Error::GridMismatch);
            }
            if !(state.t > last.t) {
                return Err(Error::InvalidArgument(format!(
                    "trajectory times must increase: {} after {}",
                    state.t, last.t
                )));
            }
        }
        self.states.push(state);
        Ok(())
    }

    pub fn states(&self) -> &[WaveState<T>] {
        &self.states
    }

    pub fn times(&self) -> Vec<T> {
        self.states.iter().map(|s| s.t).collect()
    }

    pub fn dt_sample(&self) -> T {
        self.dt_sample
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn first(&self) -> Option<&WaveState<T>> {
        self.states.first()
    }

    pub fn last(&self) -> Option<&WaveState<T>> {
        self.states.last()
    }

    pub fn grid(&self) -> Option<&RadialGrid<T>> {
        self.states.first().map(|s| s.grid())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spacing_is_exact_power_of_two() {
        let g = RadialGrid::<f64>::new(32.0, 4096).unwrap();
        assert_eq!(g.spacing(), 0.0078125);
        assert_eq!(g.spacing() * 4096.0, 32.0);
    }

    #[test]
    fn unit_grid_nodes() {
        let g = RadialGrid::<f64>::new(1.0, 8).unwrap();
        let nodes: Vec<f64> = (0..=8).map(|j| g.radius(j)).collect();
        assert_eq!(nodes, vec![1.0, 1.125, 1.25, 1.375, 1.5, 1.625, 1.75, 1.875, 2.0]);
        assert_eq!(g.interior_len(), 7);
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(RadialGrid::<f64>::new(-1.0, 8).is_err());
        assert!(RadialGrid::<f64>::new(0.0, 8).is_err());
        assert!(RadialGrid::<f64>::new(f64::NAN, 8).is_err());
        assert!(RadialGrid::<f64>::new(1.0, 12).is_err());
        assert!(RadialGrid::<f64>::new(1.0, 4).is_err());
    }

    #[test]
    fn grid_is_deterministic() {
        let a = RadialGrid::<f64>::new(32.0, 4096).unwrap();
        let b = RadialGrid::<f64>::new(32.0, 4096).unwrap();
        assert_eq!(a, b);
        let ra = a.radii();
        let rb = b.radii();
        assert!(ra.iter().zip(&rb).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn zero_field_norms() {
        let g = RadialGrid::<f64>::new(4.0, 64).unwrap();
        let z = RadialField::zeros(g);
        assert_eq!(lq_norm(&z, 2.0).unwrap(), 0.0);
        assert_eq!(lq_norm(&z, 3.5).unwrap(), 0.0);
        assert_eq!(lq_norm(&z, f64::INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn lq_norm_rejects_small_exponent() {
        let g = RadialGrid::<f64>::new(4.0, 64).unwrap();
        let z = RadialField::zeros(g);
        assert!(lq_norm(&z, 0.5).is_err());
        assert!(lq_norm(&z, f64::NAN).is_err());
    }

    #[test]
    fn rho_exp_profile_has_half_norm() {
        // ∫₀^∞ ρ² e^{−2ρ} dρ = 1/4
        let g = RadialGrid::<f64>::new(32.0, 4096).unwrap();
        let f = RadialField::from_fn(g, |r: f64| (r - 1.0) * (-(r - 1.0)).exp() / r).unwrap();
        let n2 = lq_norm(&f, 2.0).unwrap();
        assert!((n2 - 0.5).abs() < 1e-6, "{n2}");
    }

    #[test]
    fn field_rejects_non_finite_and_wrong_length() {
        let g = RadialGrid::<f64>::new(1.0, 8).unwrap();
        assert!(RadialField::new(g, vec![0.0; 6]).is_err());
        let mut v = vec![0.0; 7];
        v[3] = f64::INFINITY;
        assert!(matches!(RadialField::new(g, v), Err(Error::NonFinite(_))));
    }

    #[test]
    fn trajectory_requires_increasing_times() {
        let g = RadialGrid::<f64>::new(1.0, 8).unwrap();
        let mut traj = Trajectory::new(0.1);
        traj.push(WaveState::zeros(g)).unwrap();
        assert!(traj.push(WaveState::zeros(g)).is_err());
        let mut later = WaveState::zeros(g);
        later.t = 0.1;
        traj.push(later).unwrap();
        let other = RadialGrid::<f64>::new(2.0, 8).unwrap();
        let mut wrong = WaveState::zeros(other);
        wrong.t = 0.2;
        assert_eq!(traj.push(wrong), Err(Error::GridMismatch));
    }

    #[test]
    fn support_radius_finds_last_significant_node() {
        let g = RadialGrid::<f64>::new(8.0, 64).unwrap();
        let f = RadialField::from_fn(g, |r: f64| if r < 3.0 { (r - 1.0) * (3.0 - r) } else { 0.0 }).unwrap();
        let rho = f.support_radius(1e-12);
        assert!(rho < 2.0 && rho > 1.8, "{rho}");
    }

    #[test]
    fn infinity_norm_is_node_maximum() {
        let g = RadialGrid::<f64>::new(1.0, 8).unwrap();
        let f = RadialField::new(g, vec![0.0, -3.0, 1.0, 2.0, 0.0, 0.5, 0.0]).unwrap();
        assert_eq!(lq_norm(&f, f64::INFINITY).unwrap(), 3.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn lq_norm_is_absolutely_homogeneous(
                values in proptest::collection::vec(-10.0f64..10.0, 63),
                c in -50.0f64..50.0,
                q in prop_oneof![Just(1.0), Just(2.0), 1.0f64..8.0, Just(f64::INFINITY)],
            ) {
                let g = RadialGrid::<f64>::new(3.0, 64).unwrap();
                let f = RadialField::new(g, values).unwrap();
                let lhs = lq_norm(&f.scaled(c), q).unwrap();
                let rhs = c.abs() * lq_norm(&f, q).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1e-300) + 1e-300);
            }
        }
    }
}
