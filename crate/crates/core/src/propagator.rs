//! Exact spectral linear evolution, frequency-localized kernels, and the
//! dispersive and Strichartz probes built on them.

use num_complex::Complex;

use crate::calculus::{BlockKind, DyadicBlock, SmoothCutoff};
use crate::error::{Error, Result};
use crate::grid::{lq_norm_values, ComplexRadialField, RadialField, RadialGrid, Trajectory, WaveState};
use crate::quadrature::{integrate_oscillatory, OscillatoryRule};
use crate::scalar::Real;
use crate::transform::DistortedFourier;

/// Time/space exponents and regularities for a linear Strichartz estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibleExponents<T> {
    pub q1: T,
    pub r1: T,
    pub q2: T,
    pub r2: T,
    pub rho1: T,
    pub rho2: T,
    pub mu: T,
}

impl<T: Real> AdmissibleExponents<T> {
    /// Validates the exponents.
    ///
    /// Each pair needs `2 ≤ q, r`, finite `r`, and either `1/q + 1/r ≤ 1/2`
    /// or the radial endpoint case `q = 2, r > 4`. The scaling relations
    /// `ρ₁ + 3(1/2 − 1/r₁) − 1/q₁ = μ` and `ρ₂ + 3(1/2 − 1/r₂) − 1/q₂ = 1 − μ`
    /// must hold to `1e-12`.
    pub fn new(q1: T, r1: T, q2: T, r2: T, rho1: T, rho2: T, mu: T) -> Result<Self> {
        Self::check_pair(q1, r1)?;
        Self::check_pair(q2, r2)?;
        let tol = T::lit(1e-12);
        let gap1 = rho1 + Self::gap(q1, r1) - mu;
        let gap2 = rho2 + Self::gap(q2, r2) - (T::one() - mu);
        if gap1.abs() > tol || gap2.abs() > tol {
            return Err(Error::InvalidArgument(format!(
                "scaling relations violated (residuals {:e}, {:e})",
                gap1.as_f64(),
                gap2.as_f64()
            )));
        }
        Ok(Self { q1, r1, q2, r2, rho1, rho2, mu })
    }

    /// The same pair and regularity on both sides with `μ = 1/2`.
    pub fn symmetric(q: T, r: T, rho: T) -> Result<Self> {
        Self::new(q, r, q, r, rho, rho, T::half())
    }

    fn gap(q: T, r: T) -> T {
        T::lit(3.0) * (T::half() - r.recip()) - q.recip()
    }

    fn check_pair(q: T, r: T) -> Result<()> {
        let two = T::two();
        if q.is_nan() || r.is_nan() || q < two || r < two {
            return Err(Error::InvalidArgument(format!("exponents must be at least 2, got (q, r) = ({q}, {r})")));
        }
        if r.is_infinite() {
            return Err(Error::InvalidArgument("space exponent r = ∞ is excluded".into()));
        }
        let sum = q.recip() + r.recip();
        let endpoint = q == two && r > T::lit(4.0);
        if sum <= T::half() || endpoint {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("1/q + 1/r = {sum} exceeds 1/2 for (q, r) = ({q}, {r})")))
        }
    }
}

/// Least-squares fit `y ≈ C·t^p` on log-log axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit<T> {
    pub exponent: T,
    pub constant: T,
    /// `max_i |y_i / (C t_i^p) − 1|`.
    pub residual: T,
}

impl<T: Real> DecayFit<T> {
    /// Fits positive samples; needs at least two distinct times.
    pub fn fit(ts: &[T], ys: &[T]) -> Result<Self> {
        if ts.len() != ys.len() || ts.len() < 2 {
            return Err(Error::InvalidArgument("decay fit needs at least two paired samples".into()));
        }
        if ts.iter().chain(ys).any(|v| !(v.is_finite() && *v > T::zero())) {
            return Err(Error::Degenerate("decay fit needs positive finite samples".into()));
        }
        let m = T::from_index(ts.len());
        let xs: Vec<T> = ts.iter().map(|t| t.ln()).collect();
        let ls: Vec<T> = ys.iter().map(|y| y.ln()).collect();
        let mx = xs.iter().copied().sum::<T>() / m;
        let my = ls.iter().copied().sum::<T>() / m;
        let sxx: T = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
        if sxx.is_zero() {
            return Err(Error::Degenerate("decay fit needs distinct times".into()));
        }
        let sxy: T = xs.iter().zip(&ls).map(|(&x, &y)| (x - mx) * (y - my)).sum();
        let exponent = sxy / sxx;
        let intercept = my - exponent * mx;
        let constant = intercept.exp();
        let residual = ts
            .iter()
            .zip(ys)
            .map(|(&t, &y)| (y / (constant * t.powf(exponent)) - T::one()).abs())
            .fold(T::zero(), T::max);
        Ok(Self { exponent, constant, residual })
    }
}

/// Rotates the spectral pair `(û, ∂_t û)` by time `t` in place.
pub(crate) fn rotate<T: Real>(u: &mut [T], ut: &mut [T], lambdas: &[T], t: T) {
    for ((a, b), &l) in u.iter_mut().zip(ut.iter_mut()).zip(lambdas) {
        let (s, c) = (t * l).sin_cos();
        let (x, y) = (*a, *b);
        *a = c * x + s / l * y;
        *b = -l * s * x + c * y;
    }
}

/// Precomputed `(cos tλ_k, sin tλ_k)` for a fixed step.
#[derive(Debug, Clone)]
pub(crate) struct Rotation<T> {
    cos: Vec<T>,
    sin: Vec<T>,
    lambdas: Vec<T>,
}

impl<T: Real> Rotation<T> {
    pub(crate) fn new(lambdas: &[T], t: T) -> Self {
        let (sin, cos) = lambdas.iter().map(|&l| (t * l).sin_cos()).unzip();
        Self { cos, sin, lambdas: lambdas.to_vec() }
    }

    pub(crate) fn apply(&self, u: &mut [T], ut: &mut [T]) {
        for i in 0..u.len() {
            let (c, s, l) = (self.cos[i], self.sin[i], self.lambdas[i]);
            let (x, y) = (u[i], ut[i]);
            u[i] = c * x + s / l * y;
            ut[i] = -l * s * x + c * y;
        }
    }
}

/// `U(t)f = e^{it√−Δ} f` for many `t` from one forward transform.
#[derive(Debug, Clone)]
pub struct HalfWave<T: Real> {
    engine: DistortedFourier<T>,
    spectrum: Vec<T>,
}

impl<T: Real> HalfWave<T> {
    pub fn new(f: &RadialField<T>) -> Self {
        let engine = DistortedFourier::new(*f.grid());
        let spectrum = engine.forward_values(f.values());
        Self { engine, spectrum }
    }

    pub(crate) fn from_spectrum(engine: DistortedFourier<T>, spectrum: Vec<T>) -> Self {
        Self { engine, spectrum }
    }

    pub fn grid(&self) -> &RadialGrid<T> {
        self.engine.grid()
    }

    /// Real and imaginary parts of `U(t)f` as raw node values.
    pub(crate) fn parts(&self, t: T) -> (Vec<T>, Vec<T>) {
        let mut re = Vec::with_capacity(self.spectrum.len());
        let mut im = Vec::with_capacity(self.spectrum.len());
        for (&c, &l) in self.spectrum.iter().zip(self.engine.frequencies()) {
            let (s, co) = (t * l).sin_cos();
            re.push(co * c);
            im.push(s * c);
        }
        self.engine.inverse_pair_values(&re, &im)
    }

    pub fn at(&self, t: T) -> ComplexRadialField<T> {
        let grid = *self.grid();
        let (re, im) = self.parts(t);
        ComplexRadialField { re: RadialField::from_raw(grid, re), im: RadialField::from_raw(grid, im) }
    }

    /// Node-wise `|U(t)f|`.
    pub fn modulus(&self, t: T) -> Vec<T> {
        let (re, im) = self.parts(t);
        re.iter().zip(&im).map(|(&a, &b)| a.hypot(b)).collect()
    }
}

/// `U(t)f`, computed as `cos(t√−Δ)f + i sin(t√−Δ)f`.
pub fn half_wave<T: Real>(f: &RadialField<T>, t: T) -> ComplexRadialField<T> {
    HalfWave::new(f).at(t)
}

/// Solution of the linear wave equation with data `(u0, u1)` at time `t`.
pub fn wave_propagate<T: Real>(u0: &RadialField<T>, u1: &RadialField<T>, t: T) -> Result<WaveState<T>> {
    u0.ensure_same_grid(u1)?;
    let engine = DistortedFourier::new(*u0.grid());
    let (mut a, mut b) = engine.forward_pair_values(u0.values(), u1.values());
    rotate(&mut a, &mut b, engine.frequencies(), t);
    let (u, ut) = engine.inverse_pair_values(&a, &b);
    let grid = *u0.grid();
    Ok(WaveState { t, u: RadialField::from_raw(grid, u), ut: RadialField::from_raw(grid, ut) })
}

/// `∫₀^t sin((t−s)√−Δ)/√−Δ F(s) ds` by Simpson's rule on each step of width
/// `dt`, evaluated on the spectral side.
pub fn duhamel<T, F>(source: F, t: T, dt: T) -> Result<RadialField<T>>
where
    T: Real,
    F: Fn(T) -> Result<RadialField<T>>,
{
    if !(dt > T::zero() && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {dt}")));
    }
    if !(t >= T::zero() && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("time must be non-negative, got {t}")));
    }
    let ratio = t / dt;
    let steps = ratio.round();
    if (ratio - steps).abs() > T::lit(1e-9) * ratio.max(T::one()) {
        return Err(Error::InvalidArgument(format!("step {dt} does not divide time {t}")));
    }
    let first = source(T::zero())?;
    let grid = *first.grid();
    if t.is_zero() {
        return Ok(RadialField::zeros(grid));
    }
    let engine = DistortedFourier::new(grid);
    let lambdas = engine.frequencies();
    let mut acc = vec![T::zero(); grid.interior_len()];
    let mut add = |s: T, f: &RadialField<T>, w: T| -> Result<()> {
        if f.grid() != &grid {
            return Err(Error::GridMismatch);
        }
        let spec = engine.forward_values(f.values());
        for ((a, &c), &l) in acc.iter_mut().zip(&spec).zip(lambdas) {
            *a = *a + w * ((t - s) * l).sin() / l * c;
        }
        Ok(())
    };
    let m = steps.as_f64() as usize;
    let sixth = dt / T::lit(6.0);
    add(T::zero(), &first, sixth)?;
    for i in 0..m {
        let s0 = T::from_index(i) * dt;
        let mid = s0 + dt * T::half();
        let end = T::from_index(i + 1) * dt;
        add(mid, &source(mid)?, T::lit(4.0) * sixth)?;
        let w = if i + 1 == m { sixth } else { T::two() * sixth };
        add(end, &source(end)?, w)?;
    }
    Ok(RadialField::from_raw(grid, engine.inverse_values(&acc)))
}

const KERNEL_TOL: f64 = 1e-8;
const KERNEL_MAX_PANELS: usize = 1 << 18;

fn kernel_rule<T: Real>(scale: T) -> OscillatoryRule<T> {
    OscillatoryRule {
        tol: T::lit(KERNEL_TOL),
        panel_width: T::PI() / (T::two() * scale.max(T::one())),
        max_panels: KERNEL_MAX_PANELS,
    }
}

/// `K_N(t, r; s) = (2/π) ∫ sin(λ(r−1))/r · sin(λ(s−1))/s · e^{iλt} ψ̃_N(λ) dλ`.
pub fn kernel_kn<T: Real>(n: T, t: T, r: T, s: T) -> Result<Complex<T>> {
    if !(n > T::zero() && n.is_finite()) {
        return Err(Error::InvalidArgument(format!("frequency must be positive, got {n}")));
    }
    if !(r >= T::one() && s >= T::one() && r.is_finite() && s.is_finite() && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("need r, s >= 1, got r = {r}, s = {s}")));
    }
    let c = T::two() / T::PI() / (r * s);
    let (a, b) = (r - T::one(), s - T::one());
    let integrand = |l: T| {
        let amp = c * (l * a).sin() * (l * b).sin() * SmoothCutoff.psi_tilde(l, n);
        Complex::from_polar(amp, l * t)
    };
    let rule = kernel_rule(r.max(s).max(t.abs()));
    integrate_oscillatory(integrand, n / T::lit(4.0), T::lit(4.0) * n, rule)
}

/// Whole-space radial half-wave kernel
/// `(2/π) ∫ sin(λr)/r · sin(λs)/s · e^{iλt} ψ̃₁(λ) dλ`, for `r, s > 0`.
pub fn wholespace_kernel<T: Real>(t: T, r: T, s: T) -> Result<Complex<T>> {
    if !(r > T::zero() && s > T::zero() && r.is_finite() && s.is_finite() && t.is_finite()) {
        return Err(Error::InvalidArgument(format!("need r, s > 0, got r = {r}, s = {s}")));
    }
    let c = T::two() / T::PI() / (r * s);
    let integrand = |l: T| {
        let amp = c * (l * r).sin() * (l * s).sin() * SmoothCutoff.psi_tilde(l, T::one());
        Complex::from_polar(amp, l * t)
    };
    let rule = kernel_rule(r.max(s).max(t.abs()));
    integrate_oscillatory(integrand, T::lit(0.25), T::lit(4.0), rule)
}

/// Relative support tolerance for spectrally localized probe data, whose
/// tails never vanish exactly.
pub const PROBE_SUPPORT_TOL: f64 = 1e-4;

/// Sup-norm samples `‖U(t) P̃_N f‖_∞` and their log-log decay fit.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersiveProbe<T> {
    pub times: Vec<T>,
    pub sup_norms: Vec<T>,
    pub fit: DecayFit<T>,
}

/// Measures the decay of `‖U(t) P̃_N f‖_∞` with `N = 2^exponent` over
/// `t_samples ⊂ [1, ∞)` and fits a power law.
pub fn dispersive_probe<T: Real>(exponent: i32, f: &RadialField<T>, t_samples: &[T]) -> Result<DispersiveProbe<T>> {
    if t_samples.len() < 4 {
        return Err(Error::InvalidArgument(format!("need at least 4 time samples, got {}", t_samples.len())));
    }
    if let Some(t) = t_samples.iter().find(|t| !(**t >= T::one() && t.is_finite())) {
        return Err(Error::InvalidArgument(format!("probe times must be >= 1, got {t}")));
    }
    if f.is_zero() {
        return Err(Error::Degenerate("dispersive probe of the zero field".into()));
    }
    let grid = *f.grid();
    let horizon = t_samples.iter().fold(T::zero(), |m, &t| m.max(t));
    grid.check_truncation(f.support_radius(T::lit(PROBE_SUPPORT_TOL)), horizon)?;
    let block = DyadicBlock::new(exponent, BlockKind::Tilde);
    block.check(&grid)?;
    let engine = DistortedFourier::new(grid);
    let mut spectrum = engine.forward_values(f.values());
    engine.multiply_symbol(&mut spectrum, |l| SmoothCutoff.symbol(block, l))?;
    let flow = HalfWave::from_spectrum(engine, spectrum);
    let sup_norms: Vec<T> = t_samples.iter().map(|&t| flow.modulus(t).into_iter().fold(T::zero(), T::max)).collect();
    let fit = DecayFit::fit(t_samples, &sup_norms)?;
    Ok(DispersiveProbe { times: t_samples.to_vec(), sup_norms, fit })
}

/// `(∫ a(t)^q dt)^{1/q}` by the trapezoid rule, or `sup a` for `q = ∞`.
pub fn time_norm<T: Real>(times: &[T], values: &[T], q: T) -> Result<T> {
    if times.is_empty() || times.len() != values.len() {
        return Err(Error::InvalidArgument("time norm needs a nonempty sample set".into()));
    }
    if q.is_nan() || q < T::one() {
        return Err(Error::InvalidArgument(format!("time exponent must be >= 1, got {q}")));
    }
    if q.is_infinite() {
        return Ok(values.iter().fold(T::zero(), |m, v| m.max(v.abs())));
    }
    let max = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if max.is_zero() {
        return Ok(T::zero());
    }
    let mut sum = T::zero();
    for i in 1..times.len() {
        let a = (values[i - 1].abs() / max).powf(q);
        let b = (values[i].abs() / max).powf(q);
        sum = sum + (times[i] - times[i - 1]) * (a + b) * T::half();
    }
    Ok(max * sum.powf(q.recip()))
}

/// `‖u‖_{L^q_t L^r_x}` over the sampled times of a trajectory.
pub fn strichartz_norm<T: Real>(traj: &Trajectory<T>, q: T, r: T) -> Result<T> {
    if traj.is_empty() {
        return Err(Error::InvalidArgument("empty trajectory".into()));
    }
    let grid = *traj.grid().expect("nonempty");
    let spatial = traj.states().iter().map(|st| lq_norm_values(&grid, st.u.values(), r)).collect::<Result<Vec<T>>>()?;
    time_norm(&traj.times(), &spatial, q)
}

/// `‖U(t) f‖_{L^q_t([0, T]) L^r_x}` with samples every `dt_sample`.
pub fn half_wave_strichartz<T: Real>(f: &RadialField<T>, horizon: T, dt_sample: T, q: T, r: T) -> Result<T> {
    if !(dt_sample > T::zero()) || !(horizon >= T::zero()) {
        return Err(Error::InvalidArgument("need dt_sample > 0 and T >= 0".into()));
    }
    let steps = (horizon / dt_sample).round().as_f64() as usize;
    let flow = HalfWave::new(f);
    let grid = *f.grid();
    let mut times = Vec::with_capacity(steps + 1);
    let mut values = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let t = T::from_index(i) * dt_sample;
        times.push(t);
        values.push(lq_norm_values(&grid, &flow.modulus(t), r)?);
    }
    time_norm(&times, &values, q)
}

/// `‖U(·)f‖_{L²_t([0, T]) L^q_x} / ‖f‖_{Ḣ^{1−3/q}}` for `q > 4`.
pub fn endpoint_ratio<T: Real>(f: &RadialField<T>, q: T, horizon: T, dt_sample: T) -> Result<T> {
    if !(q > T::lit(4.0)) {
        return Err(Error::InvalidArgument(format!("endpoint probe needs q > 4, got {q}")));
    }
    if f.is_zero() {
        return Err(Error::Degenerate("endpoint ratio of the zero field".into()));
    }
    f.grid().check_truncation(f.support_radius(T::lit(1e-8)), horizon)?;
    let s = endpoint_regularity(q);
    let denom = crate::calculus::sobolev_norm(f, s)?;
    Ok(half_wave_strichartz(f, horizon, dt_sample, T::two(), q)? / denom)
}

/// `s = 1 − 3/q`.
pub fn endpoint_regularity<T: Real>(q: T) -> T {
    T::one() - T::lit(3.0) / q
}
