//! Fourier truncation: split the data at `2^J` into a high-frequency part `w`
//! solving the cubic equation and a low-frequency part `v` solving
//!
//! ```text
//! ∂²_t v − Δv + v³ = −3v²w − 3vw²
//! ```
//!
//! so that `u = v + w`. The energy of `v` is no longer conserved; its growth
//! is driven by `dE(v)/dt = ∫ ∂_t v · (−3v²w − 3vw²) s² ds`.

use log::warn;

use crate::calculus::{BlockKind, DyadicBlock, SmoothCutoff};
use crate::error::{Error, Result};
use crate::grid::{lq_norm_values, weighted_power_sum, RadialField, RadialGrid, Trajectory, WaveState};
use crate::nlw::{cubic, energy_from_parts, finite_or_fail, AliasMonitor, Stepper};
use crate::scalar::Real;
use crate::transform::DistortedFourier;

/// `T = 2^{2J(2s − 3/2)}`, the horizon matched to the cutoff.
pub fn auto_horizon<T: Real>(s: T, j: i32) -> T {
    T::two().powf(T::two() * T::lit(f64::from(j)) * (T::two() * s - T::lit(1.5)))
}

/// `2^{J(1/2 − s)}`, the size of the high-frequency data in the critical norm.
pub fn critical_norm<T: Real>(s: T, j: i32) -> T {
    T::two().powf(T::lit(f64::from(j)) * (T::half() - s))
}

/// Growth exponent `3(1−s)(2s−1)/(4s−3)` of the `Ḣ^s` norm in `T`.
pub fn hs_growth_exponent<T: Real>(s: T) -> T {
    let three = T::lit(3.0);
    three * (T::one() - s) * (T::two() * s - T::one()) / (T::lit(4.0) * s - three)
}

/// Exponent of `E_T` in `J` when `T` is coupled to `J`: `2(1 − s)·2`.
pub fn energy_growth_exponent<T: Real>(s: T) -> T {
    T::lit(4.0) * (T::one() - s)
}

/// Parameters of one truncation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FtmConfig<T> {
    /// Data regularity, `3/4 < s < 1`.
    pub s: T,
    /// Smallness target for the high-frequency data.
    pub eps: T,
    /// Constant in `2^{J(1/2−s)} ≤ C·ε`.
    pub smallness_constant: T,
    pub j: i32,
    pub horizon: T,
    pub dt: T,
    /// Stride of the stored snapshots.
    pub sample_every: usize,
    /// Co-evolve the full equation to measure `‖u − (v + w)‖`.
    pub track_direct: bool,
    /// Keep `v + w` at the sampling stride in the report.
    pub keep_recombined: bool,
}

impl<T: Real> FtmConfig<T> {
    /// Configuration with the horizon set by [`auto_horizon`].
    pub fn auto(s: T, j: i32, dt: T) -> Result<Self> {
        let cfg = Self {
            s,
            eps: critical_norm(s, j),
            smallness_constant: T::one(),
            j,
            horizon: auto_horizon(s, j),
            dt,
            sample_every: 16,
            track_direct: true,
            keep_recombined: false,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_horizon(mut self, horizon: T) -> Result<Self> {
        self.horizon = horizon;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s > T::lit(0.75) && self.s < T::one()) {
            return Err(Error::InvalidArgument(format!("regularity must satisfy 3/4 < s < 1, got {}", self.s)));
        }
        if !(self.dt > T::zero() && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.horizon >= T::zero() && self.horizon.is_finite()) {
            return Err(Error::InvalidArgument(format!("horizon must be non-negative, got {}", self.horizon)));
        }
        if !(self.eps > T::zero()) || !(self.smallness_constant > T::zero()) {
            return Err(Error::InvalidArgument("eps and the smallness constant must be positive".into()));
        }
        if self.sample_every == 0 {
            return Err(Error::InvalidArgument("sample_every must be at least 1".into()));
        }
        Ok(())
    }

    /// Whether `2^{J(1/2−s)} ≤ C·ε`.
    pub fn smallness_ok(&self) -> bool {
        critical_norm(self.s, self.j) <= self.smallness_constant * self.eps
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.dt).round().as_f64() as usize
    }

    pub fn cutoff(&self) -> DyadicBlock {
        DyadicBlock::new(self.j, BlockKind::Leq)
    }
}

/// `(u, ∂_t u)` data.
pub type DataPair<T> = (RadialField<T>, RadialField<T>);

/// `(P_{≤2^J}, 1 − P_{≤2^J})` applied to both components.
pub fn split_data<T: Real>(u0: &RadialField<T>, u1: &RadialField<T>, j: i32) -> Result<(DataPair<T>, DataPair<T>)> {
    u0.ensure_same_grid(u1)?;
    let grid = *u0.grid();
    let block = DyadicBlock::new(j, BlockKind::Leq);
    block.check(&grid)?;
    let engine = DistortedFourier::new(grid);
    let (a, b) = engine.forward_pair_values(u0.values(), u1.values());
    let low_sym: Vec<T> = engine.frequencies().iter().map(|&l| SmoothCutoff.symbol(block, l)).collect();
    let mul = |c: &[T], hi: bool| -> Vec<T> {
        c.iter().zip(&low_sym).map(|(&x, &m)| if hi { (T::one() - m) * x } else { m * x }).collect()
    };
    let (l0, l1) = engine.inverse_pair_values(&mul(&a, false), &mul(&b, false));
    let (h0, h1) = engine.inverse_pair_values(&mul(&a, true), &mul(&b, true));
    let f = |v| RadialField::from_raw(grid, v);
    Ok(((f(l0), f(l1)), (f(h0), f(h1))))
}

/// Space-time norms of the high-frequency solution over `[0, T]`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WNorms<T> {
    pub l4_tx: T,
    pub linf_l3: T,
    pub l2_l6: T,
    pub linf_hs: T,
}

/// Running trapezoid/sup accumulator behind [`WNorms`].
#[derive(Debug, Clone, Default)]
struct NormAccumulator<T> {
    last: Option<(T, T, T)>,
    int_l4: T,
    int_l6: T,
    sup_l3: T,
    sup_hs: T,
}

impl<T: Real> NormAccumulator<T> {
    fn push(&mut self, t: T, grid: &RadialGrid<T>, w: &[T], w_hat: &[T], s: T) {
        let l4 = weighted_power_sum(grid, w, 4);
        let l6sq = weighted_power_sum(grid, w, 6).cbrt();
        let l3 = weighted_power_sum(grid, w, 3).cbrt();
        let hs = hs_norm(grid, w_hat, s);
        if let Some((t0, a0, b0)) = self.last {
            let h = (t - t0) * T::half();
            self.int_l4 = self.int_l4 + h * (a0 + l4);
            self.int_l6 = self.int_l6 + h * (b0 + l6sq);
        }
        self.last = Some((t, l4, l6sq));
        self.sup_l3 = self.sup_l3.max(l3);
        self.sup_hs = self.sup_hs.max(hs);
    }

    fn finish(&self) -> WNorms<T> {
        WNorms {
            l4_tx: self.int_l4.powf(T::lit(0.25)),
            linf_l3: self.sup_l3,
            l2_l6: self.int_l6.sqrt(),
            linf_hs: self.sup_hs,
        }
    }
}

/// `((π/L)Σ λ^{2s} c²)^{1/2}` on raw coefficients.
fn hs_norm<T: Real>(grid: &RadialGrid<T>, coeffs: &[T], s: T) -> T {
    let two_s = T::two() * s;
    let sum: T = coeffs.iter().enumerate().map(|(i, &c)| grid.frequency(i + 1).powf(two_s) * c * c).sum();
    (sum * T::PI() / grid.length()).sqrt()
}

/// Source of `w(t)` for the `v` equation. Times are requested in
/// nondecreasing order.
pub trait WSource<T: Real> {
    fn at(&mut self, t: T) -> Result<&[T]>;

    /// `∂_t w` at the most recently requested time, when the source has it.
    fn time_derivative(&self) -> Option<&[T]> {
        None
    }
}

/// Re-evolves `w` step by step alongside `v`, accumulating its norms.
#[derive(Debug, Clone)]
pub struct LockstepW<T: Real> {
    stepper: Stepper<T>,
    s: T,
    t: T,
    dt: T,
    w: Vec<T>,
    wt: Vec<T>,
    norms: NormAccumulator<T>,
    monitor: AliasMonitor,
    steps: usize,
}

impl<T: Real> LockstepW<T> {
    pub fn new(high: &DataPair<T>, s: T, dt: T) -> Result<Self> {
        high.0.ensure_same_grid(&high.1)?;
        let grid = *high.0.grid();
        let engine = DistortedFourier::new(grid);
        let w_hat = engine.forward_values(high.0.values());
        let mut norms = NormAccumulator::default();
        norms.push(T::zero(), &grid, high.0.values(), &w_hat, s);
        Ok(Self {
            stepper: Stepper::new(engine, dt),
            s,
            t: T::zero(),
            dt,
            w: high.0.values().to_vec(),
            wt: high.1.values().to_vec(),
            norms,
            monitor: AliasMonitor::default(),
            steps: 0,
        })
    }

    fn advance(&mut self) -> Result<()> {
        let grid = *self.stepper.engine().grid();
        self.stepper.step(self.t, &mut self.w, &mut self.wt, &mut cubic);
        self.steps += 1;
        self.t = T::from_index(self.steps) * self.dt;
        finite_or_fail(self.t, &self.w, &self.wt)?;
        self.norms.push(self.t, &grid, &self.w, &self.stepper.u_hat, self.s);
        let lambdas = self.stepper.engine().frequencies();
        self.monitor.observe(self.steps, self.t, &self.stepper.u_hat, lambdas, "w");
        Ok(())
    }

    pub fn time(&self) -> T {
        self.t
    }

    pub fn state(&self) -> WaveState<T> {
        let grid = *self.stepper.engine().grid();
        WaveState {
            t: self.t,
            u: RadialField::from_raw(grid, self.w.clone()),
            ut: RadialField::from_raw(grid, self.wt.clone()),
        }
    }

    pub fn norms(&self) -> WNorms<T> {
        self.norms.finish()
    }

    /// Largest aliasing tail seen by the monitor.
    pub fn worst_alias_tail(&self) -> f64 {
        self.monitor.worst
    }
}

impl<T: Real> WSource<T> for LockstepW<T> {
    fn at(&mut self, t: T) -> Result<&[T]> {
        let slack = self.dt * T::lit(1e-6);
        while t > self.t + slack {
            self.advance()?;
        }
        if (t - self.t).abs() > slack {
            return Err(Error::InvalidArgument(format!("w requested at t = {t}, behind the lockstep time {}", self.t)));
        }
        Ok(&self.w)
    }

    fn time_derivative(&self) -> Option<&[T]> {
        Some(&self.wt)
    }
}

/// Linear interpolation in time between stored snapshots.
#[derive(Debug, Clone)]
pub struct InterpolatedW<'a, T> {
    traj: &'a Trajectory<T>,
    cursor: usize,
    buffer: Vec<T>,
}

impl<'a, T: Real> InterpolatedW<'a, T> {
    pub fn new(traj: &'a Trajectory<T>) -> Result<Self> {
        if traj.is_empty() {
            return Err(Error::InvalidArgument("empty w trajectory".into()));
        }
        Ok(Self { traj, cursor: 0, buffer: Vec::new() })
    }
}

impl<T: Real> WSource<T> for InterpolatedW<'_, T> {
    fn at(&mut self, t: T) -> Result<&[T]> {
        let states = self.traj.states();
        let slack = T::lit(1e-9) * (T::one() + t.abs());
        let last = states.last().expect("nonempty");
        if t < states[0].t - slack || t > last.t + slack {
            return Err(Error::InvalidArgument(format!(
                "w trajectory covers [{}, {}], requested t = {t}",
                states[0].t, last.t
            )));
        }
        while self.cursor + 1 < states.len() && states[self.cursor + 1].t <= t + slack {
            self.cursor += 1;
        }
        let a = &states[self.cursor];
        if (a.t - t).abs() <= slack || self.cursor + 1 == states.len() {
            self.buffer.clear();
            self.buffer.extend_from_slice(a.u.values());
            return Ok(&self.buffer);
        }
        let b = &states[self.cursor + 1];
        let theta = (t - a.t) / (b.t - a.t);
        self.buffer.clear();
        self.buffer.extend(a.u.values().iter().zip(b.u.values()).map(|(&x, &y)| x + theta * (y - x)));
        Ok(&self.buffer)
    }
}

/// Output of [`solve_w`].
#[derive(Debug, Clone)]
pub struct WRun<T> {
    pub norms: WNorms<T>,
    pub snapshots: Trajectory<T>,
    pub data_norm: T,
}

/// `‖(f, g)‖_{Ḣ^s × Ḣ^{s−1}}`.
pub fn data_norm<T: Real>(pair: &DataPair<T>, s: T) -> T {
    let engine = DistortedFourier::new(*pair.0.grid());
    let (a, b) = engine.forward_pair_values(pair.0.values(), pair.1.values());
    let g = engine.grid();
    (hs_norm(g, &a, s).powi(2) + hs_norm(g, &b, s - T::one()).powi(2)).sqrt()
}

/// Evolves the high-frequency data to the horizon, streaming its norms and
/// keeping snapshots every `sample_every` steps.
pub fn solve_w<T: Real>(high: &DataPair<T>, cfg: &FtmConfig<T>) -> Result<WRun<T>> {
    cfg.validate()?;
    let mut w = LockstepW::new(high, cfg.s, cfg.dt)?;
    let mut snapshots = Trajectory::new(cfg.dt * T::from_index(cfg.sample_every));
    snapshots.push(w.state())?;
    let steps = cfg.steps();
    for i in 1..=steps {
        w.at(T::from_index(i) * cfg.dt)?;
        if i % cfg.sample_every == 0 || i == steps {
            snapshots.push(w.state())?;
        }
    }
    Ok(WRun { norms: w.norms(), snapshots, data_norm: data_norm(high, cfg.s) })
}

/// `v³ + 3v²w + 3vw²`, the kick density of the `v` equation.
fn v_force<T: Real>(v: &[T], w: &[T], out: &mut [T]) {
    let three = T::lit(3.0);
    for ((o, &a), &b) in out.iter_mut().zip(v).zip(w) {
        *o = a * a * a + three * a * b * (a + b);
    }
}

/// `∫ ∂_t v · (−3v²w − 3vw²) s² ds`.
fn flux<T: Real>(grid: &RadialGrid<T>, v: &[T], vt: &[T], w: &[T]) -> T {
    let three = T::lit(3.0);
    let h = grid.spacing();
    let sum: T = v
        .iter()
        .zip(vt)
        .zip(w)
        .enumerate()
        .map(|(i, ((&a, &at), &b))| {
            let r = grid.radius(i + 1);
            -three * at * a * b * (a + b) * r * r
        })
        .sum();
    sum * h
}

/// Per-step record handed to the `v` observer.
struct StepView<'a, T> {
    t: T,
    v: &'a [T],
    vt: &'a [T],
    v_hat: &'a [T],
    w: &'a [T],
    wt: Option<&'a [T]>,
}

fn drive_v<T, W, F>(low: &DataPair<T>, source: &mut W, cfg: &FtmConfig<T>, mut observe: F) -> Result<()>
where
    T: Real,
    W: WSource<T> + ?Sized,
    F: FnMut(&StepView<'_, T>) -> Result<()>,
{
    low.0.ensure_same_grid(&low.1)?;
    let grid = *low.0.grid();
    let engine = DistortedFourier::new(grid);
    let lambdas = engine.frequencies().to_vec();
    let mut stepper = Stepper::new(engine.clone(), cfg.dt);
    let mut monitor = AliasMonitor::default();
    let mut v = low.0.values().to_vec();
    let mut vt = low.1.values().to_vec();
    let v_hat0 = engine.forward_values(&v);
    let w0 = source.at(T::zero())?.to_vec();
    if w0.len() != v.len() {
        return Err(Error::GridMismatch);
    }
    observe(&StepView { t: T::zero(), v: &v, vt: &vt, v_hat: &v_hat0, w: &w0, wt: source.time_derivative() })?;
    let mut w_now = w0;
    let mut w_next = vec![T::zero(); v.len()];
    for i in 0..cfg.steps() {
        let t = T::from_index(i) * cfg.dt;
        let t_next = T::from_index(i + 1) * cfg.dt;
        w_next.copy_from_slice(source.at(t_next)?);
        let mut calls = 0usize;
        let mut force = |_t: T, u: &[T], out: &mut [T]| {
            let w = if calls == 0 { &w_now } else { &w_next };
            calls += 1;
            v_force(u, w, out);
        };
        stepper.step(t, &mut v, &mut vt, &mut force);
        finite_or_fail(t_next, &v, &vt)?;
        monitor.observe(i + 1, t_next, &stepper.u_hat, &lambdas, "v");
        std::mem::swap(&mut w_now, &mut w_next);
        observe(&StepView {
            t: t_next,
            v: &v,
            vt: &vt,
            v_hat: &stepper.u_hat,
            w: &w_now,
            wt: source.time_derivative(),
        })?;
    }
    Ok(())
}

/// Solves the `v` equation with `w` from `source`, keeping every
/// `sample_every`-th state.
pub fn solve_v<T: Real, W: WSource<T> + ?Sized>(
    low: &DataPair<T>,
    source: &mut W,
    cfg: &FtmConfig<T>,
) -> Result<Trajectory<T>> {
    cfg.validate()?;
    let grid = *low.0.grid();
    let steps = cfg.steps();
    let mut traj = Trajectory::new(cfg.dt * T::from_index(cfg.sample_every));
    let mut index = 0usize;
    drive_v(low, source, cfg, |view| {
        let keep = index.is_multiple_of(cfg.sample_every) || index == steps;
        index += 1;
        if keep {
            traj.push(WaveState {
                t: view.t,
                u: RadialField::from_raw(grid, view.v.to_vec()),
                ut: RadialField::from_raw(grid, view.vt.to_vec()),
            })?;
        }
        Ok(())
    })?;
    Ok(traj)
}

/// Energy bookkeeping for `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyGrowth<T> {
    pub e0: T,
    pub e_t: T,
    /// `E(v)(0) + E_T^{3/2} T^{1/2} ‖w‖_{L²L⁶} + E_T ‖w‖²_{L²L⁶}`.
    pub bound: T,
    /// `E_T / bound`, the constant the estimate needs on this run.
    pub fitted_constant: T,
    /// `max_i |(E_{i+1} − E_i)/h − flux_i|` at the sampling stride.
    pub flux_residual: T,
    /// `5·h·max|E''|` with `E''` from second differences.
    pub flux_tolerance: T,
}

/// Compares finite-difference `dE/dt` with the flux quadrature at stride
/// `stride` (in steps) and evaluates the energy-growth bound.
pub fn energy_growth_report<T: Real>(
    times: &[T],
    energies: &[T],
    fluxes: &[T],
    w_l2_l6: T,
    horizon: T,
    stride: usize,
) -> Result<EnergyGrowth<T>> {
    if energies.is_empty() || energies.len() != times.len() || fluxes.len() != times.len() {
        return Err(Error::InvalidArgument("energy series must be nonempty and aligned".into()));
    }
    let stride = stride.max(1);
    let e0 = energies[0];
    let e_t = energies.iter().fold(T::zero(), |m, &e| m.max(e));
    let bound = e0 + e_t.powf(T::lit(1.5)) * horizon.sqrt() * w_l2_l6 + e_t * w_l2_l6 * w_l2_l6;
    let fitted_constant = if bound > T::zero() { e_t / bound } else { T::zero() };
    let mut residual = T::zero();
    let mut second = T::zero();
    let mut h_max = T::zero();
    let mut i = 0;
    while i + stride < energies.len() {
        let h = times[i + stride] - times[i];
        h_max = h_max.max(h);
        let fd = (energies[i + stride] - energies[i]) / h;
        residual = residual.max((fd - fluxes[i]).abs());
        if i + 2 * stride < energies.len() {
            let d2 = (energies[i + 2 * stride] - T::two() * energies[i + stride] + energies[i]) / (h * h);
            second = second.max(d2.abs());
        }
        i += stride;
    }
    Ok(EnergyGrowth {
        e0,
        e_t,
        bound,
        fitted_constant,
        flux_residual: residual,
        flux_tolerance: T::lit(5.0) * h_max * second,
    })
}

/// Outputs of [`run_ftm`].
#[derive(Debug, Clone)]
pub struct FtmReport<T> {
    pub config: FtmConfig<T>,
    pub critical_norm: T,
    pub smallness_ok: bool,
    /// Times of the per-step series.
    pub times: Vec<T>,
    pub e_v_series: Vec<T>,
    pub flux_series: Vec<T>,
    pub e_t: T,
    pub energy: EnergyGrowth<T>,
    pub w_norms: WNorms<T>,
    pub w_data_norm: T,
    /// `sup_t ‖u − (v + w)‖₂` against a co-evolved direct solve with the same step.
    pub recombine_error: Option<T>,
    /// `sup_t (‖v‖_{Ḣ^s} + ‖w‖_{Ḣ^s})` over the sampled times.
    pub sup_hs: T,
    /// `sup_t (‖∂_t v‖_{Ḣ^{s−1}} + ‖∂_t w‖_{Ḣ^{s−1}})` over the sampled times.
    pub sup_hs_dt: T,
    pub recombined: Option<Trajectory<T>>,
    pub worst_alias_tail: f64,
}

/// Full pipeline: split, evolve `w` in lockstep with `v` (and optionally the
/// direct solution), and report.
pub fn run_ftm<T: Real>(cfg: &FtmConfig<T>, data: &DataPair<T>) -> Result<FtmReport<T>> {
    let tol = T::lit(1e-8);
    let support = data.0.support_radius(tol).max(data.1.support_radius(tol));
    run_ftm_with_support(cfg, data, support)
}

/// [`run_ftm`] with the data support radius given explicitly.
pub fn run_ftm_with_support<T: Real>(cfg: &FtmConfig<T>, data: &DataPair<T>, support: T) -> Result<FtmReport<T>> {
    cfg.validate().map_err(|e| e.in_stage("config"))?;
    data.0.ensure_same_grid(&data.1).map_err(|e| e.in_stage("config"))?;
    let grid = *data.0.grid();
    grid.check_truncation(support, cfg.horizon).map_err(|e| e.in_stage("config"))?;
    let critical = critical_norm(cfg.s, cfg.j);
    let smallness_ok = cfg.smallness_ok();
    if !smallness_ok {
        warn!("high-frequency size 2^(J(1/2-s)) = {critical} exceeds C*eps = {}", cfg.smallness_constant * cfg.eps);
    }
    let (low, high) = split_data(&data.0, &data.1, cfg.j).map_err(|e| e.in_stage("split"))?;
    let w_data_norm = data_norm(&high, cfg.s);
    let mut w = LockstepW::new(&high, cfg.s, cfg.dt).map_err(|e| e.in_stage("solve_w"))?;

    let engine = DistortedFourier::new(grid);
    let mut direct = if cfg.track_direct {
        Some((Stepper::new(engine.clone(), cfg.dt), data.0.values().to_vec(), data.1.values().to_vec()))
    } else {
        None
    };
    let steps = cfg.steps();
    let mut times = Vec::with_capacity(steps + 1);
    let mut energies = Vec::with_capacity(steps + 1);
    let mut fluxes = Vec::with_capacity(steps + 1);
    let mut recombine: Option<T> = None;
    let mut recombined =
        if cfg.keep_recombined { Some(Trajectory::new(cfg.dt * T::from_index(cfg.sample_every))) } else { None };
    let mut sup_hs = T::zero();
    let mut sup_hs_dt = T::zero();
    let mut index = 0usize;
    let s = cfg.s;

    {
        drive_v(&low, &mut w, cfg, |view| {
            times.push(view.t);
            energies.push(energy_from_parts(&grid, view.v_hat, view.v, view.vt));
            fluxes.push(flux(&grid, view.v, view.vt, view.w));
            if let Some((stepper, u, ut)) = direct.as_mut() {
                if index > 0 {
                    let t0 = T::from_index(index - 1) * cfg.dt;
                    stepper.step(t0, u, ut, &mut cubic);
                    finite_or_fail(view.t, u, ut)?;
                }
                let diff: Vec<T> = u.iter().zip(view.v).zip(view.w).map(|((&a, &b), &c)| a - (b + c)).collect();
                let err = weighted_power_sum(&grid, &diff, 2).sqrt();
                recombine = Some(recombine.map_or(err, |m: T| m.max(err)));
            }
            let sampled = index.is_multiple_of(cfg.sample_every) || index == steps;
            if sampled {
                let w_hat = engine.forward_values(view.w);
                let hs = hs_norm(&grid, view.v_hat, s) + hs_norm(&grid, &w_hat, s);
                sup_hs = sup_hs.max(hs);
                let wt = view.wt.map_or_else(|| vec![T::zero(); view.vt.len()], <[T]>::to_vec);
                let (vt_hat, wt_hat) = engine.forward_pair_values(view.vt, &wt);
                let hs_dt = hs_norm(&grid, &vt_hat, s - T::one()) + hs_norm(&grid, &wt_hat, s - T::one());
                sup_hs_dt = sup_hs_dt.max(hs_dt);
                if let Some(traj) = recombined.as_mut() {
                    let sum: Vec<T> = view.v.iter().zip(view.w).map(|(&a, &b)| a + b).collect();
                    traj.push(WaveState {
                        t: view.t,
                        u: RadialField::from_raw(grid, sum),
                        ut: RadialField::zeros(grid),
                    })?;
                }
            }
            index += 1;
            Ok(())
        })
        .map_err(|e| e.in_stage("solve_v"))?;
    }
    let w_norms = w.norms();
    let energy = energy_growth_report(&times, &energies, &fluxes, w_norms.l2_l6, cfg.horizon, 1)
        .map_err(|e| e.in_stage("report"))?;
    let worst_alias_tail = w.worst_alias_tail();
    Ok(FtmReport {
        config: *cfg,
        critical_norm: critical,
        smallness_ok,
        e_t: energy.e_t,
        times,
        e_v_series: energies,
        flux_series: fluxes,
        energy,
        w_norms,
        w_data_norm,
        recombine_error: recombine,
        sup_hs,
        sup_hs_dt,
        recombined,
        worst_alias_tail,
    })
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope<T: Real>(xs: &[T], ys: &[T]) -> Result<T> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InvalidArgument("slope fit needs at least two paired points".into()));
    }
    let m = T::from_index(xs.len());
    let mx = xs.iter().copied().sum::<T>() / m;
    let my = ys.iter().copied().sum::<T>() / m;
    let sxx: T = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    if sxx.is_zero() {
        return Err(Error::Degenerate("slope fit needs distinct abscissae".into()));
    }
    let sxy: T = xs.iter().zip(ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// `sup_t (‖v‖_{Ḣ^s} + ‖w‖_{Ḣ^s})` against `T`: fitted exponent and the
/// constant `C` with `value = C·T^{exponent}` matched at the smallest `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsGrowth<T> {
    pub measured_exponent: T,
    pub predicted_exponent: T,
    pub constant: T,
}

pub fn hs_growth_report<T: Real>(horizons: &[T], sup_norms: &[T], s: T) -> Result<HsGrowth<T>> {
    if horizons.iter().chain(sup_norms).any(|v| !(*v > T::zero())) {
        return Err(Error::Degenerate("growth fit needs positive horizons and norms".into()));
    }
    let xs: Vec<T> = horizons.iter().map(|t| t.log2()).collect();
    let ys: Vec<T> = sup_norms.iter().map(|v| v.log2()).collect();
    let measured_exponent = fit_slope(&xs, &ys)?;
    let predicted_exponent = hs_growth_exponent(s);
    let (i0, _) =
        horizons.iter().enumerate().fold((0, horizons[0]), |(bi, bt), (i, &t)| if t < bt { (i, t) } else { (bi, bt) });
    let constant = sup_norms[i0] / horizons[i0].powf(predicted_exponent);
    Ok(HsGrowth { measured_exponent, predicted_exponent, constant })
}

/// `sup_t ‖u(t) − w(t)‖₂` over the common sample times of two trajectories.
pub fn sup_l2_difference<T: Real>(a: &Trajectory<T>, b: &Trajectory<T>) -> Result<T> {
    let mut worst = T::zero();
    let mut j = 0;
    let mut matched = 0;
    for st in a.states() {
        let slack = T::lit(1e-9) * (T::one() + st.t.abs());
        while j < b.len() && b.states()[j].t < st.t - slack {
            j += 1;
        }
        if j < b.len() && (b.states()[j].t - st.t).abs() <= slack {
            let d = st.u.sub(&b.states()[j].u)?;
            worst = worst.max(d.l2_norm());
            matched += 1;
        }
    }
    if matched == 0 {
        return Err(Error::InvalidArgument("trajectories share no sample times".into()));
    }
    Ok(worst)
}

/// `‖·‖_{L^q}` of raw node values on a grid, exposed for sweep tooling.
pub fn node_lq<T: Real>(grid: &RadialGrid<T>, values: &[T], q: T) -> Result<T> {
    lq_norm_values(grid, values, q)
}
