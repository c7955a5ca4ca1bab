//! Defocusing cubic wave equation `∂²_t u − Δu + u³ = 0` outside the unit
//! ball, solved by Strang splitting: a half kick `∂_t u −= (dt/2)u³`, the
//! exact linear flow over `dt` on the spectral side, and another half kick.
//!
//! The scheme is symmetric, so a step by `dt` followed by a step by `−dt`
//! returns the input up to round-off.

use log::warn;

use crate::error::{Error, Result};
use crate::grid::{weighted_power_sum, RadialField, RadialGrid, Trajectory, WaveState};
use crate::propagator::Rotation;
use crate::scalar::Real;
use crate::transform::DistortedFourier;

/// Time-stepping parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig<T> {
    pub dt: T,
    pub t_final: T,
    /// Keep every `sample_every`-th step in the trajectory.
    pub sample_every: usize,
    pub nonlinearity_on: bool,
}

impl<T: Real> SolverConfig<T> {
    pub fn new(dt: T, t_final: T, sample_every: usize) -> Result<Self> {
        let cfg = Self { dt, t_final, sample_every, nonlinearity_on: true };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn linear(mut self) -> Self {
        self.nonlinearity_on = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > T::zero() && self.dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final >= T::zero() && self.t_final.is_finite()) {
            return Err(Error::InvalidArgument(format!("final time must be non-negative, got {}", self.t_final)));
        }
        if self.sample_every == 0 {
            return Err(Error::InvalidArgument("sample_every must be at least 1".into()));
        }
        Ok(())
    }

    /// Number of steps, `round(T/dt)`.
    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round().as_f64() as usize
    }
}

/// Steps between aliasing checks.
pub const ALIAS_CHECK_STRIDE: usize = 100;
/// Largest tolerated `‖P_{>λ_max/4} u‖₂ / ‖u‖₂`.
pub const ALIAS_TAIL_TOL: f64 = 1e-8;

/// Relative spectral mass above a quarter of the largest grid frequency.
pub fn aliasing_tail<T: Real>(spectrum: &[T], lambdas: &[T]) -> T {
    let cut = lambdas.last().copied().unwrap_or(T::zero()) / T::lit(4.0);
    let (mut tail, mut total) = (T::zero(), T::zero());
    for (&c, &l) in spectrum.iter().zip(lambdas) {
        total = total + c * c;
        if l > cut {
            tail = tail + c * c;
        }
    }
    if total.is_zero() {
        T::zero()
    } else {
        (tail / total).sqrt()
    }
}

/// `½‖u‖²_{Ḣ¹} + ½‖∂_t u‖²₂ + ¼‖u‖⁴₄` from the spectrum of `u` and the node
/// values of `u` and `∂_t u`.
pub(crate) fn energy_from_parts<T: Real>(grid: &RadialGrid<T>, u_hat: &[T], u: &[T], ut: &[T]) -> T {
    let gradient: T = u_hat
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let l = grid.frequency(i + 1);
            l * l * c * c
        })
        .sum::<T>()
        * T::PI()
        / grid.length();
    let kinetic = weighted_power_sum(grid, ut, 2);
    let potential = weighted_power_sum(grid, u, 4);
    T::half() * gradient + T::half() * kinetic + T::lit(0.25) * potential
}

/// Energy of a state.
pub fn energy<T: Real>(state: &WaveState<T>) -> T {
    let engine = DistortedFourier::new(*state.grid());
    let u_hat = engine.forward_values(state.u.values());
    energy_from_parts(state.grid(), &u_hat, state.u.values(), state.ut.values())
}

/// Strang stepper on raw node arrays with a pluggable kick.
#[derive(Debug, Clone)]
pub(crate) struct Stepper<T: Real> {
    engine: DistortedFourier<T>,
    rotation: Rotation<T>,
    dt: T,
    force: Vec<T>,
    /// Spectrum of `u` after the last step.
    pub(crate) u_hat: Vec<T>,
}

impl<T: Real> Stepper<T> {
    pub(crate) fn new(engine: DistortedFourier<T>, dt: T) -> Self {
        let m = engine.grid().interior_len();
        let rotation = Rotation::new(engine.frequencies(), dt);
        Self { engine, rotation, dt, force: vec![T::zero(); m], u_hat: vec![T::zero(); m] }
    }

    pub(crate) fn engine(&self) -> &DistortedFourier<T> {
        &self.engine
    }

    /// One step from time `t`. `force(t, u, out)` writes the kick density
    /// `G` into `out`; the kick is `∂_t u −= (dt/2)·G`.
    pub(crate) fn step<F>(&mut self, t: T, u: &mut Vec<T>, ut: &mut Vec<T>, force: &mut F)
    where
        F: FnMut(T, &[T], &mut [T]),
    {
        let half = self.dt * T::half();
        force(t, u, &mut self.force);
        for (v, &g) in ut.iter_mut().zip(&self.force) {
            *v = *v - half * g;
        }
        let (mut a, mut b) = self.engine.forward_pair_values(u, ut);
        self.rotation.apply(&mut a, &mut b);
        let (nu, nut) = self.engine.inverse_pair_values(&a, &b);
        *u = nu;
        *ut = nut;
        self.u_hat = a;
        force(t + self.dt, u, &mut self.force);
        for (v, &g) in ut.iter_mut().zip(&self.force) {
            *v = *v - half * g;
        }
    }
}

pub(crate) fn cubic<T: Real>(_t: T, u: &[T], out: &mut [T]) {
    for (o, &v) in out.iter_mut().zip(u) {
        *o = v * v * v;
    }
}

pub(crate) fn no_force<T: Real>(_t: T, _u: &[T], out: &mut [T]) {
    out.iter_mut().for_each(|o| *o = T::zero());
}

pub(crate) fn finite_or_fail<T: Real>(t: T, u: &[T], ut: &[T]) -> Result<()> {
    if u.iter().chain(ut).all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::SolverFailure { t: t.as_f64(), reason: "non-finite values produced".into() })
    }
}

/// Watches the spectral tail of `u` every [`ALIAS_CHECK_STRIDE`] steps and
/// warns once per run when it exceeds [`ALIAS_TAIL_TOL`].
#[derive(Debug, Default, Clone)]
pub(crate) struct AliasMonitor {
    warned: bool,
    pub(crate) worst: f64,
}

impl AliasMonitor {
    pub(crate) fn observe<T: Real>(&mut self, step: usize, t: T, u_hat: &[T], lambdas: &[T], label: &str) {
        if !step.is_multiple_of(ALIAS_CHECK_STRIDE) {
            return;
        }
        let tail = aliasing_tail(u_hat, lambdas).as_f64();
        self.worst = self.worst.max(tail);
        if tail > ALIAS_TAIL_TOL && !self.warned {
            self.warned = true;
            warn!("{label}: spectral tail {tail:.3e} above {ALIAS_TAIL_TOL:e} at t = {t}; cubic term may alias");
        }
    }
}

/// Solver for one grid and configuration.
#[derive(Debug, Clone)]
pub struct NlwSolver<T: Real> {
    config: SolverConfig<T>,
    stepper: Stepper<T>,
}

impl<T: Real> NlwSolver<T> {
    pub fn new(grid: RadialGrid<T>, config: SolverConfig<T>) -> Result<Self> {
        config.validate()?;
        Ok(Self { config, stepper: Stepper::new(DistortedFourier::new(grid), config.dt) })
    }

    pub fn config(&self) -> &SolverConfig<T> {
        &self.config
    }

    pub fn grid(&self) -> &RadialGrid<T> {
        self.stepper.engine.grid()
    }

    pub fn energy(&self, state: &WaveState<T>) -> T {
        let u_hat = self.stepper.engine.forward_values(state.u.values());
        energy_from_parts(self.grid(), &u_hat, state.u.values(), state.ut.values())
    }

    /// One step by `dt`, which may be negative.
    pub fn step(&self, state: &WaveState<T>, dt: T) -> Result<WaveState<T>> {
        if *state.grid() != *self.grid() {
            return Err(Error::GridMismatch);
        }
        if !(dt.is_finite() && !dt.is_zero()) {
            return Err(Error::InvalidArgument(format!("step must be finite and nonzero, got {dt}")));
        }
        let mut stepper =
            if dt == self.config.dt { self.stepper.clone() } else { Stepper::new(self.stepper.engine.clone(), dt) };
        let mut u = state.u.values().to_vec();
        let mut ut = state.ut.values().to_vec();
        if self.config.nonlinearity_on {
            stepper.step(state.t, &mut u, &mut ut, &mut cubic);
        } else {
            stepper.step(state.t, &mut u, &mut ut, &mut no_force);
        }
        finite_or_fail(state.t + dt, &u, &ut)?;
        let grid = *self.grid();
        Ok(WaveState { t: state.t + dt, u: RadialField::from_raw(grid, u), ut: RadialField::from_raw(grid, ut) })
    }

    /// Solves from `t = 0`, checking truncation against the data's own
    /// support.
    pub fn solve(&self, u0: &RadialField<T>, u1: &RadialField<T>) -> Result<Trajectory<T>> {
        let tol = T::lit(1e-8);
        let support = u0.support_radius(tol).max(u1.support_radius(tol));
        self.solve_with_support(u0, u1, support)
    }

    /// Solves from `t = 0` with an explicitly supplied data support radius.
    pub fn solve_with_support(&self, u0: &RadialField<T>, u1: &RadialField<T>, support: T) -> Result<Trajectory<T>> {
        let mut traj = Trajectory::new(self.config.dt * T::from_index(self.config.sample_every));
        self.evolve(u0, u1, support, |state| traj.push(state.clone()).map(|_| ()), true)?;
        Ok(traj)
    }

    /// Runs the configured number of steps. `observer` sees the initial
    /// state, then every `sample_every`-th state and the last one when
    /// `sampled` is set, or every state otherwise.
    fn evolve<F>(
        &self,
        u0: &RadialField<T>,
        u1: &RadialField<T>,
        support: T,
        mut observer: F,
        sampled: bool,
    ) -> Result<()>
    where
        F: FnMut(&WaveState<T>) -> Result<()>,
    {
        u0.ensure_same_grid(u1)?;
        if u0.grid() != self.grid() {
            return Err(Error::GridMismatch);
        }
        self.grid().check_truncation(support, self.config.t_final)?;
        let grid = *self.grid();
        let steps = self.config.steps();
        let mut stepper = self.stepper.clone();
        let mut monitor = AliasMonitor::default();
        let lambdas = stepper.engine.frequencies().to_vec();
        let mut u = u0.values().to_vec();
        let mut ut = u1.values().to_vec();
        observer(&WaveState { t: T::zero(), u: u0.clone(), ut: u1.clone() })?;
        for i in 0..steps {
            let t = T::from_index(i) * self.config.dt;
            if self.config.nonlinearity_on {
                stepper.step(t, &mut u, &mut ut, &mut cubic);
            } else {
                stepper.step(t, &mut u, &mut ut, &mut no_force);
            }
            let t_next = T::from_index(i + 1) * self.config.dt;
            finite_or_fail(t_next, &u, &ut)?;
            monitor.observe(i + 1, t_next, &stepper.u_hat, &lambdas, "nlw");
            if !sampled || (i + 1) % self.config.sample_every == 0 || i + 1 == steps {
                let state = WaveState {
                    t: t_next,
                    u: RadialField::from_raw(grid, u.clone()),
                    ut: RadialField::from_raw(grid, ut.clone()),
                };
                observer(&state).map_err(|e| match e {
                    Error::SolverFailure { .. } => e,
                    other => Error::SolverFailure { t: t_next.as_f64(), reason: other.to_string() },
                })?;
            }
        }
        Ok(())
    }

    /// Runs the solve and returns the energy at every step.
    pub fn energy_history(&self, u0: &RadialField<T>, u1: &RadialField<T>) -> Result<Vec<(T, T)>> {
        let tol = T::lit(1e-8);
        let support = u0.support_radius(tol).max(u1.support_radius(tol));
        let mut out = Vec::with_capacity(self.config.steps() + 1);
        self.evolve(
            u0,
            u1,
            support,
            |st| {
                out.push((st.t, self.energy(st)));
                Ok(())
            },
            false,
        )?;
        Ok(out)
    }
}

/// One Strang step with the cubic kick, or the exact linear flow when
/// `nonlinear` is false.
pub fn step<T: Real>(state: &WaveState<T>, dt: T, nonlinear: bool) -> Result<WaveState<T>> {
    let mut cfg = SolverConfig { dt: dt.abs(), t_final: T::zero(), sample_every: 1, nonlinearity_on: nonlinear };
    if cfg.dt.is_zero() {
        cfg.dt = T::one();
    }
    NlwSolver::new(*state.grid(), cfg)?.step(state, dt)
}

/// Solves with data `(u0, u1)` under `cfg`.
pub fn solve<T: Real>(u0: &RadialField<T>, u1: &RadialField<T>, cfg: SolverConfig<T>) -> Result<Trajectory<T>> {
    NlwSolver::new(*u0.grid(), cfg)?.solve(u0, u1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::wave_propagate;

    fn gaussian(grid: RadialGrid<f64>, amp: f64) -> RadialField<f64> {
        RadialField::from_fn(grid, |r| amp * (-((r - 4.0) / 0.5).powi(2)).exp()).unwrap()
    }

    #[test]
    fn zero_state_energy_and_step() {
        let g = RadialGrid::<f64>::new(8.0, 256).unwrap();
        let z = WaveState::zeros(g);
        assert_eq!(energy(&z), 0.0);
        let next = step(&z, 0.01, true).unwrap();
        assert!(next.u.is_zero() && next.ut.is_zero());
    }

    #[test]
    fn rho_exp_energy_oracle() {
        let g = RadialGrid::<f64>::new(32.0, 4096).unwrap();
        let u0 = RadialField::from_fn(g, |r| (r - 1.0) * (-(r - 1.0)).exp() / r).unwrap();
        let e = energy(&WaveState::new(0.0, u0.clone(), RadialField::zeros(g)).unwrap());
        // ∫ ρ⁴e^{−4ρ}/r² dρ by fine composite Simpson
        let m = 400_000;
        let h = 32.0 / m as f64;
        let g4 = |rho: f64| rho.powi(4) * (-4.0 * rho).exp() / (1.0 + rho).powi(2);
        let quartic: f64 = (0..=m)
            .map(|i| {
                let w = if i == 0 || i == m {
                    1.0
                } else if i % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                w * g4(i as f64 * h)
            })
            .sum::<f64>()
            * h
            / 3.0;
        let expect = 0.5 * 0.25 + 0.25 * quartic;
        assert!((e - expect).abs() < 1e-6, "{e} vs {expect}");
        let neg = energy(&WaveState::new(0.0, u0.scaled(-1.0), RadialField::zeros(g)).unwrap());
        assert_eq!(e, neg);
    }

    #[test]
    fn linear_step_matches_exact_flow() {
        let g = RadialGrid::<f64>::new(16.0, 1024).unwrap();
        let u0 = gaussian(g, 1.0);
        let u1 = gaussian(g, 0.3);
        let st = WaveState::new(0.0, u0.clone(), u1.clone()).unwrap();
        let a = step(&st, 0.05, false).unwrap();
        let b = wave_propagate(&u0, &u1, 0.05).unwrap();
        assert!(a.u.max_diff(&b.u).unwrap() < 1e-12 && a.ut.max_diff(&b.ut).unwrap() < 1e-12);
    }

    #[test]
    fn forward_then_backward_step_is_identity() {
        let g = RadialGrid::<f64>::new(16.0, 1024).unwrap();
        let st = WaveState::new(0.0, gaussian(g, 2.0), gaussian(g, -1.0)).unwrap();
        let there = step(&st, 0.01, true).unwrap();
        let back = step(&there, -0.01, true).unwrap();
        assert!(back.u.max_diff(&st.u).unwrap() < 1e-12);
        assert!(back.ut.max_diff(&st.ut).unwrap() < 1e-12);
    }

    #[test]
    fn solve_zero_data_and_sampling() {
        let g = RadialGrid::<f64>::new(8.0, 256).unwrap();
        let cfg = SolverConfig::new(0.01, 1.0, 10).unwrap();
        let traj = solve(&RadialField::zeros(g), &RadialField::zeros(g), cfg).unwrap();
        assert_eq!(traj.len(), 11);
        assert!(traj.states().iter().all(|s| s.u.is_zero() && s.ut.is_zero()));
        assert!((traj.last().unwrap().t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn linear_solve_matches_sampled_exact_flow() {
        let g = RadialGrid::<f64>::new(16.0, 1024).unwrap();
        let u0 = gaussian(g, 1.0);
        let u1 = RadialField::zeros(g);
        let cfg = SolverConfig::new(0.05, 2.0, 8).unwrap().linear();
        let traj = solve(&u0, &u1, cfg).unwrap();
        for st in traj.states() {
            let exact = wave_propagate(&u0, &u1, st.t).unwrap();
            assert!(st.u.max_diff(&exact.u).unwrap() < 1e-12);
        }
    }

    #[test]
    fn time_reversal_of_a_solve() {
        let g = RadialGrid::<f64>::new(16.0, 1024).unwrap();
        let u0 = gaussian(g, 2.0);
        let u1 = RadialField::zeros(g);
        let cfg = SolverConfig::new(0.01, 2.0, 200).unwrap();
        let fwd = solve(&u0, &u1, cfg).unwrap();
        let end = fwd.last().unwrap();
        let bwd = NlwSolver::new(g, cfg).unwrap().solve_with_support(&end.u, &end.ut.scaled(-1.0), 0.0).unwrap();
        let back = bwd.last().unwrap();
        assert!(back.u.max_diff(&u0).unwrap() < 1e-10);
        assert!(back.ut.scaled(-1.0).max_diff(&u1).unwrap() < 1e-10);
    }

    #[test]
    fn truncation_and_config_errors() {
        let g = RadialGrid::<f64>::new(8.0, 256).unwrap();
        let u0 = gaussian(g, 1.0);
        let cfg = SolverConfig::new(0.01, 5.0, 1).unwrap();
        assert!(matches!(solve(&u0, &RadialField::zeros(g), cfg), Err(Error::TruncationUnsafe { .. })));
        assert!(SolverConfig::new(0.0, 1.0, 1).is_err());
        assert!(SolverConfig::new(0.1, -1.0, 1).is_err());
        assert!(SolverConfig::new(0.1, 1.0, 0).is_err());
    }

    #[test]
    fn energy_is_nearly_conserved() {
        let g = RadialGrid::<f64>::new(16.0, 2048).unwrap();
        let u0 = gaussian(g, 1.0);
        let solver = NlwSolver::new(g, SolverConfig::new(2e-3, 2.0, 1).unwrap()).unwrap();
        let hist = solver.energy_history(&u0, &RadialField::zeros(g)).unwrap();
        let e0 = hist[0].1;
        let drift = hist.iter().map(|(_, e)| ((e - e0) / e0).abs()).fold(0.0, f64::max);
        assert!(drift < 1e-5, "{drift}");
    }
}
