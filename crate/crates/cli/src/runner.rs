//! One function per subcommand. Each computes every table in memory; nothing
//! touches the output directory until the whole run has succeeded.

use exterior_wave::calculus::sobolev_norm;
use exterior_wave::ftm::{self, FtmConfig};
use exterior_wave::nlw::{NlwSolver, SolverConfig};
use exterior_wave::profiles;
use exterior_wave::propagator::{self, AdmissibleExponents, PROBE_SUPPORT_TOL};
use exterior_wave::{Error, Field, Grid, Transform};
use log::info;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Profile, RunConfig, Subcommand};
use crate::error::CliError;
use crate::output::{Cell, Table};

/// Relative tail level used to measure the support of the initial data.
const SUPPORT_TOL: f64 = 1e-8;
const EXACTNESS_TOL: f64 = 1e-12;

/// Tables produced by a run, plus checks that missed their tolerance.
#[derive(Debug, Default)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub failures: Vec<String>,
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let grid = Grid::new(cfg.grid.length, cfg.grid.intervals).map_err(|e| CliError::Config(format!("grid: {e}")))?;
    match cfg.subcommand() {
        Subcommand::Selftest => selftest(cfg, grid),
        Subcommand::Dispersive => dispersive(cfg, grid),
        Subcommand::Strichartz => strichartz(cfg, grid),
        Subcommand::Endpoint => endpoint(cfg, grid),
        Subcommand::Solve => solve(cfg, grid),
        Subcommand::Ftm => run_ftm(cfg, grid),
        Subcommand::Sweep => sweep(cfg, grid),
    }
}

fn initial_data(cfg: &RunConfig, grid: Grid) -> Result<(Field, Field), CliError> {
    let d = &cfg.data;
    let u0 = match d.profile {
        Profile::Gaussian => profiles::gaussian_bump(grid, d.amplitude, d.center, d.width),
        Profile::WeightedGaussian => profiles::weighted_gaussian(grid, d.amplitude, d.center, d.width),
        Profile::RhoExp => profiles::rho_exp(grid).map(|f| f.scaled(d.amplitude)),
        Profile::SineArch => profiles::sine_arch(grid).map(|f| f.scaled(d.amplitude)),
        Profile::PowerLawShell => profiles::power_law_shell(grid, d.amplitude, d.center, d.beta),
    }
    .map_err(CliError::run("data"))?;
    let u1 = u0.scaled(d.velocity_scale);
    Ok((u0, u1))
}

fn support(data: &(Field, Field)) -> f64 {
    data.0.support_radius(SUPPORT_TOL).max(data.1.support_radius(SUPPORT_TOL))
}

fn check_truncation(grid: Grid, support: f64, horizon: f64) -> Result<(), CliError> {
    grid.check_truncation(support, horizon).map_err(CliError::run("truncation"))
}

fn selftest(cfg: &RunConfig, grid: Grid) -> Result<Outcome, CliError> {
    let engine = Transform::new(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.probe.seed);
    let mut table = Table::new("selftest", &["field", "round_trip", "parseval"], 1);
    let mut worst = 0.0f64;
    for i in 0..cfg.probe.selftest_fields {
        let values: Vec<f64> = (0..grid.interior_len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = Field::new(grid, values).map_err(CliError::run("selftest"))?;
        let spectrum = engine.forward(&f).map_err(CliError::run("selftest"))?;
        let back = engine.inverse(&spectrum).map_err(CliError::run("selftest"))?;
        let round_trip = back.max_diff(&f).map_err(CliError::run("selftest"))? / f.max_abs();
        let parseval = engine.parseval_residual(&f).map_err(CliError::run("selftest"))?;
        worst = worst.max(round_trip).max(parseval);
        table.push(vec![Cell::Int(i as i64), round_trip.into(), parseval.into()]);
    }
    let mut failures = Vec::new();
    if worst > EXACTNESS_TOL {
        failures.push(format!("selftest residual {worst:e} exceeds {EXACTNESS_TOL:e}"));
    }
    Ok(Outcome { tables: vec![table], failures })
}

fn dispersive(cfg: &RunConfig, grid: Grid) -> Result<Outcome, CliError> {
    let times = &cfg.probe.times;
    let probes = cfg
        .probe
        .exponents
        .par_iter()
        .map(|&k| {
            let block = profiles::boundary_dipole_block(grid, k)?;
            let data = profiles::l1_normalized(&block)?;
            propagator::dispersive_probe(k, &data, times).map(|p| (k, p))
        })
        .collect::<Result<Vec<_>, Error>>()
        .map_err(CliError::run("dispersive"))?;
    let mut samples = Table::new("dispersive", &["N", "t", "sup_norm", "fitted_slope"], 2);
    let mut fits = Table::new("dispersive_fit", &["N", "fitted_slope", "fitted_constant", "fit_residual"], 1);
    for (k, probe) in &probes {
        let n = 2f64.powi(*k);
        for (&t, &sup) in probe.times.iter().zip(&probe.sup_norms) {
            samples.push(vec![n.into(), t.into(), sup.into(), probe.fit.exponent.into()]);
        }
        fits.push(vec![n.into(), probe.fit.exponent.into(), probe.fit.constant.into(), probe.fit.residual.into()]);
        info!("N = {n}: slope {:.4}, constant {:.4}", probe.fit.exponent, probe.fit.constant);
    }
    info!("probe data support measured at relative level {PROBE_SUPPORT_TOL:e}");
    Ok(Outcome { tables: vec![samples, fits], failures: Vec::new() })
}

fn strichartz(cfg: &RunConfig, grid: Grid) -> Result<Outcome, CliError> {
    let p = &cfg.probe;
    AdmissibleExponents::symmetric(p.q, p.r, p.rho).map_err(|e| CliError::Config(format!("exponents: {e}")))?;
    let data = initial_data(cfg, grid)?;
    let longest = p.horizons.iter().copied().fold(0.0, f64::max);
    check_truncation(grid, support(&data), longest)?;
    // Scaling-critical data regularity for the pair (q, r).
    let regularity = 3.0 * (0.5 - 1.0 / p.r) - 1.0 / p.q;
    let data_norm = sobolev_norm(&data.0, regularity).map_err(CliError::run("strichartz"))?;
    let norms = p
        .horizons
        .par_iter()
        .map(|&h| propagator::half_wave_strichartz(&data.0, h, p.dt_sample, p.q, p.r).map(|v| (h, v)))
        .collect::<Result<Vec<_>, Error>>()
        .map_err(CliError::run("strichartz"))?;
    let mut table =
        Table::new("strichartz", &["T", "q", "r", "strichartz_norm", "data_regularity", "data_norm", "ratio"], 1);
    for (h, v) in norms {
        table.push(vec![
            h.into(),
            p.q.into(),
            p.r.into(),
            v.into(),
            regularity.into(),
            data_norm.into(),
            (v / data_norm).into(),
        ]);
    }
    Ok(Outcome { tables: vec![table], failures: Vec::new() })
}

fn endpoint(cfg: &RunConfig, grid: Grid) -> Result<Outcome, CliError> {
    let p = &cfg.probe;
    let data = initial_data(cfg, grid)?;
    let longest = p.horizons.iter().copied().fold(0.0, f64::max);
    check_truncation(grid, support(&data), longest)?;
    let ratios = p
        .horizons
        .par_iter()
        .map(|&h| propagator::endpoint_ratio(&data.0, p.q, h, p.dt_sample).map(|v| (h, v)))
        .collect::<Result<Vec<_>, Error>>()
        .map_err(CliError::run("endpoint"))?;
    let first = ratios[0].1;
    let mut table = Table::new("endpoint", &["T", "q", "ratio", "relative_change"], 1);
    for (h, v) in ratios {
        table.push(vec![h.into(), p.q.into(), v.into(), (v / first - 1.0).into()]);
    }
    Ok(Outcome { tables: vec![table], failures: Vec::new() })
}

fn solve(cfg: &RunConfig, grid: Grid) -> Result<Outcome, CliError> {
    let s = &cfg.solver;
    let data = initial_data(cfg, grid)?;
    let radius = support(&data);
    check_truncation(grid, radius, s.t_final)?;
    let mut solver_cfg = SolverConfig::new(s.dt, s.t_final, s.sample_every).map_err(CliError::run("config"))?;
    if !s.nonlinear {
        solver_cfg = solver_cfg.linear();
    }
    let solver = NlwSolver::new(grid, solver_cfg).map_err(CliError::run("config"))?;
    let traj = solver.solve_with_support(&data.0, &data.1, radius).map_err(CliError::run("solve"))?;
    let e0 = traj.first().map(|st| solver.energy(st)).unwrap_or(0.0);
    let mut table = Table::new("energy", &["t", "energy", "relative_drift", "l2_norm", "sup_norm"], 1);
    for st in traj.states() {
        let e = solver.energy(st);
        let drift = if e0 > 0.0 { (e - e0) / e0 } else { 0.0 };
        table.push(vec![st.t.into(), e.into(), drift.into(), st.u.l2_norm().into(), st.u.max_abs().into()]);
    }
    Ok(Outcome { tables: vec![table], failures: Vec::new() })
}

fn ftm_config(cfg: &RunConfig, j: i32, horizon: f64, eps: f64) -> Result<FtmConfig<f64>, CliError> {
    let f = &cfg.ftm;
    let out = FtmConfig {
        s: f.s,
        eps,
        smallness_constant: f.smallness_constant,
        j,
        horizon,
        dt: f.dt,
        sample_every: f.sample_every,
        track_direct: f.track_direct,
        keep_recombined: false,
    };
    out.validate().map_err(|e| CliError::Config(format!("ftm: {e}")))?;
    Ok(out)
}

fn run_ftm(cfg: &RunConfig, grid: Grid) -> Result<Outcome, CliError> {
    let f = &cfg.ftm;
    let horizon = f.horizon.unwrap_or_else(|| ftm::auto_horizon(f.s, f.j));
    let eps = f.eps.unwrap_or_else(|| ftm::critical_norm(f.s, f.j));
    let ftm_cfg = ftm_config(cfg, f.j, horizon, eps)?;
    let data = initial_data(cfg, grid)?;
    let radius = support(&data);
    check_truncation(grid, radius, horizon)?;
    let report = ftm::run_ftm_with_support(&ftm_cfg, &data, radius).map_err(CliError::run("ftm"))?;

    let mut series = Table::new("ftm_series", &["t", "energy_v", "flux"], 1);
    let last = report.times.len().saturating_sub(1);
    for (i, ((&t, &e), &flux)) in report.times.iter().zip(&report.e_v_series).zip(&report.flux_series).enumerate() {
        if i % f.sample_every == 0 || i == last {
            series.push(vec![t.into(), e.into(), flux.into()]);
        }
    }
    let en = &report.energy;
    let w = &report.w_norms;
    let mut summary = Table::new(
        "ftm_summary",
        &[
            "s",
            "J",
            "T",
            "critical_norm",
            "smallness_ok",
            "e0",
            "e_t",
            "energy_bound",
            "fitted_constant",
            "flux_residual",
            "flux_tolerance",
            "w_l4_tx",
            "w_linf_l3",
            "w_l2_l6",
            "w_linf_hs",
            "w_data_norm",
            "recombine_error",
            "sup_hs",
            "sup_hs_dt",
            "worst_alias_tail",
        ],
        2,
    );
    summary.push(vec![
        f.s.into(),
        Cell::Int(i64::from(f.j)),
        horizon.into(),
        report.critical_norm.into(),
        report.smallness_ok.into(),
        en.e0.into(),
        en.e_t.into(),
        en.bound.into(),
        en.fitted_constant.into(),
        en.flux_residual.into(),
        en.flux_tolerance.into(),
        w.l4_tx.into(),
        w.linf_l3.into(),
        w.l2_l6.into(),
        w.linf_hs.into(),
        report.w_data_norm.into(),
        report.recombine_error.unwrap_or(f64::NAN).into(),
        report.sup_hs.into(),
        report.sup_hs_dt.into(),
        report.worst_alias_tail.into(),
    ]);
    let mut failures = Vec::new();
    if en.flux_residual > en.flux_tolerance {
        failures.push(format!("flux residual {:e} exceeds tolerance {:e}", en.flux_residual, en.flux_tolerance));
    }
    Ok(Outcome { tables: vec![series, summary], failures })
}

fn sweep(cfg: &RunConfig, grid: Grid) -> Result<Outcome, CliError> {
    let f = &cfg.ftm;
    let data = initial_data(cfg, grid)?;
    let radius = support(&data);
    let levels: Vec<(i32, f64)> = f.sweep_j.iter().map(|&j| (j, ftm::auto_horizon(f.s, j))).collect();
    let longest = levels.iter().map(|l| l.1).fold(0.0, f64::max);
    check_truncation(grid, radius, longest)?;
    let configs = levels
        .iter()
        .map(|&(j, h)| {
            let mut c = ftm_config(cfg, j, h, ftm::critical_norm(f.s, j))?;
            c.track_direct = false;
            Ok(c)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let reports = configs
        .par_iter()
        .map(|c| ftm::run_ftm_with_support(c, &data, radius))
        .collect::<Result<Vec<_>, Error>>()
        .map_err(CliError::run("sweep"))?;

    let js: Vec<f64> = levels.iter().map(|l| f64::from(l.0)).collect();
    let horizons: Vec<f64> = levels.iter().map(|l| l.1).collect();
    let log_e: Vec<f64> = reports.iter().map(|r| r.e_t.log2()).collect();
    let log_w: Vec<f64> = reports.iter().map(|r| r.w_norms.l2_l6.log2()).collect();
    let sup_hs: Vec<f64> = reports.iter().map(|r| r.sup_hs).collect();
    let fits = (|| -> exterior_wave::Result<_> {
        Ok((
            ftm::fit_slope(&js, &log_e)?,
            ftm::fit_slope(&js, &log_w)?,
            ftm::hs_growth_report(&horizons, &sup_hs, f.s)?,
        ))
    })()
    .map_err(CliError::run("fit"))?;
    let (energy_slope, w_slope, hs) = fits;

    let mut table = Table::new(
        "scaling",
        &[
            "J",
            "T",
            "e_t",
            "log2_e_t",
            "sup_hs",
            "w_l2_l6",
            "energy_slope",
            "energy_slope_predicted",
            "w_slope",
            "w_slope_predicted",
            "hs_exponent_fit",
            "hs_exponent_predicted",
        ],
        1,
    );
    for (i, r) in reports.iter().enumerate() {
        table.push(vec![
            Cell::Int(i64::from(levels[i].0)),
            horizons[i].into(),
            r.e_t.into(),
            log_e[i].into(),
            r.sup_hs.into(),
            r.w_norms.l2_l6.into(),
            energy_slope.into(),
            ftm::energy_growth_exponent(f.s).into(),
            w_slope.into(),
            (0.5 - f.s).into(),
            hs.measured_exponent.into(),
            hs.predicted_exponent.into(),
        ]);
    }
    Ok(Outcome { tables: vec![table], failures: Vec::new() })
}
