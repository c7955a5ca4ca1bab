//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line with the
//! measured values; run with `--nocapture` to see them.

use std::time::Instant;

use exterior_wave::ftm::{self, FtmConfig};
use exterior_wave::nlw::{NlwSolver, SolverConfig};
use exterior_wave::profiles::{
    boundary_dipole_block, gaussian_bump, l1_normalized, power_law_shell, rho_exp, weighted_gaussian,
};
use exterior_wave::propagator::{dispersive_probe, endpoint_ratio, kernel_kn, wholespace_kernel, HalfWave};
use exterior_wave::{ComplexField, Field, Grid, Transform};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(name: &str, pass: bool, detail: String, started: Instant) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("{tag} {name}: {detail} [{:.1} s]", started.elapsed().as_secs_f64());
}

const SHELL_CENTER: f64 = 3.0;
const SHELL_BETA: f64 = 0.4;

fn shell_data(grid: Grid) -> (Field, Field) {
    (power_law_shell(grid, 1.0, SHELL_CENTER, SHELL_BETA).unwrap(), Field::zeros(grid))
}

#[test]
fn transform_exactness() {
    let started = Instant::now();
    let grid = Grid::new(32.0, 4096).unwrap();
    let engine = Transform::new(grid);
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let (mut round_trip, mut parseval) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let values: Vec<f64> = (0..grid.interior_len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = Field::new(grid, values).unwrap();
        let back = engine.inverse(&engine.forward(&f).unwrap()).unwrap();
        round_trip = round_trip.max(back.max_diff(&f).unwrap() / f.max_abs());
        parseval = parseval.max(engine.parseval_residual(&f).unwrap());
    }
    let pass = round_trip <= 1e-12 && parseval <= 1e-12;
    verdict(
        "transform exactness",
        pass,
        format!("round trip {round_trip:.2e}, Parseval {parseval:.2e} (tol 1e-12)"),
        started,
    );
    assert!(pass);
}

#[test]
fn analytic_transform_values() {
    let started = Instant::now();
    let grid = Grid::new(32.0, 4096).unwrap();
    let f = rho_exp(grid).unwrap();
    let spectrum = Transform::new(grid).forward(&f).unwrap();
    // ∫₀^∞ sin(λρ) ρ e^{−ρ} dρ = 2λ/(1+λ²)²
    let oracle = |l: f64| (2.0 / std::f64::consts::PI).sqrt() * 2.0 * l / (1.0 + l * l).powi(2);
    let mut worst = 0.0f64;
    for (&l, &c) in grid.frequencies().iter().zip(spectrum.coeffs()) {
        if l <= 8.0 {
            worst = worst.max((c - oracle(l)).abs());
        }
    }
    let physical = f.l2_norm().powi(2);
    let spectral = spectrum.l2_norm().powi(2);
    let pass = worst <= 1e-5 && (physical - 0.25).abs() <= 1e-6 && (spectral - 0.25).abs() <= 1e-6;
    verdict(
        "analytic transform values",
        pass,
        format!("max coefficient error {worst:.2e} (tol 1e-5), norms {physical:.9} / {spectral:.9} vs 0.25 (tol 1e-6)"),
        started,
    );
    assert!(pass);
}

fn apply_flow(flow_re: &HalfWave<f64>, flow_im: &HalfWave<f64>, t: f64) -> ComplexField {
    // U(t)(a + ib) = (Ca − Sb) + i(Sa + Cb)
    let a = flow_re.at(t);
    let b = flow_im.at(t);
    ComplexField::new(a.re.sub(&b.im).unwrap(), a.im.add(&b.re).unwrap()).unwrap()
}

#[test]
fn unitarity_and_group_law() {
    let started = Instant::now();
    let grid = Grid::new(32.0, 4096).unwrap();
    let f = gaussian_bump(grid, 1.0, 3.0, 0.5).unwrap();
    let times = [0.1, 1.0, 7.0, 33.0];
    let flow = HalfWave::new(&f);
    let norm = f.l2_norm();
    let mut unitarity = 0.0f64;
    let mut group = 0.0f64;
    for &t in &times {
        unitarity = unitarity.max((flow.at(t).l2_norm() - norm).abs() / norm);
        let first = flow.at(t);
        let (re, im) = (HalfWave::new(&first.re), HalfWave::new(&first.im));
        for &s in &times {
            let composed = apply_flow(&re, &im, s);
            group = group.max(composed.max_diff(&flow.at(t + s)).unwrap() / f.max_abs());
        }
    }
    let pass = unitarity <= 1e-12 && group <= 1e-12;
    verdict(
        "unitarity and group law",
        pass,
        format!("norm defect {unitarity:.2e}, group defect {group:.2e} (tol 1e-12)"),
        started,
    );
    assert!(pass);
}

#[test]
fn dispersive_decay() {
    let started = Instant::now();
    let grid = Grid::new(128.0, 16384).unwrap();
    let times: Vec<f64> = (0..=6).map(|k| 2f64.powi(k)).collect();
    let mut slopes = Vec::new();
    let mut constants = Vec::new();
    for exponent in 0..=2 {
        let data = l1_normalized(&boundary_dipole_block(grid, exponent).unwrap()).unwrap();
        let probe = dispersive_probe(exponent, &data, &times).unwrap();
        slopes.push(probe.fit.exponent);
        constants.push(probe.fit.constant);
    }
    let ratio = constants[1] / constants[0];
    let slopes_ok = slopes.iter().all(|s| (s + 1.0).abs() <= 0.1);
    let ratio_ok = (2.0..=6.0).contains(&ratio);
    let pass = slopes_ok && ratio_ok;
    verdict(
        "dispersive decay",
        pass,
        format!(
            "slopes {:.3}/{:.3}/{:.3} (want -1 ± 0.1), C(N=2)/C(N=1) = {ratio:.3} (want 4 ± 50%)",
            slopes[0], slopes[1], slopes[2]
        ),
        started,
    );
    assert!(pass);
}

#[test]
fn kernel_scaling_identity() {
    let started = Instant::now();
    let radii = [1.25, 1.5, 2.0, 3.0, 5.0];
    let times = [0.5, 2.0, 6.0];
    let mut worst = 0.0f64;
    let mut points = 0;
    for n in [1.0f64, 2.0, 4.0] {
        for &r in &radii {
            for &s in &radii {
                for &t in &times {
                    let k = kernel_kn(n, t, r, s).unwrap();
                    let w = wholespace_kernel(n * t, n * (r - 1.0), n * (s - 1.0)).unwrap();
                    let rescaled = w * (n.powi(3) * (r - 1.0) / r * (s - 1.0) / s);
                    worst = worst.max((k - rescaled).norm() / k.norm());
                    points += 1;
                }
            }
        }
    }
    let pass = worst <= 1e-6;
    verdict(
        "kernel scaling identity",
        pass,
        format!("{points} points, max relative gap {worst:.2e} (tol 1e-6)"),
        started,
    );
    assert!(pass);
}

#[test]
fn endpoint_probe_stability() {
    let started = Instant::now();
    let grid = Grid::new(128.0, 16384).unwrap();
    let profiles = [
        ("gaussian", gaussian_bump(grid, 1.0, 2.0, 0.5).unwrap()),
        ("rho-exp", rho_exp(grid).unwrap()),
        ("weighted gaussian", weighted_gaussian(grid, 1.0, 4.0, 1.5).unwrap()),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, f) in &profiles {
        let short = endpoint_ratio(f, 6.0, 32.0, 0.05).unwrap();
        let long = endpoint_ratio(f, 6.0, 64.0, 0.05).unwrap();
        let change = (long / short - 1.0).abs();
        pass &= change <= 0.1;
        parts.push(format!("{name} {short:.4}->{long:.4} ({:.1}%)", 100.0 * change));
    }
    verdict("endpoint probe stability", pass, format!("{} (tol 10%)", parts.join(", ")), started);
    assert!(pass);
}

fn relative_drift(dt: f64) -> f64 {
    let grid = Grid::new(32.0, 8192).unwrap();
    let u0 = gaussian_bump(grid, 1.0, 3.0, 0.5).unwrap();
    let solver = NlwSolver::new(grid, SolverConfig::new(dt, 10.0, 1).unwrap()).unwrap();
    let history = solver.energy_history(&u0, &Field::zeros(grid)).unwrap();
    let e0 = history[0].1;
    history.iter().map(|&(_, e)| ((e - e0) / e0).abs()).fold(0.0, f64::max)
}

#[test]
fn nlw_energy_conservation() {
    let started = Instant::now();
    let coarse = relative_drift(1e-3);
    let fine = relative_drift(5e-4);
    let ratio = coarse / fine;
    let pass = coarse <= 1e-6 && (ratio - 4.0).abs() <= 1.0;
    verdict(
        "NLW energy conservation",
        pass,
        format!("drift {coarse:.3e} at dt=1e-3 (tol 1e-6), halving ratio {ratio:.3} (want 4 ± 1)"),
        started,
    );
    assert!(pass);
}

/// Recombined `v + w` at step `dt`, sampled every `1/16` time unit.
fn recombined_run(grid: Grid, dt: f64) -> ftm::FtmReport<f64> {
    let mut cfg = FtmConfig::auto(0.875, 5, dt).unwrap();
    cfg.sample_every = (1.0 / (16.0 * dt)).round() as usize;
    cfg.keep_recombined = true;
    ftm::run_ftm(&cfg, &shell_data(grid)).unwrap()
}

#[test]
fn splitting_identity_and_energy_flux() {
    let started = Instant::now();
    let grid = Grid::new(32.0, 8192).unwrap();
    let dt = 2f64.powi(-10);
    let reference = recombined_run(grid, dt);
    let halved = recombined_run(grid, dt / 2.0);

    let fine_dt = dt / 8.0;
    let horizon = reference.config.horizon;
    let (u0, u1) = shell_data(grid);
    let support = u0.support_radius(1e-8);
    let fine_cfg = SolverConfig::new(fine_dt, horizon, (1.0 / (16.0 * fine_dt)).round() as usize).unwrap();
    let direct = NlwSolver::new(grid, fine_cfg).unwrap().solve_with_support(&u0, &u1, support).unwrap();

    let same_step = reference.recombine_error.unwrap();
    let err_coarse = ftm::sup_l2_difference(reference.recombined.as_ref().unwrap(), &direct).unwrap();
    let err_fine = ftm::sup_l2_difference(halved.recombined.as_ref().unwrap(), &direct).unwrap();
    let ratio = err_coarse / err_fine;
    let split_pass = same_step <= 1e-4 && err_coarse <= 1e-4 && (ratio - 4.0).abs() <= 1.0;
    verdict(
        "splitting identity",
        split_pass,
        format!(
            "same-step gap {same_step:.2e}, gap to dt/8 solve {err_coarse:.3e} (tol 1e-4), halving ratio {ratio:.3} (want 4 ± 1)"
        ),
        started,
    );

    let energy = &reference.energy;
    let flux_pass = energy.flux_residual <= energy.flux_tolerance;
    verdict(
        "energy flux identity",
        flux_pass,
        format!("residual {:.3e} vs first-order tolerance {:.3e}", energy.flux_residual, energy.flux_tolerance),
        started,
    );
    assert!(split_pass && flux_pass);
}

#[test]
fn high_frequency_smallness_scaling() {
    let started = Instant::now();
    // The L⁶ norm of the rough shell data converges slowly in n, so this
    // sweep runs on a finer grid than the growth sweep.
    let grid = Grid::new(32.0, 32768).unwrap();
    let data = shell_data(grid);
    let js = [4, 5, 6];
    let mut logs = Vec::new();
    for &j in &js {
        let mut cfg = FtmConfig::auto(0.875, j, 2f64.powi(-10)).unwrap();
        cfg.sample_every = 1 << 20;
        let (_, high) = ftm::split_data(&data.0, &data.1, j).unwrap();
        let run = ftm::solve_w(&high, &cfg).unwrap();
        logs.push(run.norms.l2_l6.log2());
    }
    let xs: Vec<f64> = js.iter().map(|&j| f64::from(j)).collect();
    let slope = ftm::fit_slope(&xs, &logs).unwrap();
    let pass = (slope + 0.375).abs() <= 0.2;
    verdict(
        "high-frequency smallness scaling",
        pass,
        format!(
            "log2 |w|_(L2 L6) = {:.3}/{:.3}/{:.3}, slope {slope:.3} (want -0.375 ± 0.2)",
            logs[0], logs[1], logs[2]
        ),
        started,
    );
    assert!(pass);
}

#[test]
fn growth_exponents() {
    let started = Instant::now();
    let grid = Grid::new(32.0, 8192).unwrap();
    let data = shell_data(grid);
    let s = 0.875;
    let js = [4, 5, 6];
    let mut horizons = Vec::new();
    let mut log_energy = Vec::new();
    let mut sup_hs = Vec::new();
    for &j in &js {
        let mut cfg = FtmConfig::auto(s, j, 2f64.powi(-10)).unwrap();
        cfg.track_direct = false;
        let report = ftm::run_ftm(&cfg, &data).unwrap();
        horizons.push(cfg.horizon);
        log_energy.push(report.e_t.log2());
        sup_hs.push(report.sup_hs);
    }
    let xs: Vec<f64> = js.iter().map(|&j| f64::from(j)).collect();
    let energy_slope = ftm::fit_slope(&xs, &log_energy).unwrap();
    let energy_cap = 2.0 * (1.0 - s) * 2.0 + 0.3;
    let growth = ftm::hs_growth_report(&horizons, &sup_hs, s).unwrap();
    let hs_cap = growth.predicted_exponent + 0.3;
    let pass = energy_slope <= energy_cap && growth.measured_exponent <= hs_cap;
    verdict(
        "growth exponents",
        pass,
        format!(
            "log2 E_T slope per J {energy_slope:.4} (cap {energy_cap:.2}), sup H^s exponent {:.4} (cap {hs_cap:.4})",
            growth.measured_exponent
        ),
        started,
    );
    assert!(pass);
}
