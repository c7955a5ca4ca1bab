//! JSON run configuration. Every field has a default, and the resolved value
//! of each one is written back into the manifest.

use std::path::{Path, PathBuf};

use exterior_wave::ftm;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Subcommand {
    Selftest,
    Dispersive,
    Strichartz,
    Endpoint,
    Solve,
    Ftm,
    Sweep,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Self::Selftest => "selftest",
            Self::Dispersive => "dispersive",
            Self::Strichartz => "strichartz",
            Self::Endpoint => "endpoint",
            Self::Solve => "solve",
            Self::Ftm => "ftm",
            Self::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    /// Truncation length `L`.
    pub length: f64,
    /// Number of intervals `n`, a power of two.
    pub intervals: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { length: 32.0, intervals: 4096 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub dt: f64,
    pub t_final: f64,
    pub sample_every: usize,
    pub nonlinear: bool,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self { dt: 1e-3, t_final: 10.0, sample_every: 10, nonlinear: true }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FtmSection {
    pub s: f64,
    pub j: i32,
    /// `None` selects the automatic horizon `2^{2J(2s−3/2)}`; `sweep` always
    /// uses the automatic horizon of each level.
    pub horizon: Option<f64>,
    pub dt: f64,
    /// `None` selects `2^{J(1/2−s)}`.
    pub eps: Option<f64>,
    pub smallness_constant: f64,
    pub sample_every: usize,
    pub track_direct: bool,
    /// Levels of the `sweep` subcommand.
    pub sweep_j: Vec<i32>,
}

impl Default for FtmSection {
    fn default() -> Self {
        Self {
            s: 0.875,
            j: 5,
            horizon: None,
            dt: 1.0 / 1024.0,
            eps: None,
            smallness_constant: 1.0,
            sample_every: 16,
            track_direct: true,
            sweep_j: vec![4, 5, 6],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    Gaussian,
    WeightedGaussian,
    RhoExp,
    SineArch,
    PowerLawShell,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataSection {
    pub profile: Profile,
    pub amplitude: f64,
    /// Offset `ρ₀` from the boundary.
    pub center: f64,
    pub width: f64,
    /// Decay exponent of the power-law shell.
    pub beta: f64,
    /// Initial velocity as a multiple of the same profile.
    pub velocity_scale: f64,
}

impl Default for DataSection {
    fn default() -> Self {
        Self { profile: Profile::Gaussian, amplitude: 1.0, center: 3.0, width: 0.5, beta: 0.4, velocity_scale: 0.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeSection {
    /// Dyadic exponents `k` with `N = 2^k`.
    pub exponents: Vec<i32>,
    pub times: Vec<f64>,
    /// Space exponent for `endpoint`, time exponent for `strichartz`.
    pub q: f64,
    pub r: f64,
    pub rho: f64,
    pub horizons: Vec<f64>,
    pub dt_sample: f64,
    pub selftest_fields: usize,
    pub seed: u64,
}

impl Default for ProbeSection {
    fn default() -> Self {
        Self {
            exponents: vec![0, 1, 2],
            times: (0..=6).map(|k| f64::from(1 << k)).collect(),
            q: 6.0,
            r: 6.0,
            rho: 0.0,
            horizons: vec![32.0, 64.0],
            dt_sample: 0.05,
            selftest_fields: 20,
            seed: 20,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Must agree with the command line when given.
    pub subcommand: Option<Subcommand>,
    pub grid: GridConfig,
    pub solver: SolverSection,
    pub ftm: FtmSection,
    pub data: DataSection,
    pub probe: ProbeSection,
    pub output_dir: PathBuf,
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            subcommand: None,
            grid: GridConfig::default(),
            solver: SolverSection::default(),
            ftm: FtmSection::default(),
            data: DataSection::default(),
            probe: ProbeSection::default(),
            output_dir: PathBuf::from("out"),
            threads: 1,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Applies command-line overrides and checks the parts that do not need
    /// a grid.
    pub fn resolve(
        mut self,
        cmd: Subcommand,
        output_dir: Option<PathBuf>,
        threads: Option<usize>,
    ) -> Result<Self, CliError> {
        match self.subcommand {
            Some(c) if c != cmd => {
                return Err(CliError::Config(format!(
                    "config is for subcommand '{}' but '{}' was requested",
                    c.name(),
                    cmd.name()
                )))
            }
            _ => self.subcommand = Some(cmd),
        }
        if let Some(dir) = output_dir {
            self.output_dir = dir;
        }
        if let Some(t) = threads {
            self.threads = t;
        }
        if self.threads == 0 {
            return Err(CliError::Config("threads must be at least 1".into()));
        }
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(CliError::Config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("solver.dt", self.solver.dt)?;
        positive("ftm.dt", self.ftm.dt)?;
        positive("probe.dt_sample", self.probe.dt_sample)?;
        positive("data.width", self.data.width)?;
        if self.solver.t_final.is_nan() || self.solver.t_final < 0.0 {
            return Err(CliError::Config("solver.t_final must be non-negative".into()));
        }
        if self.solver.sample_every == 0 || self.ftm.sample_every == 0 {
            return Err(CliError::Config("sample_every must be at least 1".into()));
        }
        if self.probe.times.is_empty() || self.probe.horizons.is_empty() || self.probe.exponents.is_empty() {
            return Err(CliError::Config("probe lists must be nonempty".into()));
        }
        if cmd == Subcommand::Sweep && self.ftm.sweep_j.len() < 2 {
            return Err(CliError::Config("ftm.sweep_j needs at least two levels".into()));
        }
        if cmd == Subcommand::Ftm {
            let (s, j) = (self.ftm.s, self.ftm.j);
            self.ftm.horizon.get_or_insert_with(|| ftm::auto_horizon(s, j));
            self.ftm.eps.get_or_insert_with(|| ftm::critical_norm(s, j));
        }
        Ok(self)
    }

    pub fn subcommand(&self) -> Subcommand {
        self.subcommand.expect("resolved config")
    }
}
