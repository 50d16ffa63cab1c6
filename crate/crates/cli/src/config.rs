//! Run configuration: built-in defaults, overlaid by a TOML file, overlaid by
//! command-line flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context};
use entcool_core::cooling::CoolingConfig;
use entcool_core::ising::DEFAULT_MAX_SITES;
use entcool_core::spectrum::DEFAULT_DROP;
use entcool_core::{ChainSpec, GateSet, DEFAULT_DT};
use serde::{Deserialize, Serialize};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "ENTCOOL_WORKERS";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    /// Worker threads; `None` defers to the environment, then to the number of CPUs.
    pub workers: Option<usize>,
    pub out: PathBuf,
    /// Write one JSON-lines log per ensemble with every trajectory's record.
    pub trajectory_logs: bool,
    pub cooling: CoolingParams,
    pub phase_scan: PhaseScanParams,
    pub cool: CoolParams,
    pub scaling: ScalingParams,
    pub spectrum: SpectrumParams,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: 0,
            workers: None,
            out: PathBuf::from("results"),
            trajectory_logs: true,
            cooling: CoolingParams::default(),
            phase_scan: PhaseScanParams::default(),
            cool: CoolParams::default(),
            scaling: ScalingParams::default(),
            spectrum: SpectrumParams::default(),
        }
    }
}

/// Metropolis parameters shared by every cooling preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoolingParams {
    pub steps: usize,
    pub trajectories: usize,
    pub n_temperatures: usize,
    pub t_high: f64,
    pub t_low: f64,
    pub alpha: f64,
    pub dt: f64,
    pub renorm_interval: usize,
}

impl Default for CoolingParams {
    fn default() -> Self {
        let c = CoolingConfig::default();
        Self {
            steps: c.total_steps,
            trajectories: c.n_trajectories,
            n_temperatures: c.n_temperatures,
            t_high: c.t_high,
            t_low: c.t_low,
            alpha: c.alpha,
            dt: DEFAULT_DT,
            renorm_interval: c.renorm_interval,
        }
    }
}

impl CoolingParams {
    pub fn to_config(&self, gate_set: GateSet, base_seed: u64, record_spectra: bool) -> CoolingConfig {
        CoolingConfig {
            gate_set,
            total_steps: self.steps,
            n_temperatures: self.n_temperatures,
            t_high: self.t_high,
            t_low: self.t_low,
            alpha: self.alpha,
            dt: self.dt,
            n_trajectories: self.trajectories,
            base_seed,
            renorm_interval: self.renorm_interval,
            record_spectra,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhaseScanParams {
    pub sizes: Vec<usize>,
    pub j_over_h: Vec<f64>,
}

impl Default for PhaseScanParams {
    fn default() -> Self {
        // Steps of 1/4 on [−3, 3], skipping the critical points.
        let j_over_h = (-12..=12).filter(|k: &i32| k.abs() != 4).map(|k| f64::from(k) / 4.0).collect();
        Self { sizes: vec![9, 11, 13], j_over_h }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoolParams {
    pub sizes: Vec<usize>,
    pub j_over_h: Vec<f64>,
    pub gate_sets: Vec<String>,
}

impl Default for CoolParams {
    fn default() -> Self {
        Self { sizes: vec![13], j_over_h: vec![-2.5, 0.75, 2.5], gate_sets: both_sets() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingParams {
    pub sizes: Vec<usize>,
    pub j_over_h: f64,
    pub gate_sets: Vec<String>,
    pub plateau_tolerance: f64,
}

impl Default for ScalingParams {
    fn default() -> Self {
        Self { sizes: vec![9, 11, 13], j_over_h: 2.5, gate_sets: vec!["universal".into()], plateau_tolerance: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumParams {
    pub n_sites: usize,
    pub j_over_h: Vec<f64>,
    pub gate_sets: Vec<String>,
    pub n_drop: usize,
    pub bins: usize,
    /// Upper edge of the raw-ratio histogram; the min/max form always uses [0, 1].
    pub raw_max: f64,
}

impl Default for SpectrumParams {
    fn default() -> Self {
        Self { n_sites: 13, j_over_h: vec![2.5], gate_sets: both_sets(), n_drop: DEFAULT_DROP, bins: 25, raw_max: 5.0 }
    }
}

fn both_sets() -> Vec<String> {
    vec!["set1".into(), "universal".into()]
}

impl Config {
    /// Reads a TOML file; absent keys keep their defaults.
    pub fn from_file(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Worker count: the configured value, else `ENTCOOL_WORKERS`, else the
    /// available parallelism.
    pub fn resolved_workers(&self) -> anyhow::Result<usize> {
        let n = match self.workers {
            Some(n) => n,
            None => match std::env::var(WORKERS_ENV) {
                Ok(v) => v.trim().parse().with_context(|| format!("{WORKERS_ENV}={v:?} is not a worker count"))?,
                Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
            },
        };
        if n == 0 {
            bail!("worker count must be at least 1");
        }
        Ok(n)
    }

    pub fn validate_cooling(&self) -> anyhow::Result<()> {
        let c = &self.cooling;
        if c.trajectories < 1 {
            bail!("cooling.trajectories must be at least 1 (got {})", c.trajectories);
        }
        c.to_config(GateSet::Universal, self.seed, false).validate().context("invalid cooling parameters")?;
        Ok(())
    }
}

pub fn parse_gate_sets(names: &[String]) -> anyhow::Result<Vec<GateSet>> {
    if names.is_empty() {
        bail!("at least one gate set is required");
    }
    names
        .iter()
        .map(|n| GateSet::from_str(n).map_err(|_| anyhow::anyhow!("unknown gate set {n:?} (expected set1 or universal)")))
        .collect()
}

/// Checks that `n` sites at ratio `j_over_h` form a chain with a defined phase.
pub fn validate_chain(n: usize, j_over_h: f64) -> anyhow::Result<ChainSpec> {
    if n % 2 == 0 {
        bail!("N = {n} is even; the ring needs an odd number of sites");
    }
    if !(3..=DEFAULT_MAX_SITES).contains(&n) {
        bail!("N = {n} is outside [3, {DEFAULT_MAX_SITES}]");
    }
    if !j_over_h.is_finite() {
        bail!("J/h = {j_over_h} is not finite");
    }
    if j_over_h.abs() == 1.0 {
        bail!("J/h = {j_over_h} is a critical point with no phase label");
    }
    Ok(ChainSpec::from_ratio(n, j_over_h)?)
}

pub fn validate_sizes(sizes: &[usize]) -> anyhow::Result<()> {
    if sizes.is_empty() {
        bail!("at least one chain size is required");
    }
    for &n in sizes {
        validate_chain(n, 0.5)?;
    }
    Ok(())
}

pub fn validate_ratios(ratios: &[f64]) -> anyhow::Result<()> {
    if ratios.is_empty() {
        bail!("at least one J/h value is required");
    }
    for &r in ratios {
        validate_chain(3, r)?;
    }
    Ok(())
}
