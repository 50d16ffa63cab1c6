//! Experiment presets: parameter validation, dry-run planning and execution.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context};
use entcool_core::cooling::{plateau_gap, plateau_length, CoolingConfig, EnsembleResult};
use entcool_core::entanglement::{averaged_half_chain_entropy, concurrence};
use entcool_core::spectrum::{bin_average, fit_exponential, histogram, Histogram, RmtFamily, SpacingEnsemble};
use entcool_core::{build_hamiltonian, classify_phase, ground_state_with, ChainSpec, GroundStateOptions, StateVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{parse_gate_sets, validate_chain, validate_ratios, validate_sizes, Config};
use crate::ensemble::run_parallel;
use crate::output::{timestamp, OutputDir};
use crate::progress::{Progress, ProgressEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    PhaseScan,
    Cool,
    Scaling,
    Spectrum,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::PhaseScan, Preset::Cool, Preset::Scaling, Preset::Spectrum];

    pub fn name(self) -> &'static str {
        match self {
            Preset::PhaseScan => "phase-scan",
            Preset::Cool => "cool",
            Preset::Scaling => "scaling",
            Preset::Spectrum => "spectrum",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything a preset needs besides its parameters.
pub struct RunContext<'a> {
    pub config: &'a Config,
    pub pool: &'a rayon::ThreadPool,
    pub workers: usize,
    pub progress: &'a Progress,
}

/// `fm_J-2.5`, `para_J0.75`, `afm_J2.5`.
pub fn phase_tag(j_over_h: f64) -> String {
    let label = ChainSpec::from_ratio(3, j_over_h).ok().and_then(|s| classify_phase(&s).ok());
    format!("{}_J{}", label.map_or("crit", |l| l.short_name()), j_over_h)
}

/// Canonical ground state of the `n`-site ring at `j_over_h` with `h = 1`.
pub fn ground(n: usize, j_over_h: f64) -> anyhow::Result<StateVector> {
    let h = build_hamiltonian(&validate_chain(n, j_over_h)?);
    let gs = ground_state_with(&h, &GroundStateOptions::default()).with_context(|| format!("ground state N={n} J/h={j_over_h}"))?;
    Ok(gs.state)
}

/// Validates the parameters `preset` uses, before any computation.
pub fn validate(preset: Preset, cfg: &Config) -> anyhow::Result<()> {
    match preset {
        Preset::PhaseScan => {
            validate_sizes(&cfg.phase_scan.sizes)?;
            validate_ratios(&cfg.phase_scan.j_over_h)?;
        }
        Preset::Cool => {
            cfg.validate_cooling()?;
            validate_sizes(&cfg.cool.sizes)?;
            validate_ratios(&cfg.cool.j_over_h)?;
            parse_gate_sets(&cfg.cool.gate_sets)?;
        }
        Preset::Scaling => {
            cfg.validate_cooling()?;
            validate_sizes(&cfg.scaling.sizes)?;
            validate_ratios(&[cfg.scaling.j_over_h])?;
            parse_gate_sets(&cfg.scaling.gate_sets)?;
            if !(cfg.scaling.plateau_tolerance > 0.0) {
                bail!("scaling.plateau_tolerance must be positive");
            }
        }
        Preset::Spectrum => {
            cfg.validate_cooling()?;
            validate_sizes(&[cfg.spectrum.n_sites])?;
            validate_ratios(&cfg.spectrum.j_over_h)?;
            parse_gate_sets(&cfg.spectrum.gate_sets)?;
            if cfg.spectrum.bins == 0 || !(cfg.spectrum.raw_max > 0.0) {
                bail!("spectrum.bins and spectrum.raw_max must be positive");
            }
        }
    }
    Ok(())
}

/// What a preset would do, as reported by `--dry-run`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Plan {
    pub preset: String,
    pub tasks: Vec<String>,
    pub trajectories: usize,
    pub metropolis_steps: u64,
    pub max_sites: usize,
    pub workers: usize,
    /// Peak bytes of state vectors and ground-state workspaces held at once.
    pub state_memory_bytes: u64,
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "preset {}: {} task(s)", self.preset, self.tasks.len())?;
        for t in &self.tasks {
            writeln!(f, "  {t}")?;
        }
        writeln!(f, "planned trajectories: {}", self.trajectories)?;
        writeln!(f, "planned Metropolis steps: {}", self.metropolis_steps)?;
        writeln!(f, "largest chain: N = {} ({} workers)", self.max_sites, self.workers)?;
        write!(f, "estimated state-vector memory: {} bytes ({:.1} MiB)", self.state_memory_bytes, self.state_memory_bytes as f64 / 1048576.0)
    }
}

/// Bytes held at once: per worker a state, its trial copy and an RDM
/// workspace; plus one Lanczos basis for the ground state.
fn memory_estimate(max_sites: usize, workers: usize, concurrent: usize) -> u64 {
    let dim = 1u64 << max_sites;
    let per_worker = 3 * dim * 16;
    let krylov = if max_sites > entcool_core::ising::DEFAULT_DENSE_MAX_SITES { 66 * (dim / 2) * 8 } else { dim * dim * 8 };
    per_worker * workers.min(concurrent.max(1)) as u64 + krylov
}

pub fn plan(preset: Preset, cfg: &Config, workers: usize) -> anyhow::Result<Plan> {
    validate(preset, cfg)?;
    let c = &cfg.cooling;
    let (tasks, trajectories, max_sites): (Vec<String>, usize, usize) = match preset {
        Preset::PhaseScan => {
            let s = &cfg.phase_scan;
            let tasks = s.sizes.iter().map(|n| format!("N={n}: {} couplings", s.j_over_h.len())).collect();
            (tasks, 0, *s.sizes.iter().max().expect("validated"))
        }
        Preset::Cool => {
            let p = &cfg.cool;
            let mut tasks = Vec::new();
            for &n in &p.sizes {
                for &r in &p.j_over_h {
                    for set in &p.gate_sets {
                        tasks.push(format!("cool {} {set} N={n}", phase_tag(r)));
                    }
                }
            }
            let m = tasks.len() * c.trajectories;
            (tasks, m, *p.sizes.iter().max().expect("validated"))
        }
        Preset::Scaling => {
            let p = &cfg.scaling;
            let tasks: Vec<String> = p
                .gate_sets
                .iter()
                .flat_map(|set| p.sizes.iter().map(move |n| format!("scaling {} {set} N={n}", phase_tag(p.j_over_h))))
                .collect();
            let m = tasks.len() * c.trajectories;
            (tasks, m, *p.sizes.iter().max().expect("validated"))
        }
        Preset::Spectrum => {
            let p = &cfg.spectrum;
            let tasks: Vec<String> = p
                .gate_sets
                .iter()
                .flat_map(|set| p.j_over_h.iter().map(move |&r| format!("spectrum {} {set} N={}", phase_tag(r), p.n_sites)))
                .collect();
            let m = tasks.len() * spectrum_trajectories(cfg);
            (tasks, m, p.n_sites)
        }
    };
    Ok(Plan {
        preset: preset.name().to_owned(),
        metropolis_steps: trajectories as u64 * c.steps as u64,
        state_memory_bytes: memory_estimate(max_sites, workers, trajectories),
        tasks,
        trajectories,
        max_sites,
        workers,
    })
}

/// Without cooling steps every trajectory would repeat the ground state.
fn spectrum_trajectories(cfg: &Config) -> usize {
    if cfg.cooling.steps == 0 {
        1
    } else {
        cfg.cooling.trajectories
    }
}

/// Paths written by a preset run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub manifest: PathBuf,
    pub files: Vec<String>,
}

pub fn run(preset: Preset, ctx: &RunContext<'_>) -> anyhow::Result<RunOutcome> {
    validate(preset, ctx.config)?;
    let started_at = timestamp();
    let clock = Instant::now();
    let plan = plan(preset, ctx.config, ctx.workers)?;
    ctx.progress.emit(&ProgressEvent::RunStarted {
        preset: preset.name().to_owned(),
        tasks: plan.tasks.len(),
        trajectories: plan.trajectories,
    });
    let mut out = OutputDir::create(&ctx.config.out)?;
    let notes = match preset {
        Preset::PhaseScan => run_phase_scan(ctx, &mut out)?,
        Preset::Cool => run_cool(ctx, &mut out)?,
        Preset::Scaling => run_scaling(ctx, &mut out)?,
        Preset::Spectrum => run_spectrum(ctx, &mut out)?,
    };
    let files = out.entries().iter().map(|e| e.path.clone()).collect::<Vec<_>>();
    let manifest = out.finish(preset.name(), ctx.config, ctx.workers, started_at, notes)?;
    ctx.progress.emit(&ProgressEvent::RunDone {
        preset: preset.name().to_owned(),
        outputs: files.len(),
        elapsed_s: clock.elapsed().as_secs_f64(),
    });
    Ok(RunOutcome { manifest, files })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseScanRow {
    #[serde(rename = "J_over_h")]
    pub j_over_h: f64,
    #[serde(rename = "N")]
    pub n_sites: usize,
    #[serde(rename = "S2_avg")]
    pub s2_avg: f64,
    pub concurrence_nn: f64,
}

/// `S̄₂` and the nearest-neighbour concurrence averaged over all `N` bonds.
pub fn phase_point(n: usize, j_over_h: f64) -> anyhow::Result<PhaseScanRow> {
    let state = ground(n, j_over_h)?;
    let s2_avg = averaged_half_chain_entropy(&state, 2.0)?.average;
    let c = (0..n).map(|j| concurrence(&state, j, (j + 1) % n)).sum::<entcool_core::Result<f64>>()? / n as f64;
    Ok(PhaseScanRow { j_over_h, n_sites: n, s2_avg, concurrence_nn: c })
}

fn run_phase_scan(ctx: &RunContext<'_>, out: &mut OutputDir) -> anyhow::Result<Vec<String>> {
    let p = &ctx.config.phase_scan;
    let points: Vec<(usize, f64)> = p.sizes.iter().flat_map(|&n| p.j_over_h.iter().map(move |&r| (n, r))).collect();
    let total = points.len();
    let done = std::sync::atomic::AtomicUsize::new(0);
    let rows = ctx.pool.install(|| {
        points
            .par_iter()
            .map(|&(n, r)| {
                let row = phase_point(n, r)?;
                let completed = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
                ctx.progress.emit(&ProgressEvent::PointDone { task: "phase-scan".into(), n_sites: n, j_over_h: r, completed, total });
                Ok(row)
            })
            .collect::<anyhow::Result<Vec<_>>>()
    })?;
    out.write_csv("phase_scan.csv", &rows)?;
    Ok(vec![
        "S2_avg is the Rényi-2 entropy in bits averaged over the N contiguous blocks of (N-1)/2 sites.".into(),
        "concurrence_nn is the Wootters concurrence averaged over the N nearest-neighbour pairs.".into(),
        format!("J/h grid: {:?} with h = 1.", p.j_over_h),
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct CoolingRow {
    pub step: usize,
    pub temperature: f64,
    pub mean_S2: f64,
    pub stderr_S2: f64,
    pub accept_rate: f64,
}

pub fn cooling_rows(result: &EnsembleResult) -> anyhow::Result<Vec<CoolingRow>> {
    let schedule = result.config.schedule()?;
    Ok((0..result.mean_trace.len())
        .map(|k| CoolingRow {
            step: k,
            // Row k holds the state after step k, taken at that step's temperature.
            temperature: if k == 0 { result.config.t_high } else { schedule.temperature(k - 1) },
            mean_S2: result.mean_trace[k],
            stderr_S2: result.stderr_trace[k],
            accept_rate: result.accept_rate_trace[k],
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryLog<'a> {
    pub task: &'a str,
    pub trajectory_index: usize,
    pub base_seed: u64,
    pub n_sites: usize,
    pub j_over_h: f64,
    pub gate_set: &'a str,
    pub accepted_count: usize,
    pub entropy_trace: &'a [f64],
    /// One character per step, `1` for an accepted move.
    pub accept_trace: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct CoolingSummaryRow {
    pub phase: String,
    #[serde(rename = "J_over_h")]
    pub j_over_h: f64,
    pub gate_set: String,
    #[serde(rename = "N")]
    pub n_sites: usize,
    pub initial_S2: f64,
    pub final_S2: f64,
    pub plateau_length: usize,
    pub plateau_undefined: bool,
    pub plateau_gap: f64,
    pub file: String,
}

/// One cooled ensemble with its trace CSV and optional trajectory log written.
struct CooledTask {
    result: EnsembleResult,
    summary: CoolingSummaryRow,
}

fn cool_task(
    ctx: &RunContext<'_>,
    preset: Preset,
    out: &mut OutputDir,
    initial: &StateVector,
    n: usize,
    j_over_h: f64,
    config: CoolingConfig,
) -> anyhow::Result<CooledTask> {
    let set = config.gate_set;
    let phase = phase_tag(j_over_h);
    let task = format!("{phase}_{}_N{n}", set.name());
    let clock = Instant::now();
    ctx.progress.emit(&ProgressEvent::TaskStarted { task: task.clone(), trajectories: config.n_trajectories });
    let result = run_parallel(ctx.pool, initial, &config, &task, ctx.progress).with_context(|| format!("task {task}"))?;
    ctx.progress.emit(&ProgressEvent::TaskDone { task: task.clone(), final_mean: result.final_mean(), elapsed_s: clock.elapsed().as_secs_f64() });

    // Presets share an output directory, so traces they write are kept apart.
    let file = match preset {
        Preset::Cool => format!("cooling_{task}.csv"),
        other => format!("{}_cooling_{task}.csv", other.name()),
    };
    out.write_csv(&file, &cooling_rows(&result)?)?;
    if ctx.config.trajectory_logs {
        let logs = result.per_trajectory.iter().map(|r| TrajectoryLog {
            task: &task,
            trajectory_index: r.trajectory_index,
            base_seed: r.base_seed,
            n_sites: n,
            j_over_h,
            gate_set: set.name(),
            accepted_count: r.accepted_count,
            entropy_trace: &r.entropy_trace,
            accept_trace: r.accept_trace.iter().map(|&a| if a { '1' } else { '0' }).collect(),
        });
        out.write_jsonl(&format!("logs/{}/{task}.jsonl", preset.name()), logs)?;
    }
    let plateau = plateau_length(&result.mean_trace, ctx.config.scaling.plateau_tolerance);
    let summary = CoolingSummaryRow {
        phase: phase.split('_').next().unwrap_or_default().to_owned(),
        j_over_h,
        gate_set: set.name().to_owned(),
        n_sites: n,
        initial_S2: result.mean_trace[0],
        final_S2: result.final_mean(),
        plateau_length: plateau.length,
        plateau_undefined: plateau.undefined,
        plateau_gap: plateau_gap(&result.mean_trace),
        file,
    };
    Ok(CooledTask { result, summary })
}

fn cooling_notes(cfg: &Config) -> Vec<String> {
    vec![
        format!("mean_S2 is the Rényi-{} entropy in bits averaged over the N half-chain blocks.", cfg.cooling.alpha),
        "Row k is the ensemble after k Metropolis steps; temperature is the one used for step k (row 0 shows t_high).".into(),
        "stderr_S2 is the standard error of the mean over trajectories; accept_rate is the fraction of trajectories accepting step k.".into(),
        format!("plateau_length is the first step whose mean departs from the initial value by more than {} of it.", cfg.scaling.plateau_tolerance),
    ]
}

fn run_cool(ctx: &RunContext<'_>, out: &mut OutputDir) -> anyhow::Result<Vec<String>> {
    let cfg = ctx.config;
    let p = &cfg.cool;
    let sets = parse_gate_sets(&p.gate_sets)?;
    let mut summary = Vec::new();
    for &n in &p.sizes {
        for &r in &p.j_over_h {
            let initial = ground(n, r)?;
            for &set in &sets {
                let config = cfg.cooling.to_config(set, cfg.seed, false);
                let task = cool_task(ctx, Preset::Cool, out, &initial, n, r, config)?;
                summary.push(task.summary);
            }
        }
    }
    out.write_csv("cooling_summary.csv", &summary)?;
    Ok(cooling_notes(cfg))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[allow(non_snake_case)]
pub struct ScalingRow {
    pub gate_set: String,
    #[serde(rename = "N")]
    pub n_sites: usize,
    pub plateau_length: usize,
    pub plateau_undefined: bool,
    pub plateau_gap: f64,
    pub initial_S2: f64,
    pub final_S2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitRow {
    pub gate_set: String,
    pub quantity: String,
    pub a: f64,
    pub b: f64,
    pub residual: f64,
}

fn run_scaling(ctx: &RunContext<'_>, out: &mut OutputDir) -> anyhow::Result<Vec<String>> {
    let cfg = ctx.config;
    let p = &cfg.scaling;
    let sets = parse_gate_sets(&p.gate_sets)?;
    let mut notes = cooling_notes(cfg);
    let mut rows = Vec::new();
    let mut fits = Vec::new();
    let mut grounds = BTreeMap::new();
    for &set in &sets {
        let mut set_rows = Vec::new();
        for &n in &p.sizes {
            if let Entry::Vacant(slot) = grounds.entry(n) {
                slot.insert(ground(n, p.j_over_h)?);
            }
            let config = cfg.cooling.to_config(set, cfg.seed, false);
            let task = cool_task(ctx, Preset::Scaling, out, &grounds[&n], n, p.j_over_h, config)?;
            let s = task.summary;
            set_rows.push(ScalingRow {
                gate_set: s.gate_set,
                n_sites: n,
                plateau_length: s.plateau_length,
                plateau_undefined: s.plateau_undefined,
                plateau_gap: s.plateau_gap,
                initial_S2: s.initial_S2,
                final_S2: s.final_S2,
            });
        }
        for quantity in ["plateau_gap", "plateau_length"] {
            let points: Vec<(f64, f64)> = set_rows
                .iter()
                .map(|r| (r.n_sites as f64, if quantity == "plateau_gap" { r.plateau_gap } else { r.plateau_length as f64 }))
                .collect();
            let (a, b, residual) = match fit_exponential(&points) {
                Ok(f) => (f.a, f.b, f.residual),
                Err(e) => {
                    log::warn!("no exponential fit of {quantity} for {}: {e}", set.name());
                    notes.push(format!("{quantity} fit for {} unavailable: {e}", set.name()));
                    (f64::NAN, f64::NAN, f64::NAN)
                }
            };
            fits.push(FitRow { gate_set: set.name().to_owned(), quantity: quantity.to_owned(), a, b, residual });
        }
        rows.extend(set_rows);
    }
    out.write_csv("scaling.csv", &rows)?;
    out.write_csv("scaling_fit.csv", &fits)?;
    notes.push("Fits are y = a·exp(b·N), least squares on ln y.".into());
    Ok(notes)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub bin_left: f64,
    pub bin_right: f64,
    pub density: f64,
    pub reference_poisson: f64,
    pub reference_wd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSummaryRow {
    pub phase: String,
    /// Empty for rows pooling several couplings.
    #[serde(rename = "J_over_h")]
    pub j_over_h: Option<f64>,
    pub gate_set: String,
    #[serde(rename = "N")]
    pub n_sites: usize,
    pub steps: usize,
    pub trajectories: usize,
    pub rbar: f64,
    pub n_ratios: usize,
    pub n_degenerate: usize,
    pub l1_poisson: f64,
    pub l1_wd: f64,
    pub raw_file: String,
    pub tilde_file: String,
}

/// Histogram rows with reference densities averaged over each bin and
/// conditioned on the histogram range.
pub fn spectrum_rows(h: &Histogram, reference: impl Fn(RmtFamily, f64) -> f64, range_mass: impl Fn(RmtFamily) -> f64) -> Vec<SpectrumRow> {
    (0..h.densities.len())
        .map(|b| {
            let edges = h.bin_edges(b);
            let r = |fam| bin_average(|x| reference(fam, x), edges) / range_mass(fam);
            SpectrumRow {
                bin_left: edges.0,
                bin_right: edges.1,
                density: h.densities[b],
                reference_poisson: r(RmtFamily::Poisson),
                reference_wd: r(RmtFamily::WignerDysonGue),
            }
        })
        .collect()
}

fn min_max_reference(fam: RmtFamily, x: f64) -> f64 {
    fam.min_max_density(x).unwrap_or(0.0)
}

/// Histograms of one pooled ensemble.
pub struct SpectrumStats {
    pub ensemble: SpacingEnsemble,
    pub raw: Histogram,
    pub tilde: Histogram,
}

impl SpectrumStats {
    pub fn new(ensemble: SpacingEnsemble, bins: usize, raw_max: f64) -> anyhow::Result<Self> {
        if ensemble.ratios.is_empty() {
            bail!("no spacing ratios survived ({} degenerate)", ensemble.n_degenerate);
        }
        let raw = histogram(&ensemble.ratios, bins, (0.0, raw_max))?;
        let tilde = histogram(&ensemble.min_max_ratios(), bins, (0.0, 1.0))?;
        Ok(Self { ensemble, raw, tilde })
    }

    pub fn l1(&self, fam: RmtFamily) -> f64 {
        self.tilde.l1_distance(|x| min_max_reference(fam, x))
    }

    fn write(&self, out: &mut OutputDir, stem: &str, raw_max: f64) -> anyhow::Result<(String, String)> {
        let raw_file = format!("spectrum_{stem}.csv");
        let tilde_file = format!("spectrum_tilde_{stem}.csv");
        let raw_rows = spectrum_rows(&self.raw, |f, x| f.density(x).unwrap_or(0.0), |f| f.cdf(raw_max));
        out.write_csv(&raw_file, &raw_rows)?;
        out.write_csv(&tilde_file, &spectrum_rows(&self.tilde, min_max_reference, |_| 1.0))?;
        Ok((raw_file, tilde_file))
    }
}

fn run_spectrum(ctx: &RunContext<'_>, out: &mut OutputDir) -> anyhow::Result<Vec<String>> {
    let cfg = ctx.config;
    let p = &cfg.spectrum;
    let n = p.n_sites;
    let sets = parse_gate_sets(&p.gate_sets)?;
    let trajectories = spectrum_trajectories(cfg);
    let mut summary = Vec::new();
    let mut grounds = BTreeMap::new();
    for &set in &sets {
        let mut pooled = SpacingEnsemble::default();
        for &r in &p.j_over_h {
            if let Entry::Vacant(slot) = grounds.entry(r.to_bits()) {
                slot.insert(ground(n, r)?);
            }
            let config = CoolingConfig { n_trajectories: trajectories, ..cfg.cooling.to_config(set, cfg.seed, true) };
            let task = cool_task(ctx, Preset::Spectrum, out, &grounds[&r.to_bits()], n, r, config)?;
            let spectra = task.result.per_trajectory.iter().flat_map(|t| t.final_spectra.iter().map(|s| s.eigenvalues.as_slice()));
            let ensemble = SpacingEnsemble::from_spectra(spectra, p.n_drop)?;
            pooled.ratios.extend_from_slice(&ensemble.ratios);
            pooled.n_degenerate += ensemble.n_degenerate;
            pooled.n_spectra += ensemble.n_spectra;
            let stats = SpectrumStats::new(ensemble, p.bins, p.raw_max).with_context(|| format!("J/h={r} {}", set.name()))?;
            let phase = phase_tag(r);
            let (raw_file, tilde_file) = stats.write(out, &format!("{phase}_{}_N{n}", set.name()), p.raw_max)?;
            summary.push(SpectrumSummaryRow {
                phase: task.summary.phase,
                j_over_h: Some(r),
                gate_set: set.name().to_owned(),
                n_sites: n,
                steps: cfg.cooling.steps,
                trajectories,
                rbar: stats.ensemble.rbar()?,
                n_ratios: stats.ensemble.ratios.len(),
                n_degenerate: stats.ensemble.n_degenerate,
                l1_poisson: stats.l1(RmtFamily::Poisson),
                l1_wd: stats.l1(RmtFamily::WignerDysonGue),
                raw_file,
                tilde_file,
            });
        }
        if p.j_over_h.len() > 1 {
            let stats = SpectrumStats::new(pooled, p.bins, p.raw_max)?;
            let (raw_file, tilde_file) = stats.write(out, &format!("pooled_{}_N{n}", set.name()), p.raw_max)?;
            summary.push(SpectrumSummaryRow {
                phase: "pooled".into(),
                j_over_h: None,
                gate_set: set.name().to_owned(),
                n_sites: n,
                steps: cfg.cooling.steps,
                trajectories,
                rbar: stats.ensemble.rbar()?,
                n_ratios: stats.ensemble.ratios.len(),
                n_degenerate: stats.ensemble.n_degenerate,
                l1_poisson: stats.l1(RmtFamily::Poisson),
                l1_wd: stats.l1(RmtFamily::WignerDysonGue),
                raw_file,
                tilde_file,
            });
        }
    }
    out.write_csv("spectrum_summary.csv", &summary)?;
    let mut notes = cooling_notes(cfg);
    notes.extend([
        format!("Ratios pool every block offset of every trajectory; the {} largest eigenvalues of each spectrum are dropped, keeping at least 16.", p.n_drop),
        format!("Ratios whose lower spacing is below {:e} are discarded and counted in n_degenerate.", entcool_core::spectrum::DEGENERATE_SPACING),
        format!("spectrum_*.csv bin the raw ratio r on [0, {}]; reference columns are P(r) conditioned on that range.", p.raw_max),
        "spectrum_tilde_*.csv bin min(r, 1/r) on [0, 1] against 2·P; l1_* distances use these.".into(),
    ]);
    if cfg.cooling.steps == 0 {
        notes.push("With zero cooling steps a single trajectory per coupling is used.".into());
    }
    Ok(notes)
}
