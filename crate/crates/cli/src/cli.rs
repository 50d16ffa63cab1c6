//! Argument parsing and dispatch for the `entcool` binary.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Config, WORKERS_ENV};
use crate::ensemble::thread_pool;
use crate::plot;
use crate::presets::{self, Preset, RunContext};
use crate::progress::Progress;

#[derive(Debug, Parser)]
#[command(name = "entcool", version, about = "Entanglement cooling of transverse-field Ising rings")]
pub struct Cli {
    /// TOML file overriding the built-in defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Base seed of every trajectory stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads [default: config file, then $ENTCOOL_WORKERS, then CPU count].
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Validate and print the plan without computing anything.
    #[arg(long, global = true)]
    pub dry_run: bool,
    /// Suppress the JSON progress events on stderr.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ground-state entanglement and concurrence across J/h.
    PhaseScan {
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        j_over_h: Option<Vec<f64>>,
    },
    /// Cooling traces for each phase and gate set.
    Cool {
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        j_over_h: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        gate_sets: Option<Vec<String>>,
        #[command(flatten)]
        cooling: CoolingArgs,
    },
    /// Plateau length and gap against chain size, with exponential fits.
    Scaling {
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[arg(long, allow_hyphen_values = true)]
        j_over_h: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        gate_sets: Option<Vec<String>>,
        #[arg(long)]
        plateau_tolerance: Option<f64>,
        #[command(flatten)]
        cooling: CoolingArgs,
    },
    /// Level-spacing statistics of the cooled entanglement spectra.
    Spectrum {
        #[arg(long)]
        n_sites: Option<usize>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        j_over_h: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        gate_sets: Option<Vec<String>>,
        #[arg(long)]
        n_drop: Option<usize>,
        #[arg(long)]
        bins: Option<usize>,
        #[command(flatten)]
        cooling: CoolingArgs,
    },
    /// Write matplotlib scripts for the tables found in the output directory.
    Plot,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CoolingArgs {
    /// Metropolis steps per trajectory.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Independent trajectories per ensemble.
    #[arg(long)]
    pub trajectories: Option<usize>,
    #[arg(long)]
    pub n_temperatures: Option<usize>,
    #[arg(long)]
    pub t_high: Option<f64>,
    #[arg(long)]
    pub t_low: Option<f64>,
    /// Rényi index of the cost function.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Gate time step.
    #[arg(long)]
    pub dt: Option<f64>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl CoolingArgs {
    fn apply(&self, cfg: &mut Config) {
        let c = &mut cfg.cooling;
        set(&mut c.steps, self.steps);
        set(&mut c.trajectories, self.trajectories);
        set(&mut c.n_temperatures, self.n_temperatures);
        set(&mut c.t_high, self.t_high);
        set(&mut c.t_low, self.t_low);
        set(&mut c.alpha, self.alpha);
        set(&mut c.dt, self.dt);
    }
}

impl Cli {
    pub fn preset(&self) -> Option<Preset> {
        match self.command {
            Command::PhaseScan { .. } => Some(Preset::PhaseScan),
            Command::Cool { .. } => Some(Preset::Cool),
            Command::Scaling { .. } => Some(Preset::Scaling),
            Command::Spectrum { .. } => Some(Preset::Spectrum),
            Command::Plot => None,
        }
    }

    /// Defaults, overlaid by the config file, overlaid by the flags.
    pub fn resolve_config(&self) -> anyhow::Result<Config> {
        let mut cfg = match &self.config {
            Some(path) => Config::from_file(path)?,
            None => Config::default(),
        };
        set(&mut cfg.seed, self.seed);
        if self.workers.is_some() {
            cfg.workers = self.workers;
        }
        set(&mut cfg.out, self.out.clone());
        match &self.command {
            Command::PhaseScan { sizes, j_over_h } => {
                set(&mut cfg.phase_scan.sizes, sizes.clone());
                set(&mut cfg.phase_scan.j_over_h, j_over_h.clone());
            }
            Command::Cool { sizes, j_over_h, gate_sets, cooling } => {
                set(&mut cfg.cool.sizes, sizes.clone());
                set(&mut cfg.cool.j_over_h, j_over_h.clone());
                set(&mut cfg.cool.gate_sets, gate_sets.clone());
                cooling.apply(&mut cfg);
            }
            Command::Scaling { sizes, j_over_h, gate_sets, plateau_tolerance, cooling } => {
                set(&mut cfg.scaling.sizes, sizes.clone());
                set(&mut cfg.scaling.j_over_h, *j_over_h);
                set(&mut cfg.scaling.gate_sets, gate_sets.clone());
                set(&mut cfg.scaling.plateau_tolerance, *plateau_tolerance);
                cooling.apply(&mut cfg);
            }
            Command::Spectrum { n_sites, j_over_h, gate_sets, n_drop, bins, cooling } => {
                set(&mut cfg.spectrum.n_sites, *n_sites);
                set(&mut cfg.spectrum.j_over_h, j_over_h.clone());
                set(&mut cfg.spectrum.gate_sets, gate_sets.clone());
                set(&mut cfg.spectrum.n_drop, *n_drop);
                set(&mut cfg.spectrum.bins, *bins);
                cooling.apply(&mut cfg);
            }
            Command::Plot => {}
        }
        Ok(cfg)
    }
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = cli.resolve_config()?;
    let workers = cfg.resolved_workers()?;
    let stdout = std::io::stdout();
    let mut stdout = stdout.lock();

    let Some(preset) = cli.preset() else {
        if cli.dry_run {
            writeln!(stdout, "plot: would write scripts for the tables in {}", cfg.out.display())?;
            return Ok(());
        }
        for script in plot::write_scripts(&cfg)? {
            writeln!(stdout, "{}", cfg.out.join(script).display())?;
        }
        return Ok(());
    };

    if cli.dry_run {
        let plan = presets::plan(preset, &cfg, workers)?;
        writeln!(stdout, "{plan}")?;
        writeln!(stdout, "output directory: {}", cfg.out.display())?;
        writeln!(stdout, "--- resolved configuration ({WORKERS_ENV} consulted only when workers is unset) ---")?;
        write!(stdout, "{}", toml::to_string(&cfg)?)?;
        return Ok(());
    }

    let progress = if cli.quiet { Progress::silent() } else { Progress::stderr() };
    let pool = thread_pool(workers)?;
    log::info!("running {preset} with {workers} workers into {}", cfg.out.display());
    let outcome = presets::run(preset, &RunContext { config: &cfg, pool: &pool, workers, progress: &progress })?;
    for f in &outcome.files {
        writeln!(stdout, "{}", cfg.out.join(f).display())?;
    }
    writeln!(stdout, "{}", outcome.manifest.display())?;
    Ok(())
}
