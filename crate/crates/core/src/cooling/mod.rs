//! Metropolis entanglement cooling: random two-site gates are proposed and
//! filtered on the change of the averaged half-chain Rényi entropy while a
//! fictitious temperature is lowered on a logarithmic grid.

mod plateau;
mod rng;
mod schedule;

use alloc::boxed::Box;
use alloc::vec::Vec;
use rand::Rng;

use crate::entanglement::{EntropyCache, EntropyEngine, RdmSpectrum};
use crate::error::{Error, Result};
use crate::state::{two_site_unitary, GateKind, GateSet, StateVector, TwoSiteGate, DEFAULT_DT};

pub use plateau::{plateau_gap, plateau_length, Plateau, DEFAULT_PLATEAU_TOLERANCE};
pub use rng::StepRng;
pub use schedule::{temperature_schedule, TemperatureSchedule};

#[derive(Debug, Clone, PartialEq)]
pub struct CoolingConfig {
    pub gate_set: GateSet,
    pub total_steps: usize,
    pub n_temperatures: usize,
    pub t_high: f64,
    pub t_low: f64,
    /// Rényi index of the cost function.
    pub alpha: f64,
    pub dt: f64,
    /// `M`, the number of independent trajectories.
    pub n_trajectories: usize,
    pub base_seed: u64,
    /// Renormalize the state every this many steps.
    pub renorm_interval: usize,
    /// Keep the final half-chain spectra of every block offset.
    pub record_spectra: bool,
}

impl Default for CoolingConfig {
    fn default() -> Self {
        Self {
            gate_set: GateSet::Universal,
            total_steps: 3_000,
            n_temperatures: 100,
            t_high: 1e-4,
            t_low: 1e-8,
            alpha: 2.0,
            dt: DEFAULT_DT,
            n_trajectories: 24,
            base_seed: 0,
            renorm_interval: 10_000,
            record_spectra: true,
        }
    }
}

impl CoolingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trajectories == 0 {
            return Err(Error::InvalidConfig("need at least one trajectory"));
        }
        if !(self.alpha >= 0.0) {
            return Err(Error::NegativeAlpha(self.alpha));
        }
        if !self.dt.is_finite() {
            return Err(Error::InvalidConfig("dt must be finite"));
        }
        if self.renorm_interval == 0 {
            return Err(Error::InvalidConfig("renorm_interval must be positive"));
        }
        self.schedule().map(|_| ())
    }

    pub fn schedule(&self) -> Result<TemperatureSchedule> {
        temperature_schedule(self.t_high, self.t_low, self.n_temperatures, self.total_steps)
    }
}

/// Metropolis acceptance: downhill moves always, uphill ones with
/// probability `exp(−ΔS̄/T)` against the uniform draw `uniform ∈ [0, 1)`.
pub fn accept_move(delta: f64, temperature: f64, uniform: f64) -> bool {
    delta <= 0.0 || uniform < libm::exp(-delta / temperature)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub accepted: bool,
    pub delta: f64,
    pub kind: GateKind,
    pub bond: usize,
}

/// One trajectory's proposal/acceptance machinery with its scratch buffers.
#[derive(Debug, Clone)]
pub struct Metropolis {
    gates: Vec<(GateKind, TwoSiteGate)>,
    engine: EntropyEngine,
    trial_state: StateVector,
    trial_cache: EntropyCache,
}

impl Metropolis {
    pub fn new(n_sites: usize, gate_set: GateSet, dt: f64, alpha: f64) -> Result<Self> {
        let engine = EntropyEngine::new(n_sites, alpha)?;
        let gates = gate_set.kinds().iter().map(|&k| (k, two_site_unitary(k, dt))).collect();
        Ok(Self {
            gates,
            engine,
            trial_state: StateVector::all_up(n_sites),
            trial_cache: EntropyCache { alpha, per_block: Vec::new(), average: 0.0 },
        })
    }

    pub fn engine_mut(&mut self) -> &mut EntropyEngine {
        &mut self.engine
    }

    /// Proposes one gate and keeps or discards it. On rejection `state` and
    /// `cache` are left exactly as they were.
    pub fn step<R: Rng + ?Sized>(
        &mut self,
        state: &mut StateVector,
        cache: &mut EntropyCache,
        rng: &mut R,
        temperature: f64,
    ) -> Result<StepOutcome> {
        let g = rng.random_range(0..self.gates.len());
        let bond = rng.random_range(0..state.n_sites());
        let uniform: f64 = rng.random();
        let (kind, gate) = self.gates[g];

        self.trial_state.copy_from(state);
        self.trial_state.apply_two_site(&gate, bond)?;
        self.trial_cache.copy_from(cache);
        self.trial_cache.update_bond(&self.trial_state, bond, &mut self.engine)?;
        let delta = self.trial_cache.average - cache.average;

        let accepted = accept_move(delta, temperature, uniform);
        if accepted {
            core::mem::swap(state, &mut self.trial_state);
            core::mem::swap(cache, &mut self.trial_cache);
        }
        Ok(StepOutcome { accepted, delta, kind, bond })
    }
}

/// Everything recorded along one Metropolis trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub trajectory_index: usize,
    pub base_seed: u64,
    /// `S̄_α` before the first step and after every step.
    pub entropy_trace: Vec<f64>,
    pub accept_trace: Vec<bool>,
    pub accepted_count: usize,
    /// Final half-chain spectrum for every block offset (empty unless requested).
    pub final_spectra: Vec<RdmSpectrum>,
}

/// Runs `config.total_steps` Metropolis steps from `initial`, seeded from
/// `(config.base_seed, trajectory_index)`.
pub fn run_trajectory(initial: &StateVector, config: &CoolingConfig, trajectory_index: usize) -> Result<TrajectoryRecord> {
    config.validate()?;
    let schedule = config.schedule()?;
    let mut metro = Metropolis::new(initial.n_sites(), config.gate_set, config.dt, config.alpha)?;
    let mut state = initial.clone();
    let mut cache = EntropyCache::compute(&state, metro.engine_mut())?;
    let mut rng = StepRng::new(config.base_seed, trajectory_index as u64);

    let mut entropy_trace = Vec::with_capacity(config.total_steps + 1);
    let mut accept_trace = Vec::with_capacity(config.total_steps);
    entropy_trace.push(cache.average);
    for step in 0..config.total_steps {
        let outcome = metro.step(&mut state, &mut cache, rng.at_step(step as u64), schedule.temperature(step))?;
        accept_trace.push(outcome.accepted);
        entropy_trace.push(cache.average);
        if (step + 1) % config.renorm_interval == 0 {
            state.renormalize();
        }
    }

    let final_spectra = if config.record_spectra {
        (0..state.n_sites()).map(|s| metro.engine_mut().block_spectrum(&state, s)).collect()
    } else {
        Vec::new()
    };
    Ok(TrajectoryRecord {
        trajectory_index,
        base_seed: config.base_seed,
        accepted_count: accept_trace.iter().filter(|&&a| a).count(),
        entropy_trace,
        accept_trace,
        final_spectra,
    })
}

/// Trajectory-averaged entropy traces.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub mean_trace: Vec<f64>,
    /// Standard error of the mean (zero for a single trajectory).
    pub stderr_trace: Vec<f64>,
    /// Fraction of trajectories accepting at each step; entry 0 is the initial point.
    pub accept_rate_trace: Vec<f64>,
    pub per_trajectory: Vec<TrajectoryRecord>,
    pub config: CoolingConfig,
}

impl EnsembleResult {
    /// Aggregates records, which must be ordered by trajectory index.
    pub fn from_records(config: CoolingConfig, per_trajectory: Vec<TrajectoryRecord>) -> Result<Self> {
        let m = per_trajectory.len();
        if m == 0 {
            return Err(Error::EmptyEnsemble);
        }
        let len = config.total_steps + 1;
        let mut mean_trace = alloc::vec![0.0; len];
        let mut stderr_trace = alloc::vec![0.0; len];
        let mut accept_rate_trace = alloc::vec![0.0; len];
        for k in 0..len {
            let mean = per_trajectory.iter().map(|r| r.entropy_trace[k]).sum::<f64>() / m as f64;
            mean_trace[k] = mean;
            if m > 1 {
                let var = per_trajectory.iter().map(|r| {
                    let d = r.entropy_trace[k] - mean;
                    d * d
                }).sum::<f64>()
                    / (m - 1) as f64;
                stderr_trace[k] = libm::sqrt(var / m as f64);
            }
            if k > 0 {
                let accepted = per_trajectory.iter().filter(|r| r.accept_trace[k - 1]).count();
                accept_rate_trace[k] = accepted as f64 / m as f64;
            }
        }
        Ok(Self { mean_trace, stderr_trace, accept_rate_trace, per_trajectory, config })
    }

    pub fn final_mean(&self) -> f64 {
        *self.mean_trace.last().expect("trace holds the initial value")
    }
}

/// Sequential ensemble driver. Parallel drivers must produce the same records
/// in index order; the result depends only on `(initial, config)`.
pub fn run_ensemble(initial: &StateVector, config: &CoolingConfig) -> Result<EnsembleResult> {
    config.validate()?;
    let records = (0..config.n_trajectories)
        .map(|i| run_trajectory(initial, config, i).map_err(|e| Error::Trajectory { index: i, cause: Box::new(e) }))
        .collect::<Result<Vec<_>>>()?;
    EnsembleResult::from_records(config.clone(), records)
}
