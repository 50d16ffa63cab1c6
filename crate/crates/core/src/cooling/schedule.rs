use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Piecewise-constant annealing schedule on a log-even temperature grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureSchedule {
    grid: Vec<f64>,
    segment_lengths: Vec<usize>,
    per_step: Vec<f64>,
}

/// `n_temperatures` values log-evenly spaced from `t_high` down to `t_low`
/// (both included), held over contiguous step segments. Segments are as equal
/// as possible; the first `total_steps % n_temperatures` take one extra step.
pub fn temperature_schedule(
    t_high: f64,
    t_low: f64,
    n_temperatures: usize,
    total_steps: usize,
) -> Result<TemperatureSchedule> {
    if !(t_high > t_low && t_low > 0.0) || !t_high.is_finite() {
        return Err(Error::InvalidConfig("temperatures must satisfy t_high > t_low > 0"));
    }
    if n_temperatures == 0 {
        return Err(Error::InvalidConfig("need at least one temperature"));
    }
    if total_steps > 0 && total_steps < n_temperatures {
        return Err(Error::InvalidConfig("total_steps must be at least n_temperatures"));
    }
    let grid: Vec<f64> = if n_temperatures == 1 {
        alloc::vec![t_high]
    } else {
        let (lh, ll) = (libm::log(t_high), libm::log(t_low));
        let last = (n_temperatures - 1) as f64;
        (0..n_temperatures)
            .map(|k| match k {
                0 => t_high,
                k if k + 1 == n_temperatures => t_low,
                k => libm::exp(lh + (ll - lh) * k as f64 / last),
            })
            .collect()
    };
    let (base, extra) = (total_steps / n_temperatures, total_steps % n_temperatures);
    let segment_lengths: Vec<usize> = (0..n_temperatures).map(|k| base + usize::from(k < extra)).collect();
    let per_step = grid
        .iter()
        .zip(&segment_lengths)
        .flat_map(|(&t, &len)| core::iter::repeat(t).take(len))
        .collect();
    Ok(TemperatureSchedule { grid, segment_lengths, per_step })
}

impl TemperatureSchedule {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn segment_lengths(&self) -> &[usize] {
        &self.segment_lengths
    }

    /// Temperature used for the 0-based step `step`.
    pub fn temperature(&self, step: usize) -> f64 {
        self.per_step[step]
    }

    pub fn per_step(&self) -> &[f64] {
        &self.per_step
    }
}
