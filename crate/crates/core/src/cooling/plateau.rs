/// Length of the initial plateau of an entropy trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Plateau {
    pub length: usize,
    /// Set when `trace[0] == 0`, where a relative plateau is undefined and the
    /// full trace length is reported.
    pub undefined: bool,
}

pub const DEFAULT_PLATEAU_TOLERANCE: f64 = 0.05;

/// First index whose value departs from `trace[0]` by more than
/// `tolerance · trace[0]`, or the trace length if none does.
pub fn plateau_length(trace: &[f64], tolerance: f64) -> Plateau {
    let Some(&first) = trace.first() else {
        return Plateau { length: 0, undefined: true };
    };
    if first == 0.0 {
        return Plateau { length: trace.len(), undefined: true };
    }
    let bound = tolerance * first.abs();
    let length = trace.iter().position(|&x| (x - first).abs() > bound).unwrap_or(trace.len());
    Plateau { length, undefined: false }
}

/// `|trace[0] − trace[last]|`: how far the entropy fell from its start.
pub fn plateau_gap(trace: &[f64]) -> f64 {
    match (trace.first(), trace.last()) {
        (Some(a), Some(b)) => (a - b).abs(),
        _ => 0.0,
    }
}
