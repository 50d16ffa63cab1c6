//! Progress events, one JSON object per line on a status stream.

use std::io::Write;
use std::sync::Mutex;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum ProgressEvent {
    RunStarted { preset: String, tasks: usize, trajectories: usize },
    TaskStarted { task: String, trajectories: usize },
    TrajectoryDone { task: String, index: usize, completed: usize, total: usize, accepted: usize, final_entropy: f64 },
    PointDone { task: String, n_sites: usize, j_over_h: f64, completed: usize, total: usize },
    TaskDone { task: String, final_mean: f64, elapsed_s: f64 },
    RunDone { preset: String, outputs: usize, elapsed_s: f64 },
}

/// Thread-safe sink for [`ProgressEvent`]s.
pub struct Progress {
    sink: Option<Mutex<Box<dyn Write + Send>>>,
}

impl Progress {
    pub fn stderr() -> Self {
        Self::to_writer(Box::new(std::io::stderr()))
    }

    pub fn to_writer(w: Box<dyn Write + Send>) -> Self {
        Self { sink: Some(Mutex::new(w)) }
    }

    pub fn silent() -> Self {
        Self { sink: None }
    }

    pub fn emit(&self, event: &ProgressEvent) {
        let Some(sink) = &self.sink else { return };
        let Ok(line) = serde_json::to_string(event) else { return };
        let mut w = sink.lock().unwrap_or_else(|e| e.into_inner());
        // Write errors on the status stream are ignored.
        let _ = writeln!(w, "{line}").and_then(|_| w.flush());
    }
}
