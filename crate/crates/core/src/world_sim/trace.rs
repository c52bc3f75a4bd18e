use std::io;

use crate::vehicle_model::{ControlVector, RobotState};

use super::EstimatorMode;

/// Column order of the per-tick trace CSV.
pub const TRACE_CSV_HEADER: [&str; 24] = [
    "t", "true_x", "true_y", "true_theta", "true_vx", "true_vy", "true_omega", "est_x", "est_y", "est_theta", "est_vx",
    "est_vy", "est_omega", "var_x", "var_y", "var_theta", "var_vx", "var_vy", "var_omega", "landmark", "m1", "m2",
    "m3", "m4",
];

/// One filter tick, recorded after the measurement update.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceTick {
    pub t: f64,
    pub truth: RobotState,
    pub estimate: RobotState,
    /// Covariance diagonal; absent in dead-reckoning mode.
    pub covariance_diagonal: Option<[f64; 6]>,
    /// Landmark in the camera's view at this tick, if any.
    pub landmark: Option<u32>,
    /// Wheel command issued at this tick and held until the next one.
    pub control: ControlVector,
}

/// The robot reached the end of a leg (a stop waypoint).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrival {
    pub leg: usize,
    pub tick: usize,
    pub t: f64,
    pub truth: RobotState,
    pub estimate: RobotState,
    pub target: (f64, f64),
}

impl Arrival {
    pub fn truth_to_estimate(&self) -> f64 {
        (self.truth.x - self.estimate.x).hypot(self.truth.y - self.estimate.y)
    }

    pub fn truth_to_target(&self) -> f64 {
        (self.truth.x - self.target.0).hypot(self.truth.y - self.target.1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrialOutcome {
    /// Every leg finished.
    Completed { t: f64 },
    /// The simulated-time cap was hit first.
    TimedOut { t: f64 },
    /// The estimate left the plausible region or the filter failed.
    Aborted { t: f64, reason: String },
}

impl TrialOutcome {
    pub fn is_aborted(&self) -> bool {
        matches!(self, TrialOutcome::Aborted { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialTrace {
    pub mode: EstimatorMode,
    pub seed: u64,
    pub ticks: Vec<TraceTick>,
    pub arrivals: Vec<Arrival>,
    pub outcome: TrialOutcome,
}

impl TrialTrace {
    /// Writes one row per tick. Floats use the shortest representation that
    /// round-trips to the same `f64`.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(TRACE_CSV_HEADER)?;
        for tick in &self.ticks {
            let mut row: Vec<String> = Vec::with_capacity(TRACE_CSV_HEADER.len());
            row.push(tick.t.to_string());
            row.extend(tick.truth.to_vector().iter().map(f64::to_string));
            row.extend(tick.estimate.to_vector().iter().map(f64::to_string));
            match tick.covariance_diagonal {
                Some(diag) => row.extend(diag.iter().map(f64::to_string)),
                None => row.extend(std::iter::repeat_n(String::new(), 6)),
            }
            row.push(tick.landmark.map(|id| id.to_string()).unwrap_or_default());
            row.extend(tick.control.wheels.iter().map(f64::to_string));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}
