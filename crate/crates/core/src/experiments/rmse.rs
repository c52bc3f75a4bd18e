use serde::Serialize;

use crate::angle::wrap_angle;
use crate::world_sim::TrialTrace;

use super::ExperimentError;

/// Root-mean-square estimate error over every filter tick of a trial.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct RmseReport {
    /// Translational error, `sqrt(mean(dx² + dy²))`.
    pub xy_rmse: f64,
    pub x_rmse: f64,
    pub y_rmse: f64,
    /// Heading error, wrapped before squaring.
    pub theta_rmse: f64,
    pub vx_rmse: f64,
    pub vy_rmse: f64,
    pub omega_rmse: f64,
    pub n_ticks: usize,
}

/// Component names in the fixed output order.
pub const RMSE_COMPONENTS: [&str; 7] = ["xy", "x", "y", "theta", "vx", "vy", "omega"];

impl RmseReport {
    pub fn components(&self) -> [f64; 7] {
        [
            self.xy_rmse,
            self.x_rmse,
            self.y_rmse,
            self.theta_rmse,
            self.vx_rmse,
            self.vy_rmse,
            self.omega_rmse,
        ]
    }

    pub fn from_components(c: [f64; 7], n_ticks: usize) -> Self {
        Self {
            xy_rmse: c[0],
            x_rmse: c[1],
            y_rmse: c[2],
            theta_rmse: c[3],
            vx_rmse: c[4],
            vy_rmse: c[5],
            omega_rmse: c[6],
            n_ticks,
        }
    }
}

pub fn rmse(trace: &TrialTrace) -> Result<RmseReport, ExperimentError> {
    if trace.ticks.is_empty() {
        return Err(ExperimentError::EmptyTrace);
    }
    let mut sums = [0.0f64; 6];
    for tick in &trace.ticks {
        let truth = tick.truth.to_vector();
        let est = tick.estimate.to_vector();
        for (i, sum) in sums.iter_mut().enumerate() {
            let mut e = est[i] - truth[i];
            if i == 2 {
                e = wrap_angle(e);
            }
            *sum += e * e;
        }
    }
    let n = trace.ticks.len() as f64;
    let [sx, sy, st, svx, svy, sw] = sums;
    Ok(RmseReport {
        xy_rmse: ((sx + sy) / n).sqrt(),
        x_rmse: (sx / n).sqrt(),
        y_rmse: (sy / n).sqrt(),
        theta_rmse: (st / n).sqrt(),
        vx_rmse: (svx / n).sqrt(),
        vy_rmse: (svy / n).sqrt(),
        omega_rmse: (sw / n).sqrt(),
        n_ticks: trace.ticks.len(),
    })
}
