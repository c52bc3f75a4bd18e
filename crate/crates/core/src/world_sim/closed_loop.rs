use std::fmt;
use std::str::FromStr;

use nalgebra::Vector6 as NVector6;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::estimator::{self, BeliefState, EstimatorError, Matrix6, MeasurementModel};
use crate::guidance::{compute_control, lookahead_target, AxisGains, AxisPidState, Path, PathProgress, PursuitConfig};
use crate::vehicle_model::{
    measurement_noise_cov, odometry_to_body_velocity, state_transition, ControlVector, MecanumModel, Measurement,
    ModelError, NoiseScale, RobotGeometry, RobotState, NO_LANDMARK_VARIANCE,
};

use super::trace::{Arrival, TraceTick, TrialOutcome, TrialTrace};
use super::{step_true_state, synthesize_measurement, visible_landmark, CameraModel, Field, RngStream, SimClock, WorldError};

/// Divergence guard: abort once the estimate is this many field diagonals
/// away from the truth.
pub const DIVERGENCE_DIAGONALS: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
}

/// Which information sources feed the estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorMode {
    /// Prediction only; no measurement is used.
    Model,
    /// Dead reckoning from the dead-wheel odometry alone.
    Odo,
    /// Filter fusing the model with odometry; camera rows are ignored.
    Fused,
    /// Filter fusing the model, odometry, and landmark detections.
    FusedCamera,
}

impl EstimatorMode {
    pub const ALL: [EstimatorMode; 4] = [Self::Model, Self::Odo, Self::Fused, Self::FusedCamera];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Model => "model",
            Self::Odo => "odo",
            Self::Fused => "fused",
            Self::FusedCamera => "fused_camera",
        }
    }
}

impl fmt::Display for EstimatorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EstimatorMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown mode `{s}` (expected model, odo, fused, or fused_camera)"))
    }
}

/// Everything one closed-loop trial needs besides the mode and the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub geometry: RobotGeometry,
    /// Noise injected into the simulated truth and sensors.
    pub truth_noise: NoiseScale,
    /// Noise levels the filter assumes.
    pub filter_noise: NoiseScale,
    /// Camera-row variance when no landmark is in view.
    pub no_landmark_variance: f64,
    pub camera: CameraModel,
    pub field: Field,
    pub clock: SimClock,
    pub path: Path,
    /// Starting heading; defaults to the first waypoint's heading, then 0.
    pub initial_heading: Option<f64>,
    /// Diagonal of the starting covariance.
    pub initial_covariance: [f64; 6],
    pub gains: AxisGains,
    pub pursuit: PursuitConfig,
    /// Simulated-time cap, seconds.
    pub time_limit: f64,
}

impl ScenarioConfig {
    pub const DEFAULT_INITIAL_COVARIANCE: [f64; 6] = [1.0, 1.0, 0.05, 1.0, 1.0, 0.05];
    pub const DEFAULT_TIME_LIMIT: f64 = 120.0;

    pub fn new(path: Path, field: Field) -> Self {
        Self {
            geometry: RobotGeometry::default(),
            truth_noise: NoiseScale::default(),
            filter_noise: NoiseScale::default(),
            no_landmark_variance: NO_LANDMARK_VARIANCE,
            camera: CameraModel::default(),
            field,
            clock: SimClock::default(),
            path,
            initial_heading: None,
            initial_covariance: Self::DEFAULT_INITIAL_COVARIANCE,
            gains: AxisGains::default(),
            pursuit: PursuitConfig::default(),
            time_limit: Self::DEFAULT_TIME_LIMIT,
        }
    }

    /// Localization test course on the default field.
    pub fn figure7() -> Self {
        Self::new(Path::figure7(), Field::default())
    }

    /// `cycles` warehouse round trips on the left/bottom landmark layout.
    pub fn cycle(cycles: usize) -> Self {
        Self::new(Path::cycles(cycles), Field::cycle_layout())
    }

    pub fn with_truth_noise(mut self, noise: NoiseScale) -> Self {
        self.truth_noise = noise;
        self
    }

    pub fn initial_heading(&self) -> f64 {
        self.initial_heading.or(self.path.start().heading).unwrap_or(0.0)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.geometry.validate()?;
        self.truth_noise.validate()?;
        self.filter_noise.validate()?;
        self.camera.validate()?;
        self.field.validate()?;
        self.clock.substeps_per_filter_step()?;
        if !(self.no_landmark_variance > 0.0 && self.no_landmark_variance.is_finite()) {
            return Err(SimError::InvalidScenario("no_landmark_variance must be positive".into()));
        }
        if self.initial_covariance.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(SimError::InvalidScenario("initial covariance entries must be non-negative".into()));
        }
        if !(self.time_limit > 0.0 && self.time_limit.is_finite()) {
            return Err(SimError::InvalidScenario("time_limit must be positive".into()));
        }
        if !(self.pursuit.lookahead_radius > 0.0 && self.pursuit.waypoint_advance_tolerance >= 0.0) {
            return Err(SimError::InvalidScenario("lookahead_radius must be positive".into()));
        }
        for (axis, g) in [("x", self.gains.x), ("y", self.gains.y), ("theta", self.gains.theta)] {
            if !g.is_valid() {
                return Err(SimError::InvalidScenario(format!(
                    "{axis} gains must be finite with p >= 0 and integral_limit >= 0"
                )));
            }
        }
        Ok(())
    }
}

#[allow(clippy::large_enum_variant)]
enum Localizer {
    Filter(BeliefState),
    DeadReckoning(RobotState),
}

impl Localizer {
    fn state(&self) -> RobotState {
        match self {
            Localizer::Filter(b) => RobotState::from_vector(&b.mean),
            Localizer::DeadReckoning(s) => *s,
        }
    }

    fn covariance_diagonal(&self) -> Option<[f64; 6]> {
        match self {
            Localizer::Filter(b) => Some(std::array::from_fn(|i| b.covariance[(i, i)])),
            Localizer::DeadReckoning(_) => None,
        }
    }

    fn predict(&mut self, control: &ControlVector, dt: f64, model: &MecanumModel) -> Result<(), EstimatorError> {
        match self {
            Localizer::Filter(b) => *b = estimator::predict(b, &control.to_vector(), dt, model)?,
            Localizer::DeadReckoning(s) => {
                // Integrate the pose with the last odometry velocity and keep
                // that velocity until the next reading.
                let moved = state_transition(s, &ControlVector::zero(), dt, &model.geometry);
                *s = RobotState {
                    vx_body: s.vx_body,
                    vy_body: s.vy_body,
                    omega: s.omega,
                    ..moved
                };
            }
        }
        Ok(())
    }

    fn correct(
        &mut self,
        mode: EstimatorMode,
        measurement: &Measurement,
        model: &MecanumModel,
        no_landmark_variance: f64,
    ) -> Result<(), String> {
        match (mode, self) {
            (EstimatorMode::Model, _) => {}
            (EstimatorMode::Odo, Localizer::DeadReckoning(s)) => {
                let v = odometry_to_body_velocity(&measurement.encoders, &model.geometry);
                s.vx_body = v.vx;
                s.vy_body = v.vy;
                s.omega = v.omega;
            }
            (EstimatorMode::Fused | EstimatorMode::FusedCamera, Localizer::Filter(b)) => {
                let measurement = if mode == EstimatorMode::Fused {
                    Measurement {
                        pose: None,
                        ..*measurement
                    }
                } else {
                    *measurement
                };
                let predicted = model.measure(&b.mean);
                let z = measurement.to_vector(&predicted);
                let r: Matrix6 = measurement_noise_cov(
                    measurement.landmark_distance(),
                    &measurement.encoders,
                    &model.noise,
                    no_landmark_variance,
                )
                .map_err(|e| e.to_string())?;
                *b = estimator::update(b, &z, model, &r).map_err(|e| e.to_string())?;
            }
            _ => unreachable!("localizer variant always matches its mode"),
        }
        Ok(())
    }
}

/// Runs one closed-loop trial.
///
/// Each filter tick senses the truth, corrects the estimate, picks a pursuit
/// target and a wheel command from the estimate, records the tick, then
/// advances the truth through the fine steps under that command and
/// propagates the estimate over the filter step.
pub fn run_closed_loop(scenario: &ScenarioConfig, mode: EstimatorMode, seed: u64) -> Result<TrialTrace, SimError> {
    scenario.validate()?;
    let substeps = scenario.clock.substeps_per_filter_step()?;
    let dt = scenario.clock.filter_dt;
    let geom = &scenario.geometry;
    let model = MecanumModel::new(*geom, scenario.filter_noise);
    let legs = scenario.path.legs();
    let start = scenario.path.start();
    let mut heading_target = scenario.initial_heading();

    let mut truth = RobotState::at_pose(start.x, start.y, heading_target);
    let mut localizer = match mode {
        EstimatorMode::Odo => Localizer::DeadReckoning(truth),
        _ => Localizer::Filter(BeliefState::new(
            truth.to_vector(),
            Matrix6::from_diagonal(&NVector6::from_column_slice(&scenario.initial_covariance)),
        )),
    };
    let mut rng = RngStream::new(seed);
    let guard = DIVERGENCE_DIAGONALS * scenario.field.diagonal();

    let mut leg = 0;
    let mut progress = PathProgress::default();
    let mut pids = AxisPidState::default();
    let mut ticks = Vec::new();
    let mut arrivals = Vec::new();

    let mut k: usize = 0;
    let outcome = loop {
        let t = k as f64 * dt;
        let landmark = visible_landmark((truth.x, truth.y, truth.theta), &scenario.camera, &scenario.field);
        let measurement = synthesize_measurement(&truth, landmark, geom, &scenario.truth_noise, rng.measurement());
        if let Err(reason) = localizer.correct(mode, &measurement, &model, scenario.no_landmark_variance) {
            break TrialOutcome::Aborted { t, reason };
        }
        let estimate = localizer.state();
        let error = (estimate.x - truth.x).hypot(estimate.y - truth.y);
        if !estimate.is_finite() || error.is_nan() || error > guard {
            break TrialOutcome::Aborted {
                t,
                reason: format!("estimate diverged: position error {error} exceeds {guard}"),
            };
        }

        let mut target = lookahead_target(&legs[leg], (estimate.x, estimate.y), &scenario.pursuit, progress);
        let mut finished = false;
        loop {
            let end = legs[leg].end();
            let near = (estimate.x - end.x).hypot(estimate.y - end.y) <= scenario.pursuit.waypoint_advance_tolerance;
            if !(target.exhausted && near) {
                break;
            }
            arrivals.push(Arrival {
                leg,
                tick: k,
                t,
                truth,
                estimate,
                target: (end.x, end.y),
            });
            if leg + 1 == legs.len() {
                finished = true;
                break;
            }
            leg += 1;
            progress = PathProgress::default();
            pids = AxisPidState::default();
            target = lookahead_target(&legs[leg], (estimate.x, estimate.y), &scenario.pursuit, progress);
        }

        let control = if finished {
            ControlVector::zero()
        } else {
            progress = target.progress;
            if let Some(h) = legs[leg].heading_for_segment(target.at.segment) {
                heading_target = h;
            }
            let (control, next) = compute_control(
                &estimate,
                (target.x, target.y),
                heading_target,
                &scenario.gains,
                &pids,
                geom,
            );
            pids = next;
            control
        };

        ticks.push(TraceTick {
            t,
            truth,
            estimate,
            covariance_diagonal: localizer.covariance_diagonal(),
            landmark: landmark.map(|l| l.id),
            control,
        });
        if finished {
            break TrialOutcome::Completed { t };
        }
        if t >= scenario.time_limit {
            break TrialOutcome::TimedOut { t };
        }

        for _ in 0..substeps {
            truth = step_true_state(
                &truth,
                &control,
                scenario.clock.truth_dt,
                geom,
                &scenario.truth_noise,
                rng.process(),
            );
        }
        if let Err(e) = localizer.predict(&control, dt, &model) {
            break TrialOutcome::Aborted {
                t: t + dt,
                reason: e.to_string(),
            };
        }
        k += 1;
    };

    Ok(TrialTrace {
        mode,
        seed,
        ticks,
        arrivals,
        outcome,
    })
}
