//! Extended Kalman filter localization for a four-wheel mecanum robot.
//!
//! The crate is organised bottom-up:
//!
//! * [`estimator`]: a generic six-state extended Kalman filter.
//! * [`vehicle_model`]: mecanum kinematics, dead-wheel odometry, and the
//!   process/measurement models with their Jacobians and noise schedules.
//! * [`world_sim`]: the noisy ground-truth simulator, camera gating, and the
//!   closed-loop trial runner.
//! * [`guidance`]: pure-pursuit path following with per-axis PID control.
//! * [`experiments`]: RMSE metrics and the Monte Carlo localization studies,
//!   with CSV and SVG output.

pub mod angle;
pub mod estimator;
pub mod experiments;
pub mod guidance;
pub mod vehicle_model;
pub mod world_sim;

pub use angle::wrap_angle;
pub use estimator::{BeliefState, EstimatorError, Matrix6, Vector4, Vector6};
pub use experiments::{rmse, ExperimentError, ExperimentResult, RmseReport, RunOptions};
pub use guidance::{AxisGains, Path, PidGains, PursuitConfig, Waypoint};
pub use vehicle_model::{
    BodyVelocity, ControlVector, EncoderReadings, MecanumModel, Measurement, NoiseScale, RobotGeometry, RobotState,
};
pub use world_sim::{
    run_closed_loop, CameraModel, EstimatorMode, Field, Landmark, ScenarioConfig, SimClock, TrialOutcome, TrialTrace,
};
