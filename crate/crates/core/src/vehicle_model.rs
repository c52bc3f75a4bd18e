//! Mecanum-drive process and measurement models.
//!
//! State layout is `[x, y, theta, vx_body, vy_body, omega]` with positions in
//! inches in the field frame, heading in radians (CCW positive), and
//! velocities expressed in the robot body frame. Controls are the four wheel
//! angular speeds in rad/s. Measurements are `[x_m, y_m, theta_m, E_L, E_R,
//! E_a]`: a camera pose fix followed by three dead-wheel encoder surface
//! speeds in in/s.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::wrap_angle;
use crate::estimator::{Matrix6, MeasurementModel, PredictionModel, Vector4, Vector6};

/// Position-group process variance rate (scaled by dt).
pub const Q_POSITION_RATE: f64 = 0.002;
/// Velocity-group process variance, independent of dt.
pub const Q_VELOCITY: f64 = 0.45;
/// Camera variance grows with squared distance to the landmark.
pub const R_POSITION_QUADRATIC: f64 = 0.001;
pub const R_POSITION_FLOOR: f64 = 0.001;
/// Encoder variance grows with squared surface speed.
pub const R_ENCODER_QUADRATIC: f64 = 0.002;
pub const R_ENCODER_FLOOR: f64 = 0.001;
/// Camera-row variance used when no landmark is in view (in²).
pub const NO_LANDMARK_VARIANCE: f64 = 1e9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("geometry field `{field}` must be positive and finite, got {value}")]
    InvalidGeometry { field: &'static str, value: f64 },
    #[error("landmark distance must be non-negative and finite, got {0}")]
    InvalidLandmarkDistance(f64),
    #[error("noise scale `{field}` must be non-negative and finite, got {value}")]
    InvalidNoiseScale { field: &'static str, value: f64 },
}

/// Physical lengths of the drivetrain, in inches, and the wheel-speed cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RobotGeometry {
    /// Mecanum wheel radius `r`.
    pub wheel_radius: f64,
    /// Center horizontal axis to wheel center, `L`.
    pub half_length: f64,
    /// Center vertical axis to wheel center, `l`.
    pub half_width: f64,
    /// Vertical dead wheel to center vertical axis, `W`.
    pub encoder_track: f64,
    /// Horizontal dead wheel to center horizontal axis, `D`.
    pub encoder_offset: f64,
    /// Maximum wheel angular speed in rad/s applied by the controller.
    pub wheel_speed_cap: f64,
}

impl Default for RobotGeometry {
    fn default() -> Self {
        Self {
            wheel_radius: 1.8898,
            half_length: 6.5,
            half_width: 5.5,
            encoder_track: 6.0,
            encoder_offset: 4.0,
            wheel_speed_cap: 30.0,
        }
    }
}

impl RobotGeometry {
    pub fn validate(&self) -> Result<(), ModelError> {
        for (field, value) in [
            ("wheel_radius", self.wheel_radius),
            ("half_length", self.half_length),
            ("half_width", self.half_width),
            ("encoder_track", self.encoder_track),
            ("encoder_offset", self.encoder_offset),
            ("wheel_speed_cap", self.wheel_speed_cap),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ModelError::InvalidGeometry { field, value });
            }
        }
        Ok(())
    }

    /// `L + l`, the lever arm in the rotation row of the wheel kinematics.
    pub fn lever(&self) -> f64 {
        self.half_length + self.half_width
    }
}

/// Estimated or simulated robot state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RobotState {
    pub x: f64,
    pub y: f64,
    /// Unwrapped heading; use [`RobotState::wrapped_theta`] for a bounded view.
    pub theta: f64,
    pub vx_body: f64,
    pub vy_body: f64,
    pub omega: f64,
}

impl RobotState {
    pub fn at_pose(x: f64, y: f64, theta: f64) -> Self {
        Self {
            x,
            y,
            theta,
            ..Self::default()
        }
    }

    pub fn to_vector(&self) -> Vector6 {
        Vector6::new(self.x, self.y, self.theta, self.vx_body, self.vy_body, self.omega)
    }

    pub fn from_vector(v: &Vector6) -> Self {
        Self {
            x: v[0],
            y: v[1],
            theta: v[2],
            vx_body: v[3],
            vy_body: v[4],
            omega: v[5],
        }
    }

    pub fn wrapped_theta(&self) -> f64 {
        wrap_angle(self.theta)
    }

    pub fn body_velocity(&self) -> BodyVelocity {
        BodyVelocity::new(self.vx_body, self.vy_body, self.omega)
    }

    pub fn is_finite(&self) -> bool {
        self.to_vector().iter().all(|v| v.is_finite())
    }
}

/// Body-frame twist `(vx, vy, omega)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BodyVelocity {
    pub vx: f64,
    pub vy: f64,
    pub omega: f64,
}

impl BodyVelocity {
    pub fn new(vx: f64, vy: f64, omega: f64) -> Self {
        Self { vx, vy, omega }
    }
}

/// Wheel angular speeds in rad/s; positive spins drive the robot forward.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlVector {
    pub wheels: [f64; 4],
}

impl ControlVector {
    pub fn new(m1: f64, m2: f64, m3: f64, m4: f64) -> Self {
        Self {
            wheels: [m1, m2, m3, m4],
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn to_vector(&self) -> Vector4 {
        Vector4::from_column_slice(&self.wheels)
    }

    pub fn max_abs(&self) -> f64 {
        self.wheels.iter().fold(0.0, |acc, w| acc.max(w.abs()))
    }
}

/// Dead-wheel surface speeds `(E_L, E_R, E_a)` in in/s.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EncoderReadings {
    pub left: f64,
    pub right: f64,
    pub lateral: f64,
}

impl EncoderReadings {
    pub fn new(left: f64, right: f64, lateral: f64) -> Self {
        Self { left, right, lateral }
    }
}

/// Camera pose fix from a detected landmark.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoseFix {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    /// Distance from the robot to the landmark image, in inches.
    pub landmark_distance: f64,
}

/// One sensor sample: encoders are always present, the pose fix only when a
/// landmark is in view.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub pose: Option<PoseFix>,
    pub encoders: EncoderReadings,
}

impl Measurement {
    pub fn landmark_distance(&self) -> Option<f64> {
        self.pose.map(|p| p.landmark_distance)
    }

    /// Stacks the measurement into the filter's 6-vector. When no pose fix is
    /// present the camera rows are filled from `predicted`, which makes their
    /// innovation exactly zero.
    pub fn to_vector(&self, predicted: &Vector6) -> Vector6 {
        let (x, y, theta) = match self.pose {
            Some(p) => (p.x, p.y, p.theta),
            None => (predicted[0], predicted[1], predicted[2]),
        };
        Vector6::new(x, y, theta, self.encoders.left, self.encoders.right, self.encoders.lateral)
    }
}

/// Independent multipliers for the four noise groups.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseScale {
    pub q_position: f64,
    pub q_velocity: f64,
    pub r_position: f64,
    pub r_encoder: f64,
}

impl Default for NoiseScale {
    fn default() -> Self {
        Self::uniform(1.0)
    }
}

impl NoiseScale {
    pub fn uniform(scale: f64) -> Self {
        Self {
            q_position: scale,
            q_velocity: scale,
            r_position: scale,
            r_encoder: scale,
        }
    }

    pub fn zero() -> Self {
        Self::uniform(0.0)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for (field, value) in [
            ("q_position", self.q_position),
            ("q_velocity", self.q_velocity),
            ("r_position", self.r_position),
            ("r_encoder", self.r_encoder),
        ] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(ModelError::InvalidNoiseScale { field, value });
            }
        }
        Ok(())
    }
}

pub fn wheel_to_body_velocity(control: &ControlVector, geom: &RobotGeometry) -> BodyVelocity {
    let [m1, m2, m3, m4] = control.wheels;
    let k = geom.wheel_radius / 4.0;
    BodyVelocity {
        vx: k * (m1 + m2 + m3 + m4),
        vy: k * (m1 - m2 - m3 + m4),
        omega: k / geom.lever() * (-m1 + m2 - m3 + m4),
    }
}

/// Inverse mecanum kinematics. Exact right inverse of
/// [`wheel_to_body_velocity`].
pub fn body_to_wheel_velocity(twist: BodyVelocity, geom: &RobotGeometry) -> ControlVector {
    let BodyVelocity { vx, vy, omega } = twist;
    let spin = geom.lever() * omega;
    let inv_r = 1.0 / geom.wheel_radius;
    ControlVector::new(
        inv_r * (vx + vy - spin),
        inv_r * (vx - vy + spin),
        inv_r * (vx - vy - spin),
        inv_r * (vx + vy + spin),
    )
}

/// One Euler step: the pose advances with the current body velocity rotated
/// into the field frame, and the velocity is replaced by the wheel command.
pub fn state_transition(state: &RobotState, control: &ControlVector, dt: f64, geom: &RobotGeometry) -> RobotState {
    let (sin, cos) = state.theta.sin_cos();
    let twist = wheel_to_body_velocity(control, geom);
    RobotState {
        x: state.x + dt * (state.vx_body * cos - state.vy_body * sin),
        y: state.y + dt * (state.vx_body * sin + state.vy_body * cos),
        theta: state.theta + dt * state.omega,
        vx_body: twist.vx,
        vy_body: twist.vy,
        omega: twist.omega,
    }
}

/// Jacobian of [`state_transition`] with respect to the prior state.
pub fn transition_jacobian(state: &RobotState, dt: f64) -> Matrix6 {
    let (sin, cos) = state.theta.sin_cos();
    let (vx, vy) = (state.vx_body, state.vy_body);
    let mut a = Matrix6::zeros();
    a[(0, 0)] = 1.0;
    a[(0, 2)] = dt * (-vx * sin - vy * cos);
    a[(0, 3)] = dt * cos;
    a[(0, 4)] = -dt * sin;
    a[(1, 1)] = 1.0;
    a[(1, 2)] = dt * (vx * cos - vy * sin);
    a[(1, 3)] = dt * sin;
    a[(1, 4)] = dt * cos;
    a[(2, 2)] = 1.0;
    a[(2, 5)] = dt;
    a
}

/// Expected encoder speeds for a body twist.
pub fn body_to_odometry(twist: BodyVelocity, geom: &RobotGeometry) -> EncoderReadings {
    let w = geom.encoder_track;
    let d = geom.encoder_offset;
    EncoderReadings {
        left: twist.vx - w * twist.omega,
        right: twist.vx + w * twist.omega,
        lateral: twist.vy - d * twist.omega,
    }
}

/// Linear odometry: body twist from the three dead-wheel speeds.
pub fn odometry_to_body_velocity(encoders: &EncoderReadings, geom: &RobotGeometry) -> BodyVelocity {
    let omega = (encoders.right - encoders.left) / (2.0 * geom.encoder_track);
    BodyVelocity {
        vx: (encoders.right + encoders.left) / 2.0,
        vy: encoders.lateral + geom.encoder_offset * omega,
        omega,
    }
}

pub fn measurement_fn(state: &RobotState, geom: &RobotGeometry) -> Vector6 {
    let enc = body_to_odometry(state.body_velocity(), geom);
    Vector6::new(state.x, state.y, state.theta, enc.left, enc.right, enc.lateral)
}

/// Constant Jacobian of [`measurement_fn`].
pub fn measurement_jacobian(geom: &RobotGeometry) -> Matrix6 {
    let w = geom.encoder_track;
    let d = geom.encoder_offset;
    let mut h = Matrix6::zeros();
    h[(0, 0)] = 1.0;
    h[(1, 1)] = 1.0;
    h[(2, 2)] = 1.0;
    h[(3, 3)] = 1.0;
    h[(3, 5)] = -w;
    h[(4, 3)] = 1.0;
    h[(4, 5)] = w;
    h[(5, 4)] = 1.0;
    h[(5, 5)] = -d;
    h
}

pub fn process_noise_cov(dt: f64, scale: &NoiseScale) -> Matrix6 {
    let pos = Q_POSITION_RATE * dt * scale.q_position;
    let vel = Q_VELOCITY * scale.q_velocity;
    Matrix6::from_diagonal(&Vector6::new(pos, pos, pos, vel, vel, vel))
}

fn encoder_variance(speed: f64) -> f64 {
    R_ENCODER_QUADRATIC * speed * speed + R_ENCODER_FLOOR
}

/// Diagonal measurement covariance. Camera rows use the distance schedule
/// when a landmark is visible and `no_landmark_variance` otherwise; the
/// sentinel is not multiplied by the noise scale.
pub fn measurement_noise_cov(
    landmark_distance: Option<f64>,
    encoders: &EncoderReadings,
    scale: &NoiseScale,
    no_landmark_variance: f64,
) -> Result<Matrix6, ModelError> {
    let position = match landmark_distance {
        Some(d) if !(d >= 0.0 && d.is_finite()) => return Err(ModelError::InvalidLandmarkDistance(d)),
        Some(d) => (R_POSITION_QUADRATIC * d * d + R_POSITION_FLOOR) * scale.r_position,
        None => no_landmark_variance,
    };
    Ok(Matrix6::from_diagonal(&Vector6::new(
        position,
        position,
        position,
        encoder_variance(encoders.left) * scale.r_encoder,
        encoder_variance(encoders.right) * scale.r_encoder,
        encoder_variance(encoders.lateral) * scale.r_encoder,
    )))
}

/// The mecanum process and measurement model bundled for the estimator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MecanumModel {
    pub geometry: RobotGeometry,
    pub noise: NoiseScale,
}

impl MecanumModel {
    pub fn new(geometry: RobotGeometry, noise: NoiseScale) -> Self {
        Self { geometry, noise }
    }
}

impl PredictionModel for MecanumModel {
    fn transition(&self, state: &Vector6, control: &Vector4, dt: f64) -> Vector6 {
        let control = ControlVector::new(control[0], control[1], control[2], control[3]);
        state_transition(&RobotState::from_vector(state), &control, dt, &self.geometry).to_vector()
    }

    fn transition_jacobian(&self, state: &Vector6, _control: &Vector4, dt: f64) -> Matrix6 {
        transition_jacobian(&RobotState::from_vector(state), dt)
    }

    fn process_noise(&self, dt: f64) -> Matrix6 {
        process_noise_cov(dt, &self.noise)
    }
}

impl MeasurementModel for MecanumModel {
    fn measure(&self, state: &Vector6) -> Vector6 {
        measurement_fn(&RobotState::from_vector(state), &self.geometry)
    }

    fn measurement_jacobian(&self, _state: &Vector6) -> Matrix6 {
        measurement_jacobian(&self.geometry)
    }

    fn residual(&self, measured: &Vector6, predicted: &Vector6) -> Vector6 {
        let mut r = measured - predicted;
        r[2] = wrap_angle(r[2]);
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn geom() -> RobotGeometry {
        RobotGeometry::default()
    }

    #[test]
    fn pure_wheel_patterns() {
        let g = geom();
        let w = 3.0;
        let fwd = wheel_to_body_velocity(&ControlVector::new(w, w, w, w), &g);
        assert_relative_eq!(fwd.vx, g.wheel_radius * w, epsilon = 1e-12);
        assert_eq!((fwd.vy, fwd.omega), (0.0, 0.0));

        let strafe = wheel_to_body_velocity(&ControlVector::new(w, -w, -w, w), &g);
        assert_eq!(strafe.vx, 0.0);
        assert_relative_eq!(strafe.vy, g.wheel_radius * w, epsilon = 1e-12);
        assert_eq!(strafe.omega, 0.0);

        let spin = wheel_to_body_velocity(&ControlVector::new(-w, w, -w, w), &g);
        assert_eq!((spin.vx, spin.vy), (0.0, 0.0));
        assert_relative_eq!(spin.omega, g.wheel_radius * w / g.lever(), epsilon = 1e-12);
    }

    #[test]
    fn inverse_kinematics_cases() {
        let g = geom();
        let v = 12.0;
        let c = body_to_wheel_velocity(BodyVelocity::new(v, 0.0, 0.0), &g);
        for m in c.wheels {
            assert_relative_eq!(m, v / g.wheel_radius, epsilon = 1e-12);
        }
        let omega = 0.7;
        let s = g.lever() * omega / g.wheel_radius;
        let c = body_to_wheel_velocity(BodyVelocity::new(0.0, 0.0, omega), &g);
        let expected = [-s, s, -s, s];
        for (m, e) in c.wheels.iter().zip(expected) {
            assert_relative_eq!(*m, e, epsilon = 1e-12);
        }
    }

    #[test]
    fn transition_examples() {
        let g = geom();
        let zero = state_transition(&RobotState::default(), &ControlVector::zero(), 0.01, &g);
        assert_eq!(zero, RobotState::default());

        let s = RobotState {
            vx_body: 4.0,
            ..RobotState::default()
        };
        let out = state_transition(&s, &ControlVector::zero(), 0.5, &g);
        assert_eq!((out.x, out.y, out.theta), (2.0, 0.0, 0.0));
        assert_eq!((out.vx_body, out.vy_body, out.omega), (0.0, 0.0, 0.0));

        let s = RobotState {
            theta: FRAC_PI_2,
            vx_body: 10.0,
            ..RobotState::default()
        };
        let out = state_transition(&s, &ControlVector::zero(), 0.01, &g);
        assert!(out.x.abs() < 1e-15);
        assert_relative_eq!(out.y, 0.1, epsilon = 1e-15);
        assert_eq!(out.theta, FRAC_PI_2);
    }

    #[test]
    fn transition_hand_evaluated() {
        // (5, 3, pi, 2, 1, 0.5), all wheels at 1 rad/s, r = 1.9685, dt = 0.01.
        // cos(pi) = -1, sin(pi) = 0, so
        //   x = 5 + 0.01 * (2 * -1 - 1 * 0) = 4.98
        //   y = 3 + 0.01 * (2 * 0 + 1 * -1) = 2.99
        //   theta = pi + 0.005
        //   vx = r/4 * 4 = 1.9685, vy = 0, omega = 0.
        let g = RobotGeometry {
            wheel_radius: 1.9685,
            ..geom()
        };
        let s = RobotState {
            x: 5.0,
            y: 3.0,
            theta: PI,
            vx_body: 2.0,
            vy_body: 1.0,
            omega: 0.5,
        };
        let out = state_transition(&s, &ControlVector::new(1.0, 1.0, 1.0, 1.0), 0.01, &g);
        assert_relative_eq!(out.x, 4.98, epsilon = 1e-14);
        assert_relative_eq!(out.y, 2.99, epsilon = 1e-14);
        assert_relative_eq!(out.theta, PI + 0.005, epsilon = 1e-14);
        assert_relative_eq!(out.vx_body, 1.9685, epsilon = 1e-14);
        assert_eq!((out.vy_body, out.omega), (0.0, 0.0));
    }

    #[test]
    fn jacobian_at_origin_and_quarter_turn() {
        let dt = 0.01;
        let a = transition_jacobian(&RobotState::default(), dt);
        let mut expected = Matrix6::zeros();
        expected[(0, 0)] = 1.0;
        expected[(0, 3)] = dt;
        expected[(1, 1)] = 1.0;
        expected[(1, 4)] = dt;
        expected[(2, 2)] = 1.0;
        expected[(2, 5)] = dt;
        assert_eq!(a, expected);

        let s = RobotState {
            theta: FRAC_PI_2,
            vx_body: 3.0,
            vy_body: -2.0,
            ..RobotState::default()
        };
        let a = transition_jacobian(&s, dt);
        assert_relative_eq!(a[(0, 2)], -3.0 * dt, epsilon = 1e-15);
    }

    #[test]
    fn measurement_examples() {
        let g = geom();
        assert_eq!(measurement_fn(&RobotState::default(), &g), Vector6::zeros());
        let omega = 0.3;
        let spin = RobotState {
            omega,
            ..RobotState::default()
        };
        let z = measurement_fn(&spin, &g);
        assert_eq!(
            z,
            Vector6::new(0.0, 0.0, 0.0, -g.encoder_track * omega, g.encoder_track * omega, -g.encoder_offset * omega)
        );
        let fwd = RobotState {
            vx_body: 5.0,
            ..RobotState::default()
        };
        assert_eq!(measurement_fn(&fwd, &g), Vector6::new(0.0, 0.0, 0.0, 5.0, 5.0, 0.0));
    }

    #[test]
    fn odometry_examples() {
        let g = geom();
        let v = odometry_to_body_velocity(&EncoderReadings::new(7.0, 7.0, 0.0), &g);
        assert_eq!((v.vx, v.vy, v.omega), (7.0, 0.0, 0.0));
        let omega = 1.25;
        let enc = EncoderReadings::new(-g.encoder_track * omega, g.encoder_track * omega, -g.encoder_offset * omega);
        let v = odometry_to_body_velocity(&enc, &g);
        assert_relative_eq!(v.vx, 0.0, epsilon = 1e-15);
        assert_relative_eq!(v.vy, 0.0, epsilon = 1e-15);
        assert_relative_eq!(v.omega, omega, epsilon = 1e-15);
    }

    #[test]
    fn measurement_jacobian_entries() {
        let g = geom();
        let h = measurement_jacobian(&g);
        assert_eq!(h[(3, 5)], -g.encoder_track);
        assert_eq!(h[(4, 5)], g.encoder_track);
        assert_eq!(h[(5, 5)], -g.encoder_offset);
        assert_eq!(h.fixed_view::<3, 3>(0, 0).into_owned(), nalgebra::Matrix3::identity());
    }

    #[test]
    fn noise_schedules() {
        let q = process_noise_cov(0.01, &NoiseScale::default());
        assert_eq!(q, Matrix6::from_diagonal(&Vector6::new(2e-5, 2e-5, 2e-5, 0.45, 0.45, 0.45)));
        let q = process_noise_cov(0.001, &NoiseScale::default());
        assert_eq!(q[(0, 0)], 2e-6);
        assert_eq!(q[(3, 3)], 0.45);
        assert_eq!(process_noise_cov(0.01, &NoiseScale::zero()), Matrix6::zeros());

        let r = measurement_noise_cov(Some(10.0), &EncoderReadings::default(), &NoiseScale::default(), NO_LANDMARK_VARIANCE)
            .unwrap();
        assert_eq!(r[(0, 0)], 0.101);
        assert_eq!(r[(3, 3)], 0.001);
        let r = measurement_noise_cov(None, &EncoderReadings::new(10.0, 0.0, 0.0), &NoiseScale::default(), NO_LANDMARK_VARIANCE)
            .unwrap();
        assert_eq!(r[(0, 0)], 1e9);
        assert_eq!(r[(2, 2)], 1e9);
        assert_relative_eq!(r[(3, 3)], 0.201, epsilon = 1e-15);

        assert_eq!(
            measurement_noise_cov(Some(-1.0), &EncoderReadings::default(), &NoiseScale::default(), NO_LANDMARK_VARIANCE),
            Err(ModelError::InvalidLandmarkDistance(-1.0))
        );
    }

    #[test]
    fn residual_wraps_heading_across_seam() {
        let model = MecanumModel::new(geom(), NoiseScale::default());
        let z = Vector6::new(0.0, 0.0, PI - 0.05, 0.0, 0.0, 0.0);
        let zp = Vector6::new(0.0, 0.0, -PI + 0.05, 0.0, 0.0, 0.0);
        let r = model.residual(&z, &zp);
        assert_relative_eq!(r[2], -0.1, epsilon = 1e-12);
    }

    #[test]
    fn geometry_validation() {
        assert!(geom().validate().is_ok());
        let bad = RobotGeometry {
            encoder_track: 0.0,
            ..geom()
        };
        assert_eq!(
            bad.validate(),
            Err(ModelError::InvalidGeometry {
                field: "encoder_track",
                value: 0.0
            })
        );
    }
}
