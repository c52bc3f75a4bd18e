//! Path following: pure-pursuit target selection, per-axis PID, and the
//! mapping from a commanded body twist to capped wheel speeds.

mod path;
mod pid;
mod pursuit;

pub use path::{Path, Waypoint, MIN_WAYPOINT_SEPARATION};
pub use pid::{pid_step, PidGains, PidState};
pub use pursuit::{lookahead_target, LookaheadTarget, PathProgress, PursuitConfig};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::wrap_angle;
use crate::vehicle_model::{body_to_wheel_velocity, BodyVelocity, ControlVector, RobotGeometry, RobotState};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GuidanceError {
    #[error("a path needs at least 2 waypoints, got {0}")]
    TooFewWaypoints(usize),
    #[error("waypoint {index} coincides with the previous waypoint")]
    CoincidentWaypoints { index: usize },
    #[error("waypoint {index} has a non-finite coordinate or heading")]
    NonFiniteWaypoint { index: usize },
}

/// PID gains for the x, y, and heading controllers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AxisGains {
    pub x: PidGains,
    pub y: PidGains,
    pub theta: PidGains,
}

impl Default for AxisGains {
    fn default() -> Self {
        Self {
            x: PidGains::new(4.0, 0.0, 0.5),
            y: PidGains::new(4.0, 0.0, 0.5),
            theta: PidGains::new(6.0, 0.0, 0.5),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AxisPidState {
    pub x: PidState,
    pub y: PidState,
    pub theta: PidState,
}

/// Scales the wheel vector down uniformly so no wheel exceeds `cap`.
pub fn saturate(control: ControlVector, cap: f64) -> ControlVector {
    let peak = control.max_abs();
    if peak <= cap {
        return control;
    }
    let k = cap / peak;
    ControlVector {
        wheels: control.wheels.map(|w| w * k),
    }
}

/// Wheel command that drives `estimate` toward `target` while turning toward
/// `heading_target`. Position errors are rotated into the body frame before
/// entering the x and y controllers, and the heading error is wrapped.
pub fn compute_control(
    estimate: &RobotState,
    target: (f64, f64),
    heading_target: f64,
    gains: &AxisGains,
    pids: &AxisPidState,
    geom: &RobotGeometry,
) -> (ControlVector, AxisPidState) {
    let (sin, cos) = estimate.theta.sin_cos();
    let ex = target.0 - estimate.x;
    let ey = target.1 - estimate.y;
    let body_x = cos * ex + sin * ey;
    let body_y = -sin * ex + cos * ey;
    let heading_error = wrap_angle(heading_target - estimate.theta);

    let (vx, x) = pid_step(&pids.x, body_x, &gains.x);
    let (vy, y) = pid_step(&pids.y, body_y, &gains.y);
    let (omega, theta) = pid_step(&pids.theta, heading_error, &gains.theta);

    let wheels = body_to_wheel_velocity(BodyVelocity::new(vx, vy, omega), geom);
    (saturate(wheels, geom.wheel_speed_cap), AxisPidState { x, y, theta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vehicle_model::wheel_to_body_velocity;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn only_p(p: f64) -> PidGains {
        PidGains::new(p, 0.0, 0.0)
    }

    #[test]
    fn zero_error_gives_zero_control() {
        let g = RobotGeometry::default();
        let est = RobotState::at_pose(5.0, 6.0, 0.3);
        let (c, _) = compute_control(&est, (5.0, 6.0), 0.3, &AxisGains::default(), &AxisPidState::default(), &g);
        assert_eq!(c, ControlVector::zero());
    }

    #[test]
    fn straight_ahead_drives_all_wheels_equally() {
        let g = RobotGeometry {
            wheel_speed_cap: 1e9,
            ..RobotGeometry::default()
        };
        let gains = AxisGains {
            x: only_p(1.0),
            y: only_p(0.0),
            theta: only_p(0.0),
        };
        let (c, _) = compute_control(&RobotState::default(), (10.0, 0.0), 0.0, &gains, &AxisPidState::default(), &g);
        for w in c.wheels {
            assert!((w - 10.0 / g.wheel_radius).abs() < 1e-12);
        }
    }

    #[test]
    fn global_error_is_rotated_into_body_frame() {
        let g = RobotGeometry {
            wheel_speed_cap: 1e9,
            ..RobotGeometry::default()
        };
        let gains = AxisGains {
            x: only_p(1.0),
            y: only_p(1.0),
            theta: only_p(0.0),
        };
        let est = RobotState::at_pose(0.0, 0.0, FRAC_PI_2);
        let (c, _) = compute_control(&est, (10.0, 0.0), FRAC_PI_2, &gains, &AxisPidState::default(), &g);
        let twist = wheel_to_body_velocity(&c, &g);
        assert!(twist.vx.abs() < 1e-12);
        assert!((twist.vy + 10.0).abs() < 1e-12);
    }

    #[test]
    fn saturation_caps_largest_wheel() {
        let c = saturate(ControlVector::new(60.0, -30.0, 15.0, 0.0), 30.0);
        assert_eq!(c.wheels, [30.0, -15.0, 7.5, 0.0]);
    }

    proptest! {
        #[test]
        fn saturation_preserves_direction(
            w in proptest::array::uniform4(-200.0f64..200.0),
            cap in 1.0f64..50.0,
        ) {
            let before = ControlVector { wheels: w };
            let after = saturate(before, cap);
            prop_assert!(after.max_abs() <= cap * (1.0 + 1e-12));
            let k = if before.max_abs() > 0.0 { after.max_abs() / before.max_abs() } else { 1.0 };
            prop_assert!(k > 0.0);
            for (a, b) in after.wheels.iter().zip(before.wheels) {
                prop_assert!((a - k * b).abs() <= 1e-9 * (1.0 + b.abs()));
            }
        }
    }
}
