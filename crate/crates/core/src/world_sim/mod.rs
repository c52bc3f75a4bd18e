//! Ground-truth simulation: noisy truth propagation at the fine time step,
//! sensor synthesis, and camera field-of-view gating.

mod closed_loop;
mod trace;

pub use closed_loop::{run_closed_loop, EstimatorMode, ScenarioConfig, SimError, DIVERGENCE_DIAGONALS};
pub use trace::{Arrival, TraceTick, TrialOutcome, TrialTrace, TRACE_CSV_HEADER};

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::angle::wrap_angle;
use crate::vehicle_model::{
    body_to_odometry, process_noise_cov, state_transition, ControlVector, EncoderReadings, Measurement, NoiseScale,
    PoseFix, RobotGeometry, RobotState, R_ENCODER_FLOOR, R_ENCODER_QUADRATIC, R_POSITION_FLOOR, R_POSITION_QUADRATIC,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WorldError {
    #[error("field dimensions must be positive, got {width} x {height}")]
    InvalidField { width: f64, height: f64 },
    #[error("landmark {id} at ({x}, {y}) is not on the field boundary")]
    LandmarkOffBoundary { id: u32, x: f64, y: f64 },
    #[error("fov must be in (0, 180) degrees, got {0} degrees")]
    InvalidFov(f64),
    #[error("time steps must be positive, got truth_dt={truth_dt}, filter_dt={filter_dt}")]
    InvalidTimestep { truth_dt: f64, filter_dt: f64 },
    #[error("filter_dt must be an integer multiple of truth_dt, got filter_dt={filter_dt}, truth_dt={truth_dt}")]
    NonIntegerSubsteps { truth_dt: f64, filter_dt: f64 },
}

/// Wall-mounted image used for camera localization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Landmark {
    pub id: u32,
    pub x: f64,
    pub y: f64,
    /// Direction the image faces, pointing into the field (radians).
    pub facing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub width: f64,
    pub height: f64,
    pub landmarks: Vec<Landmark>,
}

/// Boundary tolerance for landmark placement, in inches.
const BOUNDARY_TOL: f64 = 1e-6;

impl Default for Field {
    /// 12 ft square field with three images on the top wall and three on
    /// the bottom wall.
    fn default() -> Self {
        let mut landmarks = Vec::new();
        for (i, x) in [36.0, 72.0, 108.0].into_iter().enumerate() {
            landmarks.push(Landmark {
                id: i as u32,
                x,
                y: 144.0,
                facing: -FRAC_PI_2,
            });
        }
        for (i, x) in [36.0, 72.0, 108.0].into_iter().enumerate() {
            landmarks.push(Landmark {
                id: 3 + i as u32,
                x,
                y: 0.0,
                facing: FRAC_PI_2,
            });
        }
        Self {
            width: 144.0,
            height: 144.0,
            landmarks,
        }
    }
}

impl Field {
    /// Layout for the warehouse cycling course: images on the left and
    /// bottom walls.
    pub fn cycle_layout() -> Self {
        let mut landmarks = Vec::new();
        for (i, y) in [36.0, 72.0, 108.0].into_iter().enumerate() {
            landmarks.push(Landmark {
                id: i as u32,
                x: 0.0,
                y,
                facing: 0.0,
            });
        }
        for (i, x) in [36.0, 72.0, 108.0].into_iter().enumerate() {
            landmarks.push(Landmark {
                id: 3 + i as u32,
                x,
                y: 0.0,
                facing: FRAC_PI_2,
            });
        }
        Self {
            width: 144.0,
            height: 144.0,
            landmarks,
        }
    }

    pub fn without_landmarks(mut self) -> Self {
        self.landmarks.clear();
        self
    }

    pub fn diagonal(&self) -> f64 {
        self.width.hypot(self.height)
    }

    pub fn validate(&self) -> Result<(), WorldError> {
        if !(self.width > 0.0 && self.height > 0.0 && self.width.is_finite() && self.height.is_finite()) {
            return Err(WorldError::InvalidField {
                width: self.width,
                height: self.height,
            });
        }
        for lm in &self.landmarks {
            let inside = (-BOUNDARY_TOL..=self.width + BOUNDARY_TOL).contains(&lm.x)
                && (-BOUNDARY_TOL..=self.height + BOUNDARY_TOL).contains(&lm.y);
            let on_edge = lm.x.abs() <= BOUNDARY_TOL
                || (lm.x - self.width).abs() <= BOUNDARY_TOL
                || lm.y.abs() <= BOUNDARY_TOL
                || (lm.y - self.height).abs() <= BOUNDARY_TOL;
            if !(inside && on_edge) {
                return Err(WorldError::LandmarkOffBoundary {
                    id: lm.id,
                    x: lm.x,
                    y: lm.y,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CameraModel {
    /// Full horizontal field of view, radians.
    pub fov: f64,
    /// Camera axis relative to robot forward, radians.
    pub mount_heading_offset: f64,
    /// Maximum detection range in inches; `None` is unbounded.
    pub max_range: Option<f64>,
    /// Angular margin inside the FOV edge that the image center must clear
    /// for the image to count as fully in view, radians.
    pub edge_margin: f64,
}

impl Default for CameraModel {
    fn default() -> Self {
        Self {
            fov: 70f64.to_radians(),
            mount_heading_offset: 0.0,
            max_range: None,
            edge_margin: 2f64.to_radians(),
        }
    }
}

impl CameraModel {
    pub fn validate(&self) -> Result<(), WorldError> {
        if !(self.fov > 0.0 && self.fov < PI) {
            return Err(WorldError::InvalidFov(self.fov.to_degrees()));
        }
        Ok(())
    }
}

/// Truth and filter time steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimClock {
    pub truth_dt: f64,
    pub filter_dt: f64,
}

impl Default for SimClock {
    fn default() -> Self {
        Self {
            truth_dt: 0.001,
            filter_dt: 0.01,
        }
    }
}

impl SimClock {
    pub fn new(truth_dt: f64, filter_dt: f64) -> Result<Self, WorldError> {
        let clock = Self { truth_dt, filter_dt };
        clock.substeps_per_filter_step()?;
        Ok(clock)
    }

    /// Number of truth steps per filter step; errors unless `filter_dt` is an
    /// integer multiple of `truth_dt`.
    pub fn substeps_per_filter_step(&self) -> Result<usize, WorldError> {
        let (truth_dt, filter_dt) = (self.truth_dt, self.filter_dt);
        if !(truth_dt > 0.0 && filter_dt > 0.0 && truth_dt.is_finite() && filter_dt.is_finite()) {
            return Err(WorldError::InvalidTimestep { truth_dt, filter_dt });
        }
        let ratio = filter_dt / truth_dt;
        let n = ratio.round();
        if n < 1.0 || (ratio - n).abs() > 1e-9 * n {
            return Err(WorldError::NonIntegerSubsteps { truth_dt, filter_dt });
        }
        Ok(n as usize)
    }
}

/// SplitMix64 finalizer, used to derive independent seeds.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial seed from a master seed and trial index.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

/// Seeded random source with separate substreams for process noise and
/// measurement noise, so drawing from one never shifts the other.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    process: ChaCha8Rng,
    measurement: ChaCha8Rng,
}

impl RngStream {
    const PROCESS_STREAM: u64 = 1;
    const MEASUREMENT_STREAM: u64 = 2;

    pub fn new(seed: u64) -> Self {
        let mut process = ChaCha8Rng::seed_from_u64(seed);
        process.set_stream(Self::PROCESS_STREAM);
        let mut measurement = ChaCha8Rng::seed_from_u64(seed);
        measurement.set_stream(Self::MEASUREMENT_STREAM);
        Self {
            seed,
            process,
            measurement,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn process(&mut self) -> &mut ChaCha8Rng {
        &mut self.process
    }

    pub fn measurement(&mut self) -> &mut ChaCha8Rng {
        &mut self.measurement
    }
}

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// One truth step: the process model plus a draw from `N(0, Q(dt))`.
/// Always consumes six normals from `rng`.
pub fn step_true_state<R: Rng + ?Sized>(
    state: &RobotState,
    control: &ControlVector,
    dt: f64,
    geom: &RobotGeometry,
    noise: &NoiseScale,
    rng: &mut R,
) -> RobotState {
    let q = process_noise_cov(dt, noise);
    let mut next = state_transition(state, control, dt, geom).to_vector();
    for i in 0..6 {
        next[i] += q[(i, i)].sqrt() * standard_normal(rng);
    }
    RobotState::from_vector(&next)
}

/// Nearest landmark fully inside the camera's view and facing the robot.
pub fn visible_landmark<'a>(
    pose: (f64, f64, f64),
    camera: &CameraModel,
    field: &'a Field,
) -> Option<&'a Landmark> {
    let (x, y, theta) = pose;
    let half_fov = camera.fov / 2.0 - camera.edge_margin;
    field
        .landmarks
        .iter()
        .filter_map(|lm| {
            let (dx, dy) = (lm.x - x, lm.y - y);
            let dist = dx.hypot(dy);
            if camera.max_range.is_some_and(|r| dist > r) {
                return None;
            }
            let bearing = wrap_angle(dy.atan2(dx) - theta - camera.mount_heading_offset);
            let faces_robot = lm.facing.cos() * dx + lm.facing.sin() * dy < 0.0;
            (bearing.abs() <= half_fov && faces_robot).then_some((lm, dist))
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(lm, _)| lm)
}

/// Noisy sensor sample from the true state. The encoder variances follow the
/// speed-dependent schedule at the true encoder speeds; the camera rows, when
/// a landmark is given, follow the distance schedule at the true distance.
/// Always consumes six normals from `rng`.
pub fn synthesize_measurement<R: Rng + ?Sized>(
    truth: &RobotState,
    landmark: Option<&Landmark>,
    geom: &RobotGeometry,
    noise: &NoiseScale,
    rng: &mut R,
) -> Measurement {
    let n: [f64; 6] = std::array::from_fn(|_| standard_normal(rng));
    let enc = body_to_odometry(truth.body_velocity(), geom);
    let jitter = |speed: f64, n: f64| {
        let var = (R_ENCODER_QUADRATIC * speed * speed + R_ENCODER_FLOOR) * noise.r_encoder;
        speed + var.sqrt() * n
    };
    let encoders = EncoderReadings::new(jitter(enc.left, n[3]), jitter(enc.right, n[4]), jitter(enc.lateral, n[5]));
    let pose = landmark.map(|lm| {
        let d = (lm.x - truth.x).hypot(lm.y - truth.y);
        let sd = ((R_POSITION_QUADRATIC * d * d + R_POSITION_FLOOR) * noise.r_position).sqrt();
        PoseFix {
            x: truth.x + sd * n[0],
            y: truth.y + sd * n[1],
            theta: truth.theta + sd * n[2],
            landmark_distance: d,
        }
    });
    Measurement { pose, encoders }
}
