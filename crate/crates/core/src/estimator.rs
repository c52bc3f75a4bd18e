//! Generic extended Kalman filter over a six-dimensional state and a
//! six-dimensional measurement.
//!
//! The filter does not own a model. Callers hand in a [`PredictionModel`]
//! for the propagation step and a [`MeasurementModel`] plus a per-update
//! noise matrix for the correction step. Every operation is a pure function
//! from one [`BeliefState`] to the next.

use nalgebra::{Cholesky, SMatrix, SVector, LU};
use thiserror::Error;

pub type Vector4 = SVector<f64, 4>;
pub type Vector6 = SVector<f64, 6>;
pub type Matrix6 = SMatrix<f64, 6, 6>;

/// Relative pivot threshold under which the innovation covariance is treated
/// as singular.
const PIVOT_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    #[error("non-finite value {value} in {what} at index {index}")]
    NonFinite {
        what: &'static str,
        index: usize,
        value: f64,
    },
    #[error("time step must be positive and finite, got {0}")]
    InvalidTimestep(f64),
    #[error("measurement noise variance at index {index} must be positive, got {value}")]
    NonPositiveNoise { index: usize, value: f64 },
    #[error("innovation covariance is singular (near-singular dimension {dimension})")]
    SingularInnovation { dimension: usize },
}

/// Process model consumed by [`predict`].
pub trait PredictionModel {
    fn transition(&self, state: &Vector6, control: &Vector4, dt: f64) -> Vector6;
    fn transition_jacobian(&self, state: &Vector6, control: &Vector4, dt: f64) -> Matrix6;
    fn process_noise(&self, dt: f64) -> Matrix6;
}

/// Measurement model consumed by [`update`].
pub trait MeasurementModel {
    fn measure(&self, state: &Vector6) -> Vector6;
    fn measurement_jacobian(&self, state: &Vector6) -> Matrix6;

    /// Innovation `z - z_pred`. Models with angular rows override this to
    /// wrap those rows.
    fn residual(&self, measured: &Vector6, predicted: &Vector6) -> Vector6 {
        measured - predicted
    }
}

/// Mean and covariance of the running estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefState {
    pub mean: Vector6,
    pub covariance: Matrix6,
}

impl BeliefState {
    pub fn new(mean: Vector6, covariance: Matrix6) -> Self {
        Self { mean, covariance }
    }

    /// Default starting belief: the given pose with zero velocity and
    /// covariance `diag(1, 1, 0.05, 1, 1, 0.05)`.
    pub fn at_pose(x: f64, y: f64, theta: f64) -> Self {
        Self {
            mean: Vector6::new(x, y, theta, 0.0, 0.0, 0.0),
            covariance: Matrix6::from_diagonal(&Vector6::new(1.0, 1.0, 0.05, 1.0, 1.0, 0.05)),
        }
    }
}

pub fn symmetrize(m: &Matrix6) -> Matrix6 {
    (m + m.transpose()) * 0.5
}

fn check_vector<const N: usize>(what: &'static str, v: &SVector<f64, N>) -> Result<(), EstimatorError> {
    match v.iter().position(|x| !x.is_finite()) {
        Some(index) => Err(EstimatorError::NonFinite {
            what,
            index,
            value: v[index],
        }),
        None => Ok(()),
    }
}

fn check_matrix(what: &'static str, m: &Matrix6) -> Result<(), EstimatorError> {
    // Row-major index so diagnostics read naturally as row*6 + col.
    for r in 0..6 {
        for c in 0..6 {
            let value = m[(r, c)];
            if !value.is_finite() {
                return Err(EstimatorError::NonFinite {
                    what,
                    index: r * 6 + c,
                    value,
                });
            }
        }
    }
    Ok(())
}

/// Propagates the belief through the process model: `x_p = f(x, u)` and
/// `P_p = A P Aᵀ + Q(dt)`, re-symmetrized.
pub fn predict<M: PredictionModel + ?Sized>(
    belief: &BeliefState,
    control: &Vector4,
    dt: f64,
    model: &M,
) -> Result<BeliefState, EstimatorError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(EstimatorError::InvalidTimestep(dt));
    }
    check_vector("belief mean", &belief.mean)?;
    check_matrix("belief covariance", &belief.covariance)?;
    check_vector("control", control)?;

    let mean = model.transition(&belief.mean, control, dt);
    let a = model.transition_jacobian(&belief.mean, control, dt);
    let q = model.process_noise(dt);
    let covariance = symmetrize(&(a * belief.covariance * a.transpose() + q));

    check_vector("predicted mean", &mean)?;
    check_matrix("predicted covariance", &covariance)?;
    Ok(BeliefState { mean, covariance })
}

/// Innovation covariance `S = H P Hᵀ + R`.
fn innovation_covariance(p: &Matrix6, h: &Matrix6, r: &Matrix6) -> Matrix6 {
    symmetrize(&(h * p * h.transpose() + r))
}

/// Index of the first pivot that collapses during an LU factorization of `s`.
fn near_singular_dimension(s: &Matrix6) -> usize {
    let scale = s.amax().max(f64::MIN_POSITIVE);
    let u = LU::new(*s).u();
    (0..6)
        .find(|&i| u[(i, i)].abs() <= PIVOT_RTOL * scale)
        .unwrap_or_else(|| {
            // Fall back to the smallest pivot when none is strictly below the
            // threshold but Cholesky still failed (indefinite S).
            (0..6)
                .min_by(|&a, &b| u[(a, a)].abs().total_cmp(&u[(b, b)].abs()))
                .unwrap_or(0)
        })
}

fn factor_innovation(s: &Matrix6) -> Result<Cholesky<f64, nalgebra::Const<6>>, EstimatorError> {
    let chol = Cholesky::new(*s).ok_or(EstimatorError::SingularInnovation {
        dimension: near_singular_dimension(s),
    })?;
    // Cholesky accepts pivots that survive only as rounding residue; compare
    // each pivot against its own diagonal entry.
    let l = chol.l_dirty();
    if let Some(dimension) = (0..6).find(|&i| l[(i, i)] * l[(i, i)] <= PIVOT_RTOL * s[(i, i)]) {
        return Err(EstimatorError::SingularInnovation { dimension });
    }
    Ok(chol)
}

/// Kalman gain `K = P_p Hᵀ (H P_p Hᵀ + R)⁻¹`, computed by solving
/// `S Kᵀ = H P_p` instead of forming the inverse.
pub fn kalman_gain(p_pred: &Matrix6, h: &Matrix6, r: &Matrix6) -> Result<Matrix6, EstimatorError> {
    let s = innovation_covariance(p_pred, h, r);
    let chol = factor_innovation(&s)?;
    // P_p is symmetric, so (P_p Hᵀ)ᵀ = H P_p.
    Ok(chol.solve(&(h * p_pred)).transpose())
}

/// Corrects the belief with a measurement: `x = x_p + K (z - h(x_p))`,
/// `P = P_p - K H P_p`, re-symmetrized.
pub fn update<M: MeasurementModel + ?Sized>(
    belief: &BeliefState,
    measurement: &Vector6,
    model: &M,
    measurement_noise: &Matrix6,
) -> Result<BeliefState, EstimatorError> {
    check_vector("measurement", measurement)?;
    check_vector("belief mean", &belief.mean)?;
    check_matrix("belief covariance", &belief.covariance)?;
    check_matrix("measurement noise", measurement_noise)?;
    if let Some(index) = (0..6).find(|&i| measurement_noise[(i, i)] <= 0.0) {
        return Err(EstimatorError::NonPositiveNoise {
            index,
            value: measurement_noise[(index, index)],
        });
    }

    let h = model.measurement_jacobian(&belief.mean);
    let predicted = model.measure(&belief.mean);
    let innovation = model.residual(measurement, &predicted);
    let gain = kalman_gain(&belief.covariance, &h, measurement_noise)?;

    let mean = belief.mean + gain * innovation;
    let covariance = symmetrize(&(belief.covariance - gain * h * belief.covariance));
    Ok(BeliefState { mean, covariance })
}
