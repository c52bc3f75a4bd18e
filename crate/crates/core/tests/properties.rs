use approx::assert_relative_eq;
use mecanum_ekf::estimator::{kalman_gain, Matrix6, Vector6};
use mecanum_ekf::experiments::{self, RunOptions};
use mecanum_ekf::vehicle_model::{
    body_to_odometry, measurement_jacobian, state_transition, transition_jacobian, ControlVector, NoiseScale,
    RobotGeometry, RobotState, R_ENCODER_FLOOR, R_ENCODER_QUADRATIC,
};
use mecanum_ekf::world_sim::{synthesize_measurement, EstimatorMode, Field, ScenarioConfig};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn spd(entries: &[f64], floor: f64) -> Matrix6 {
    let b = Matrix6::from_column_slice(entries);
    b * b.transpose() + Matrix6::identity() * floor
}

proptest! {
    #[test]
    fn gain_matches_explicit_inverse(
        p in prop::collection::vec(-2.0f64..2.0, 36),
        r in prop::collection::vec(-1.0f64..1.0, 36),
    ) {
        let p = spd(&p, 0.1);
        let r = spd(&r, 0.05);
        let h = measurement_jacobian(&RobotGeometry::default());
        let k = kalman_gain(&p, &h, &r).unwrap();

        let pd = DMatrix::from_column_slice(6, 6, p.as_slice());
        let hd = DMatrix::from_column_slice(6, 6, h.as_slice());
        let rd = DMatrix::from_column_slice(6, 6, r.as_slice());
        let s_inv = (&hd * &pd * hd.transpose() + rd).try_inverse().unwrap();
        let oracle = &pd * hd.transpose() * s_inv;
        for i in 0..6 {
            for j in 0..6 {
                prop_assert!((k[(i, j)] - oracle[(i, j)]).abs() <= 1e-8 * oracle[(i, j)].abs().max(1.0));
            }
        }
    }

    #[test]
    fn transition_jacobian_matches_central_difference(
        x in 0.0f64..144.0, y in 0.0f64..144.0, theta in -10.0f64..10.0,
        vx in -60.0f64..60.0, vy in -60.0f64..60.0, omega in -6.0f64..6.0,
        dt in 0.001f64..0.5,
    ) {
        let geom = RobotGeometry::default();
        let s = RobotState { x, y, theta, vx_body: vx, vy_body: vy, omega };
        let u = ControlVector::new(3.0, -2.0, 5.0, 1.0);
        let a = transition_jacobian(&s, dt);
        let step = 1e-6;
        for j in 0..6 {
            let mut plus = s.to_vector();
            let mut minus = s.to_vector();
            plus[j] += step;
            minus[j] -= step;
            let fd = (state_transition(&RobotState::from_vector(&plus), &u, dt, &geom).to_vector()
                - state_transition(&RobotState::from_vector(&minus), &u, dt, &geom).to_vector())
                / (2.0 * step);
            for i in 0..6 {
                prop_assert!((a[(i, j)] - fd[i]).abs() <= 1e-5 * a[(i, j)].abs().max(1.0), "A[{i},{j}]");
            }
        }
    }
}

#[test]
fn encoder_noise_variance_follows_schedule() {
    let geom = RobotGeometry::default();
    let truth = RobotState {
        vx_body: 20.0,
        vy_body: -5.0,
        omega: 0.5,
        ..RobotState::default()
    };
    let expected = body_to_odometry(truth.body_velocity(), &geom);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 40_000;
    let mut sums = [0.0f64; 3];
    for _ in 0..n {
        let m = synthesize_measurement(&truth, None, &geom, &NoiseScale::default(), &mut rng);
        sums[0] += (m.encoders.left - expected.left).powi(2);
        sums[1] += (m.encoders.right - expected.right).powi(2);
        sums[2] += (m.encoders.lateral - expected.lateral).powi(2);
    }
    for (sum, speed) in sums.iter().zip([expected.left, expected.right, expected.lateral]) {
        let variance = R_ENCODER_QUADRATIC * speed * speed + R_ENCODER_FLOOR;
        assert_relative_eq!(sum / n as f64, variance, max_relative = 0.05);
    }
}

#[test]
fn permuted_seeds_give_identical_reports() {
    let scenario = ScenarioConfig::figure7();
    let seeds = RunOptions::new(21, 6).seeds();
    let mut shuffled = seeds.clone();
    shuffled.reverse();
    shuffled.swap(0, 3);
    let a = experiments::experiment_velocity_fusion(&scenario, &RunOptions::with_seeds(seeds)).unwrap();
    let b = experiments::experiment_velocity_fusion(&scenario, &RunOptions::with_seeds(shuffled)).unwrap();
    assert_eq!(a.trials, b.trials);
    assert_eq!(a.summaries, b.summaries);
}

#[test]
fn blind_camera_matches_fused() {
    let mut scenario = ScenarioConfig::figure7();
    scenario.field = Field::default().without_landmarks();
    let r = experiments::experiment_camera_fusion(&scenario, &RunOptions::new(4, 20)).unwrap();
    let f = r.summary(EstimatorMode::Fused).unwrap();
    let c = r.summary(EstimatorMode::FusedCamera).unwrap();
    for i in 0..7 {
        let diff = (f.mean.components()[i] - c.mean.components()[i]).abs();
        let se = f.std_error[i].hypot(c.std_error[i]);
        assert!(diff < 2.0 * se.max(1e-12), "component {i}: {diff} vs {se}");
    }
}

#[test]
fn rmse_long_csv_has_one_row_per_component() {
    let r = experiments::experiment_velocity_fusion(&ScenarioConfig::figure7(), &RunOptions::new(0, 3)).unwrap();
    let mut buf = Vec::new();
    experiments::write_rmse_long_csv(&r, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("mode,seed,component,rmse"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3 * 3 * 7);
    // Values round-trip exactly.
    let first: f64 = rows[0].rsplit(',').next().unwrap().parse().unwrap();
    assert_eq!(first, r.trials[0].report.xy_rmse);
}

#[test]
fn trace_csv_round_trips_floats() {
    let trace =
        mecanum_ekf::run_closed_loop(&ScenarioConfig::figure7(), EstimatorMode::FusedCamera, 3).unwrap();
    let mut buf = Vec::new();
    trace.write_csv(&mut buf).unwrap();
    let mut reader = csv::Reader::from_reader(buf.as_slice());
    assert_eq!(reader.headers().unwrap().len(), 24);
    for (row, tick) in reader.records().zip(&trace.ticks) {
        let row = row.unwrap();
        let est: Vec<f64> = (7..13).map(|i| row[i].parse().unwrap()).collect();
        assert_eq!(Vector6::from_vec(est), tick.estimate.to_vector());
    }
}
