use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PidGains {
    pub p: f64,
    pub i: f64,
    pub d: f64,
    /// Anti-windup bound on the accumulated error, in error units.
    pub integral_limit: f64,
}

impl Default for PidGains {
    fn default() -> Self {
        Self::new(4.0, 0.0, 0.5)
    }
}

impl PidGains {
    pub const DEFAULT_INTEGRAL_LIMIT: f64 = 50.0;

    pub fn new(p: f64, i: f64, d: f64) -> Self {
        Self {
            p,
            i,
            d,
            integral_limit: Self::DEFAULT_INTEGRAL_LIMIT,
        }
    }

    pub fn is_valid(&self) -> bool {
        [self.p, self.i, self.d].iter().all(|g| g.is_finite()) && self.p >= 0.0 && self.integral_limit >= 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PidState {
    pub integral: f64,
    /// `None` until the first step.
    pub previous_error: Option<f64>,
}

/// One discrete PID update. The derivative term is the raw change in error
/// since the previous call (zero on the first call), not divided by dt.
pub fn pid_step(state: &PidState, error: f64, gains: &PidGains) -> (f64, PidState) {
    let integral = (state.integral + error).clamp(-gains.integral_limit, gains.integral_limit);
    let derivative = state.previous_error.map_or(0.0, |prev| error - prev);
    let output = gains.p * error + gains.i * integral + gains.d * derivative;
    (
        output,
        PidState {
            integral,
            previous_error: Some(error),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn run(gains: &PidGains, errors: &[f64]) -> Vec<f64> {
        let mut state = PidState::default();
        errors
            .iter()
            .map(|&e| {
                let (out, next) = pid_step(&state, e, gains);
                state = next;
                out
            })
            .collect()
    }

    #[test]
    fn textbook_cases() {
        assert_eq!(run(&PidGains::new(1.0, 0.0, 0.0), &[3.0, -2.5]), vec![3.0, -2.5]);
        assert_eq!(run(&PidGains::new(0.0, 1.0, 0.0), &[1.0, 1.0]), vec![1.0, 2.0]);
        assert_eq!(run(&PidGains::new(0.0, 0.0, 1.0), &[3.0, 5.0]), vec![0.0, 2.0]);
    }

    #[test]
    fn integral_is_clamped() {
        let gains = PidGains {
            integral_limit: 5.0,
            ..PidGains::new(0.0, 1.0, 0.0)
        };
        let out = run(&gains, &[4.0, 4.0, 4.0, -1.0]);
        assert_eq!(out, vec![4.0, 5.0, 5.0, 4.0]);
    }

    proptest! {
        #[test]
        fn doubling_errors_doubles_outputs(
            p in 0.0f64..10.0, i in -2.0f64..2.0, d in -2.0f64..2.0,
            errors in proptest::collection::vec(-1.0f64..1.0, 1..20),
        ) {
            // Errors stay well inside the clamp, so the map is linear.
            let gains = PidGains::new(p, i, d);
            let doubled: Vec<f64> = errors.iter().map(|e| 2.0 * e).collect();
            for (a, b) in run(&gains, &errors).iter().zip(run(&gains, &doubled)) {
                prop_assert!((2.0 * a - b).abs() <= 1e-12 * (1.0 + b.abs()));
            }
        }
    }
}
