//! Published RMSE values for the two localization tables.
//!
//! These come from a differently configured robot and course. They are shown
//! next to our numbers for orientation and never used to judge a result.

use crate::world_sim::EstimatorMode;

/// Published value for a mode and RMSE component, if one exists.
///
/// `table` is `"velocity"` or `"camera"`; `component` is one of
/// [`RMSE_COMPONENTS`](super::RMSE_COMPONENTS).
pub fn published(table: &str, mode: EstimatorMode, component: &str) -> Option<f64> {
    use EstimatorMode::*;
    let v = match (table, mode, component) {
        ("velocity", Model, "xy") => 2.2432,
        ("velocity", Odo, "xy") => 2.9770,
        ("velocity", Fused, "xy") => 2.8704,
        ("velocity", Model, "theta") => 0.1179,
        ("velocity", Odo, "theta") => 0.1903,
        ("velocity", Fused, "theta") => 0.1864,
        ("velocity", Model, "vx") => 0.6692,
        ("velocity", Odo, "vx") => 0.4578,
        ("velocity", Fused, "vx") => 0.3589,
        ("velocity", Model, "vy") => 0.6717,
        ("velocity", Odo, "vy") => 0.4120,
        ("velocity", Fused, "vy") => 0.3271,
        ("velocity", Model, "omega") => 0.6698,
        ("velocity", Odo, "omega") => 0.2286,
        ("velocity", Fused, "omega") => 0.1996,
        // The published x and y entries for the fused column exceed its
        // (x, y) entry, which cannot happen with this metric.
        ("camera", Fused, "xy") => 2.8704,
        ("camera", Fused, "x") => 6.4336,
        ("camera", Fused, "y") => 8.0909,
        ("camera", Fused, "theta") => 0.1864,
        ("camera", FusedCamera, "xy") => 1.2140,
        ("camera", FusedCamera, "x") => 1.6400,
        ("camera", FusedCamera, "y") => 1.8259,
        ("camera", FusedCamera, "theta") => 0.0956,
        _ => return None,
    };
    Some(v)
}
