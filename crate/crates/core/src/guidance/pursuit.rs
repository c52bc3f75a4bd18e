use serde::{Deserialize, Serialize};

use super::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PursuitConfig {
    /// Radius of the pursuit circle, in inches.
    pub lookahead_radius: f64,
    /// Distance from the final waypoint that counts as arrival, in inches.
    pub waypoint_advance_tolerance: f64,
}

impl Default for PursuitConfig {
    fn default() -> Self {
        Self {
            lookahead_radius: 12.0,
            waypoint_advance_tolerance: 2.0,
        }
    }
}

/// Position along a path as (segment index, parameter in `[0, 1]`).
/// Ordering is lexicographic.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct PathProgress {
    pub segment: usize,
    pub param: f64,
}

impl PathProgress {
    pub fn new(segment: usize, param: f64) -> Self {
        Self { segment, param }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LookaheadTarget {
    pub x: f64,
    pub y: f64,
    /// Path location of the returned target.
    pub at: PathProgress,
    /// Updated progress marker; never behind the marker passed in.
    pub progress: PathProgress,
    /// The target is the path's final waypoint.
    pub exhausted: bool,
}

fn point_on(path: &Path, at: PathProgress) -> (f64, f64) {
    let (a, b) = path.segment(at.segment);
    (a.x + at.param * (b.x - a.x), a.y + at.param * (b.y - a.y))
}

/// Parameters in `[0, 1]` where the segment crosses the circle.
pub(crate) fn circle_segment_intersections(
    a: (f64, f64),
    b: (f64, f64),
    center: (f64, f64),
    radius: f64,
) -> impl Iterator<Item = f64> {
    let d = (b.0 - a.0, b.1 - a.1);
    let f = (a.0 - center.0, a.1 - center.1);
    let qa = d.0 * d.0 + d.1 * d.1;
    let qb = 2.0 * (f.0 * d.0 + f.1 * d.1);
    let qc = f.0 * f.0 + f.1 * f.1 - radius * radius;
    let disc = qb * qb - 4.0 * qa * qc;
    let roots = if disc < 0.0 {
        [None, None]
    } else {
        let sq = disc.sqrt();
        [Some((-qb - sq) / (2.0 * qa)), Some((-qb + sq) / (2.0 * qa))]
    };
    roots.into_iter().flatten().filter(|t| (0.0..=1.0).contains(t))
}

fn remaining_length(path: &Path, from: PathProgress) -> f64 {
    let first = path.segment_length(from.segment) * (1.0 - from.param);
    first + (from.segment + 1..path.segment_count()).map(|i| path.segment_length(i)).sum::<f64>()
}

/// Nearest path point at or beyond `from`.
fn nearest_point_ahead(path: &Path, position: (f64, f64), from: PathProgress) -> PathProgress {
    let mut best = from;
    let mut best_d2 = f64::INFINITY;
    for seg in from.segment..path.segment_count() {
        let (a, b) = path.segment(seg);
        let d = (b.x - a.x, b.y - a.y);
        let len2 = d.0 * d.0 + d.1 * d.1;
        let t = (((position.0 - a.x) * d.0 + (position.1 - a.y) * d.1) / len2).clamp(0.0, 1.0);
        let t = if seg == from.segment { t.max(from.param) } else { t };
        let at = PathProgress::new(seg, t);
        let p = point_on(path, at);
        let d2 = (p.0 - position.0).powi(2) + (p.1 - position.1).powi(2);
        if d2 < best_d2 {
            best_d2 = d2;
            best = at;
        }
    }
    best
}

/// Pure-pursuit target selection.
///
/// Picks the intersection of the lookahead circle with the path that lies
/// furthest along the path, considering only points at or beyond `progress`.
/// Once the remaining path fits inside two radii and the final waypoint is
/// inside the circle, the final waypoint itself is the target. With no
/// intersection the nearest path point ahead of the marker is returned.
pub fn lookahead_target(
    path: &Path,
    position: (f64, f64),
    cfg: &PursuitConfig,
    progress: PathProgress,
) -> LookaheadTarget {
    let radius = cfg.lookahead_radius;
    let last = path.segment_count() - 1;
    let end = path.end();

    let end_inside = (end.x - position.0).hypot(end.y - position.1) <= radius;
    let chosen = if end_inside && remaining_length(path, progress) <= 2.0 * radius {
        PathProgress::new(last, 1.0)
    } else {
        let mut best: Option<PathProgress> = None;
        for seg in progress.segment..=last {
            let (a, b) = path.segment(seg);
            for t in circle_segment_intersections((a.x, a.y), (b.x, b.y), position, radius) {
                let at = PathProgress::new(seg, t);
                if at >= progress && best.is_none_or(|b| at > b) {
                    best = Some(at);
                }
            }
        }
        best.unwrap_or_else(|| nearest_point_ahead(path, position, progress))
    };

    let (x, y) = point_on(path, chosen);
    let progress = if chosen > progress { chosen } else { progress };
    LookaheadTarget {
        x,
        y,
        at: chosen,
        progress,
        exhausted: chosen.segment == last && chosen.param >= 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guidance::path::Waypoint;

    fn straight() -> Path {
        Path::new(vec![Waypoint::new(0.0, 0.0), Waypoint::new(100.0, 0.0)]).unwrap()
    }

    fn cfg(radius: f64) -> PursuitConfig {
        PursuitConfig {
            lookahead_radius: radius,
            ..PursuitConfig::default()
        }
    }

    #[test]
    fn straight_line_target_is_radius_ahead() {
        let t = lookahead_target(&straight(), (0.0, 0.0), &cfg(10.0), PathProgress::default());
        assert!((t.x - 10.0).abs() < 1e-12 && t.y.abs() < 1e-12);
        assert!(!t.exhausted);
    }

    #[test]
    fn falls_back_to_nearest_point() {
        let t = lookahead_target(&straight(), (0.0, 20.0), &cfg(10.0), PathProgress::default());
        assert_eq!((t.x, t.y), (0.0, 0.0));
    }

    #[test]
    fn l_shape_picks_second_segment() {
        let path = Path::new(vec![
            Waypoint::new(0.0, 0.0),
            Waypoint::new(10.0, 0.0),
            Waypoint::new(10.0, 10.0),
        ])
        .unwrap();
        let t = lookahead_target(&path, (9.0, 0.0), &cfg(5.0), PathProgress::default());
        // Dense-sampling oracle: furthest on-circle point along the path.
        let mut oracle = None;
        let n = 1_000_000;
        for seg in 0..2 {
            let (a, b) = path.segment(seg);
            for k in 0..=n {
                let s = k as f64 / n as f64;
                let p = (a.x + s * (b.x - a.x), a.y + s * (b.y - a.y));
                if ((p.0 - 9.0).hypot(p.1) - 5.0).abs() < 1e-5 {
                    oracle = Some((seg, p));
                }
            }
        }
        let (seg, p) = oracle.unwrap();
        assert_eq!(seg, 1);
        assert_eq!(t.at.segment, 1);
        assert!((t.x - p.0).abs() < 1e-4 && (t.y - p.1).abs() < 1e-4);
        assert!((t.y - 24f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn does_not_backtrack() {
        let p = straight();
        let ahead = PathProgress::new(0, 0.5);
        let t = lookahead_target(&p, (0.0, 0.0), &cfg(10.0), ahead);
        assert!(t.progress >= ahead);
        assert!(t.x >= 50.0);
    }

    #[test]
    fn exhausts_near_end() {
        let t = lookahead_target(&straight(), (95.0, 0.5), &cfg(10.0), PathProgress::new(0, 0.9));
        assert!(t.exhausted);
        assert_eq!((t.x, t.y), (100.0, 0.0));
    }
}
