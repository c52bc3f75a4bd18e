use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::GuidanceError;

/// Minimum separation between consecutive waypoints, in inches.
pub const MIN_WAYPOINT_SEPARATION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Waypoint {
    pub x: f64,
    pub y: f64,
    /// Heading to hold while driving the segment that ends here (radians).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heading: Option<f64>,
    /// The robot must arrive here before pursuing the rest of the path.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub stop: bool,
}

impl Waypoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self {
            x,
            y,
            heading: None,
            stop: false,
        }
    }

    pub fn with_heading(mut self, heading: f64) -> Self {
        self.heading = Some(heading);
        self
    }

    pub fn stopping(mut self) -> Self {
        self.stop = true;
        self
    }
}

/// Ordered polyline the robot follows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Waypoint>", into = "Vec<Waypoint>")]
pub struct Path {
    waypoints: Vec<Waypoint>,
}

impl TryFrom<Vec<Waypoint>> for Path {
    type Error = GuidanceError;

    fn try_from(waypoints: Vec<Waypoint>) -> Result<Self, Self::Error> {
        Path::new(waypoints)
    }
}

impl From<Path> for Vec<Waypoint> {
    fn from(path: Path) -> Self {
        path.waypoints
    }
}

impl Path {
    pub fn new(waypoints: Vec<Waypoint>) -> Result<Self, GuidanceError> {
        if waypoints.len() < 2 {
            return Err(GuidanceError::TooFewWaypoints(waypoints.len()));
        }
        for (index, w) in waypoints.iter().enumerate() {
            if !(w.x.is_finite() && w.y.is_finite() && w.heading.is_none_or(f64::is_finite)) {
                return Err(GuidanceError::NonFiniteWaypoint { index });
            }
        }
        for (index, pair) in waypoints.windows(2).enumerate() {
            let sep = (pair[1].x - pair[0].x).hypot(pair[1].y - pair[0].y);
            if sep <= MIN_WAYPOINT_SEPARATION {
                return Err(GuidanceError::CoincidentWaypoints { index: index + 1 });
            }
        }
        Ok(Self { waypoints })
    }

    pub fn waypoints(&self) -> &[Waypoint] {
        &self.waypoints
    }

    pub fn segment_count(&self) -> usize {
        self.waypoints.len() - 1
    }

    pub fn start(&self) -> &Waypoint {
        &self.waypoints[0]
    }

    pub fn end(&self) -> &Waypoint {
        &self.waypoints[self.waypoints.len() - 1]
    }

    pub fn segment(&self, index: usize) -> (&Waypoint, &Waypoint) {
        (&self.waypoints[index], &self.waypoints[index + 1])
    }

    pub fn segment_length(&self, index: usize) -> f64 {
        let (a, b) = self.segment(index);
        (b.x - a.x).hypot(b.y - a.y)
    }

    pub fn length(&self) -> f64 {
        (0..self.segment_count()).map(|i| self.segment_length(i)).sum()
    }

    /// Heading to hold while on `segment`: the most recent heading set at or
    /// before the segment's end waypoint, if any.
    pub fn heading_for_segment(&self, segment: usize) -> Option<f64> {
        let last = (segment + 1).min(self.waypoints.len() - 1);
        self.waypoints[..=last].iter().rev().find_map(|w| w.heading)
    }

    /// Splits the path into legs that each end at a stop waypoint. The final
    /// waypoint always ends a leg. A leg inherits the heading in force where
    /// the previous leg ended.
    pub fn legs(&self) -> Vec<Path> {
        let mut legs = Vec::new();
        let mut start = 0;
        for (i, w) in self.waypoints.iter().enumerate().skip(1) {
            if w.stop || i == self.waypoints.len() - 1 {
                let mut leg: Vec<Waypoint> = self.waypoints[start..=i].to_vec();
                if leg[0].heading.is_none() && start > 0 {
                    leg[0].heading = self.heading_for_segment(start - 1);
                }
                leg[0].stop = false;
                legs.push(Path { waypoints: leg });
                start = i;
            }
        }
        legs
    }

    /// Appends `other` after this path, dropping its first waypoint when it
    /// coincides with this path's end.
    pub fn concat(&self, other: &Path) -> Path {
        let mut waypoints = self.waypoints.clone();
        let end = self.end();
        let first = other.start();
        let skip = usize::from((first.x - end.x).hypot(first.y - end.y) <= MIN_WAYPOINT_SEPARATION);
        waypoints.extend(other.waypoints.iter().skip(skip).copied());
        Path { waypoints }
    }

    /// Reconstruction of the localization test course: starts at (0, 0) and
    /// ends at (75, 2) relative to its start, with straight runs, left and
    /// right turns, and elliptical arcs. Placed at (22, 78) on the field.
    /// Heading targets alternate between facing the top wall, facing along
    /// +x (no landmarks in view), and facing the bottom wall.
    pub fn figure7() -> Path {
        const ORIGIN: (f64, f64) = (22.0, 78.0);
        let up = FRAC_PI_2;
        let down = -FRAC_PI_2;
        let mut rel: Vec<(f64, f64, f64)> = vec![(0.0, 0.0, up), (0.0, 36.0, up), (40.0, 36.0, up)];
        // Upper elliptical arc from (40, 36) over the top to (100, 36).
        rel.extend(ellipse_arc((70.0, 36.0), 30.0, 18.0, PI, 0.0, 12).skip(1).map(|(x, y)| (x, y, 0.0)));
        rel.push((100.0, -24.0, down));
        // Quarter ellipse bending west to (80, -40).
        rel.extend(ellipse_arc((80.0, -24.0), 20.0, 16.0, 0.0, -FRAC_PI_2, 6).skip(1).map(|(x, y)| (x, y, down)));
        rel.extend([(60.0, -40.0, down), (60.0, -16.0, up), (75.0, -16.0, up), (75.0, 2.0, up)]);
        let waypoints = rel
            .into_iter()
            .map(|(x, y, h)| Waypoint::new(ORIGIN.0 + x, ORIGIN.1 + y).with_heading(h))
            .collect();
        Path::new(waypoints).expect("figure7 course is well formed")
    }

    /// One warehouse → shipping hub → warehouse round trip, stopping at the
    /// hub and at the warehouse. Heading is held facing the lower-left corner
    /// so the left and bottom wall images can come into view.
    pub fn cycle() -> Path {
        let heading = -3.0 * PI / 4.0;
        let out = [(20.0, 124.0), (20.0, 100.0), (46.0, 92.0), (60.0, 80.0)];
        let mut waypoints: Vec<Waypoint> = out.iter().map(|&(x, y)| Waypoint::new(x, y).with_heading(heading)).collect();
        waypoints.last_mut().expect("non-empty").stop = true;
        waypoints.extend(
            out.iter()
                .rev()
                .skip(1)
                .map(|&(x, y)| Waypoint::new(x, y).with_heading(heading)),
        );
        waypoints.last_mut().expect("non-empty").stop = true;
        Path::new(waypoints).expect("cycle course is well formed")
    }

    /// `count` back-to-back copies of [`Path::cycle`].
    pub fn cycles(count: usize) -> Path {
        let one = Path::cycle();
        (1..count.max(1)).fold(one.clone(), |acc, _| acc.concat(&one))
    }

    pub fn named(name: &str) -> Option<Path> {
        match name {
            "figure7" => Some(Path::figure7()),
            "cycle" => Some(Path::cycle()),
            _ => None,
        }
    }
}

/// Points on an axis-aligned ellipse from angle `from` to `to`, inclusive,
/// in `steps` equal increments.
fn ellipse_arc(
    center: (f64, f64),
    semi_x: f64,
    semi_y: f64,
    from: f64,
    to: f64,
    steps: usize,
) -> impl Iterator<Item = (f64, f64)> {
    (0..=steps).map(move |i| {
        let a = from + (to - from) * i as f64 / steps as f64;
        (center.0 + semi_x * a.cos(), center.1 + semi_y * a.sin())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_paths() {
        assert_eq!(
            Path::new(vec![Waypoint::new(0.0, 0.0)]),
            Err(GuidanceError::TooFewWaypoints(1))
        );
        assert_eq!(
            Path::new(vec![Waypoint::new(1.0, 1.0), Waypoint::new(1.0, 1.0)]),
            Err(GuidanceError::CoincidentWaypoints { index: 1 })
        );
    }

    #[test]
    fn figure7_endpoints_and_extent() {
        let p = Path::figure7();
        let (s, e) = (p.start(), p.end());
        assert!(((e.x - s.x) - 75.0).abs() < 1e-12);
        assert!(((e.y - s.y) - 2.0).abs() < 1e-12);
        for w in p.waypoints() {
            assert!(w.x > 0.0 && w.x < 144.0 && w.y > 0.0 && w.y < 144.0);
        }
    }

    #[test]
    fn figure7_far_segments_stay_clear_of_each_other() {
        // Pure pursuit picks the furthest intersection, so non-neighbouring
        // parts of the course must not come within two lookahead radii.
        let p = Path::figure7();
        let mut pts: Vec<(f64, f64, f64)> = Vec::new();
        let mut walked = 0.0;
        for s in 0..p.segment_count() {
            let (a, b) = p.segment(s);
            let len = p.segment_length(s);
            for k in 0..=20 {
                let t = k as f64 / 20.0;
                pts.push((walked + t * len, a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
            }
            walked += len;
        }
        for &(s1, x1, y1) in &pts {
            for &(s2, x2, y2) in &pts {
                if (s2 - s1).abs() > 80.0 {
                    assert!((x1 - x2).hypot(y1 - y2) > 24.0, "points at {s1:.1} and {s2:.1} in too close");
                }
            }
        }
    }

    #[test]
    fn cycle_legs_split_at_stops() {
        let p = Path::cycles(3);
        let legs = p.legs();
        assert_eq!(legs.len(), 6);
        for leg in &legs {
            assert!(leg.start().heading.is_some());
        }
        assert_eq!(legs[0].end().x, 60.0);
        assert_eq!(legs[1].end().x, 20.0);
        assert_eq!(legs[5].end().y, 124.0);
    }

    #[test]
    fn heading_lookup_carries_forward() {
        let p = Path::new(vec![
            Waypoint::new(0.0, 0.0).with_heading(1.0),
            Waypoint::new(1.0, 0.0),
            Waypoint::new(2.0, 0.0).with_heading(2.0),
            Waypoint::new(3.0, 0.0),
        ])
        .unwrap();
        assert_eq!(p.heading_for_segment(0), Some(1.0));
        assert_eq!(p.heading_for_segment(1), Some(2.0));
        assert_eq!(p.heading_for_segment(2), Some(2.0));
    }
}
