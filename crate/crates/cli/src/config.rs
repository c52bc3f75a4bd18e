//! The TOML run configuration.
//!
//! Every key is optional. Angles are written in degrees here and converted
//! to radians when the scenario is built.

use std::path::{Path as FsPath, PathBuf};

use mecanum_ekf::guidance::{AxisGains, Path, PursuitConfig, Waypoint};
use mecanum_ekf::world_sim::{CameraModel, Field, Landmark, ScenarioConfig, SimClock};
use mecanum_ekf::{NoiseScale, RobotGeometry};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        source: toml::de::Error,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Master seed; per-trial seeds are derived from it.
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Trials per mode; each experiment has its own default when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Warehouse round trips for the `cycle` path.
    pub cycles: usize,
    /// Filter steps for the step-size sweep, seconds.
    pub dts: Vec<f64>,
    /// `"figure7"`, `"cycle"`, or an inline list of waypoints.
    pub path: PathSpec,
    /// Starting heading in degrees; defaults to the first waypoint's heading.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_heading: Option<f64>,
    pub initial_covariance: [f64; 6],
    /// Simulated-time cap per trial, seconds.
    pub time_limit: f64,
    /// Camera-row variance used when no landmark is visible.
    pub no_landmark_variance: f64,
    pub geometry: RobotGeometry,
    /// Noise injected into the simulated robot and sensors.
    pub truth_noise: NoiseScale,
    /// Noise levels the filter assumes.
    pub filter_noise: NoiseScale,
    pub camera: CameraConfig,
    pub field: FieldConfig,
    pub clock: SimClock,
    pub gains: AxisGains,
    pub pursuit: PursuitConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        let base = ScenarioConfig::figure7();
        Self {
            seed: 0,
            output_dir: PathBuf::from("out"),
            trials: None,
            cycles: 5,
            dts: mecanum_ekf::experiments::DEFAULT_SWEEP_DTS.to_vec(),
            path: PathSpec::Named("figure7".into()),
            initial_heading: None,
            initial_covariance: base.initial_covariance,
            time_limit: base.time_limit,
            no_landmark_variance: base.no_landmark_variance,
            geometry: base.geometry,
            truth_noise: base.truth_noise,
            filter_noise: base.filter_noise,
            camera: CameraConfig::default(),
            field: FieldConfig::default(),
            clock: base.clock,
            gains: base.gains,
            pursuit: base.pursuit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PathSpec {
    Named(String),
    Waypoints(Vec<WaypointConfig>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaypointConfig {
    pub x: f64,
    pub y: f64,
    /// Heading to hold on the segment ending here, degrees.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heading: Option<f64>,
    #[serde(default)]
    pub stop: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CameraConfig {
    /// Full horizontal field of view, degrees.
    pub fov: f64,
    pub mount_heading_offset: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_range: Option<f64>,
    pub edge_margin: f64,
}

impl Default for CameraConfig {
    fn default() -> Self {
        let c = CameraModel::default();
        Self {
            fov: c.fov.to_degrees().round(),
            mount_heading_offset: c.mount_heading_offset.to_degrees(),
            max_range: c.max_range,
            edge_margin: c.edge_margin.to_degrees().round(),
        }
    }
}

impl From<CameraConfig> for CameraModel {
    fn from(c: CameraConfig) -> Self {
        CameraModel {
            fov: c.fov.to_radians(),
            mount_heading_offset: c.mount_heading_offset.to_radians(),
            max_range: c.max_range,
            edge_margin: c.edge_margin.to_radians(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldConfig {
    pub width: f64,
    pub height: f64,
    /// `"auto"` (pick by path), `"default"` (top and bottom walls),
    /// `"cycle"` (left and bottom walls), or `"none"`. Ignored when
    /// `landmarks` is given.
    pub layout: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub landmarks: Option<Vec<LandmarkConfig>>,
}

impl Default for FieldConfig {
    fn default() -> Self {
        let f = Field::default();
        Self {
            width: f.width,
            height: f.height,
            layout: "auto".into(),
            landmarks: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandmarkConfig {
    pub id: u32,
    pub x: f64,
    pub y: f64,
    /// Direction the image faces into the field, degrees.
    pub facing: f64,
}

impl RunConfig {
    /// Reads, parses, and validates a configuration file.
    pub fn load(path: &FsPath) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            ConfigError::Parse { source, .. } => ConfigError::Parse {
                path: path.to_owned(),
                source,
            },
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let config: RunConfig = toml::from_str(text).map_err(|source| ConfigError::Parse {
            path: PathBuf::from("<config>"),
            source,
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.cycles == 0 {
            return Err(ConfigError::Invalid("cycles must be at least 1".into()));
        }
        if self.trials == Some(0) {
            return Err(ConfigError::Invalid("trials must be at least 1".into()));
        }
        if self.dts.is_empty() {
            return Err(ConfigError::Invalid("dts must list at least one filter step".into()));
        }
        for &dt in &self.dts {
            SimClock {
                filter_dt: dt,
                ..self.clock
            }
            .substeps_per_filter_step()
            .map_err(|e| ConfigError::Invalid(format!("dts: {e}")))?;
        }
        self.scenario()?;
        Ok(())
    }

    fn path_name(&self) -> Option<&str> {
        match &self.path {
            PathSpec::Named(name) => Some(name),
            PathSpec::Waypoints(_) => None,
        }
    }

    fn path(&self) -> Result<Path, ConfigError> {
        match &self.path {
            PathSpec::Named(name) if name == "cycle" => Ok(Path::cycles(self.cycles)),
            PathSpec::Named(name) => Path::named(name)
                .ok_or_else(|| ConfigError::Invalid(format!("path: unknown path `{name}` (expected figure7 or cycle)"))),
            PathSpec::Waypoints(list) => {
                let waypoints = list
                    .iter()
                    .map(|w| Waypoint {
                        x: w.x,
                        y: w.y,
                        heading: w.heading.map(f64::to_radians),
                        stop: w.stop,
                    })
                    .collect();
                Path::new(waypoints).map_err(|e| ConfigError::Invalid(format!("path: {e}")))
            }
        }
    }

    fn field(&self) -> Result<Field, ConfigError> {
        let mut field = match &self.field.landmarks {
            Some(list) => Field {
                width: self.field.width,
                height: self.field.height,
                landmarks: list
                    .iter()
                    .map(|l| Landmark {
                        id: l.id,
                        x: l.x,
                        y: l.y,
                        facing: l.facing.to_radians(),
                    })
                    .collect(),
            },
            None => match (self.field.layout.as_str(), self.path_name()) {
                ("auto", Some("cycle")) | ("cycle", _) => Field::cycle_layout(),
                ("auto", _) | ("default", _) => Field::default(),
                ("none", _) => Field::default().without_landmarks(),
                (other, _) => {
                    return Err(ConfigError::Invalid(format!(
                        "field.layout: unknown layout `{other}` (expected auto, default, cycle, or none)"
                    )))
                }
            },
        };
        field.width = self.field.width;
        field.height = self.field.height;
        Ok(field)
    }

    /// The simulator scenario described by this configuration.
    pub fn scenario(&self) -> Result<ScenarioConfig, ConfigError> {
        let scenario = ScenarioConfig {
            geometry: self.geometry,
            truth_noise: self.truth_noise,
            filter_noise: self.filter_noise,
            no_landmark_variance: self.no_landmark_variance,
            camera: self.camera.into(),
            field: self.field()?,
            clock: self.clock,
            path: self.path()?,
            initial_heading: self.initial_heading.map(f64::to_radians),
            initial_covariance: self.initial_covariance,
            gains: self.gains,
            pursuit: self.pursuit,
            time_limit: self.time_limit,
        };
        scenario.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(scenario)
    }

    /// The configuration as TOML, with every default written out.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration always serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let config = RunConfig::parse("").unwrap();
        assert_eq!(config, RunConfig::default());
        let scenario = config.scenario().unwrap();
        assert_eq!((scenario.field.width, scenario.field.height), (144.0, 144.0));
        assert!((scenario.camera.fov - 70f64.to_radians()).abs() < 1e-15);
        assert_eq!((scenario.clock.truth_dt, scenario.clock.filter_dt), (0.001, 0.01));
        assert_eq!(scenario.truth_noise, NoiseScale::uniform(1.0));
        assert_eq!(scenario.field, Field::default());
    }

    #[test]
    fn wide_fov_rejected() {
        let err = RunConfig::parse("[camera]\nfov = 200\n").unwrap_err();
        assert!(err.to_string().contains("fov must be in (0, 180)"), "{err}");
    }

    #[test]
    fn clock_must_divide() {
        let err = RunConfig::parse("[clock]\nfilter_dt = 0.015\ntruth_dt = 0.01\n").unwrap_err();
        assert!(err.to_string().contains("filter_dt must be an integer multiple"), "{err}");
    }

    #[test]
    fn unknown_key_reports_location() {
        let err = RunConfig::parse("seed = 1\n\n[camera]\nfov_deg = 60\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("fov_deg") && msg.contains("line 4"), "{msg}");
    }

    #[test]
    fn echo_round_trips() {
        let text = "seed = 9\npath = \"cycle\"\ncycles = 2\n[camera]\nfov = 60\n[gains.x]\np = 3.0\n";
        let config = RunConfig::parse(text).unwrap();
        let again = RunConfig::parse(&config.to_toml()).unwrap();
        assert_eq!(config, again);
        assert_eq!(again.scenario().unwrap(), config.scenario().unwrap());
    }

    #[test]
    fn cycle_path_picks_cycle_layout() {
        let config = RunConfig::parse("path = \"cycle\"\ncycles = 3\n").unwrap();
        let scenario = config.scenario().unwrap();
        assert_eq!(scenario.field, Field::cycle_layout());
        assert_eq!(scenario.path, Path::cycles(3));
    }

    #[test]
    fn inline_waypoints() {
        let text = "path = [{ x = 10, y = 10 }, { x = 50, y = 10, heading = 90 }]\n[field]\nlayout = \"none\"\n";
        let scenario = RunConfig::parse(text).unwrap().scenario().unwrap();
        assert_eq!(scenario.path.waypoints().len(), 2);
        assert_eq!(scenario.path.end().heading, Some(90f64.to_radians()));
        assert!(scenario.field.landmarks.is_empty());
    }

    #[test]
    fn unknown_path_name_rejected() {
        let err = RunConfig::parse("path = \"spiral\"\n").unwrap_err();
        assert!(err.to_string().contains("unknown path"), "{err}");
    }
}
