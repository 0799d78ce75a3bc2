//! Strict JSON scenario configuration.
//!
//! ```json
//! {
//!   "grid": {"dim": 1, "extent": [6.0], "resolution": 20},
//!   "medium": {"uniform": {"a": 1.0, "b": 1.0}},
//!   "absorbers": {"x_hi": {"thickness": 0.5, "degree": 2, "r_target": 1e-6}},
//!   "sources": [{"kind": "point", "position": [1.5],
//!                "waveform": {"gaussian_pulse": {"omega": 6.283, "width": 0.5, "delay": 3.0}}}],
//!   "probes": [{"name": "p", "kind": {"time_series": {"point": [3.0]}}}],
//!   "run": {"duration": {"time": 13.0}},
//!   "outputs": {"directory": "out"}
//! }
//! ```
//!
//! Unknown keys anywhere are rejected.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::GridSpec;
use crate::medium::MediumSpec;
use crate::pml::{sigma_max_for_round_trip, AbsorberMode, AbsorberSide, PmlSpec, Side};
use crate::probe::ProbeSpec;
use crate::scenario::{Duration, Scenario, Simulation};
use crate::snapshot::SnapshotFormat;
use crate::source::SourceSpec;

pub const DEFAULT_SAFETY: f64 = 0.5;
pub const DEFAULT_DEGREE: u32 = 2;
pub const DEFAULT_R_TARGET: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("malformed JSON: {0}")]
    Syntax(String),
    #[error("unknown key `{key}`: {message}")]
    UnknownKey { key: String, message: String },
    #[error("missing required field `{field}`: {message}")]
    MissingField { field: String, message: String },
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub grid: GridSpec,
    #[serde(default)]
    pub medium: MediumSpec,
    #[serde(default)]
    pub absorbers: AbsorbersConfig,
    #[serde(default)]
    pub sources: Vec<SourceSpec>,
    #[serde(default)]
    pub probes: Vec<ProbeSpec>,
    pub run: RunConfig,
    #[serde(default)]
    pub outputs: OutputsConfig,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbsorbersConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_lo: Option<AbsorberConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_hi: Option<AbsorberConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_lo: Option<AbsorberConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_hi: Option<AbsorberConfig>,
}

impl AbsorbersConfig {
    pub fn get_mut(&mut self, side: Side) -> &mut Option<AbsorberConfig> {
        match side {
            Side::XLo => &mut self.x_lo,
            Side::XHi => &mut self.x_hi,
            Side::YLo => &mut self.y_lo,
            Side::YHi => &mut self.y_hi,
        }
    }

    fn iter(&self) -> impl Iterator<Item = (Side, &AbsorberConfig)> {
        [
            (Side::XLo, &self.x_lo),
            (Side::XHi, &self.x_hi),
            (Side::YLo, &self.y_lo),
            (Side::YHi, &self.y_hi),
        ]
        .into_iter()
        .filter_map(|(s, a)| a.as_ref().map(|a| (s, a)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AbsorberConfig {
    #[serde(default)]
    pub mode: AbsorberMode,
    pub thickness: f64,
    #[serde(default = "default_degree")]
    pub degree: u32,
    /// Round-trip amplitude at normal incidence; exclusive with `sigma_max`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_target: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_max: Option<f64>,
    #[serde(default = "default_kappa")]
    pub kappa_max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DurationConfig {
    Time(f64),
    Steps(u64),
    /// Periods of the first source's carrier.
    Periods(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub duration: DurationConfig,
    #[serde(default = "default_safety")]
    pub safety: f64,
    /// Field snapshot every N steps; 0 disables snapshots.
    #[serde(default)]
    pub snapshot_stride: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsConfig {
    #[serde(default = "default_directory")]
    pub directory: String,
    #[serde(default = "default_true")]
    pub probes: bool,
    #[serde(default)]
    pub snapshot_format: SnapshotFormat,
    /// Also write the sampled sigma/kappa arrays.
    #[serde(default)]
    pub profile: bool,
}

impl Default for OutputsConfig {
    fn default() -> Self {
        OutputsConfig {
            directory: default_directory(),
            probes: true,
            snapshot_format: SnapshotFormat::default(),
            profile: false,
        }
    }
}

fn default_degree() -> u32 {
    DEFAULT_DEGREE
}
fn default_kappa() -> f64 {
    1.0
}
fn default_safety() -> f64 {
    DEFAULT_SAFETY
}
fn default_directory() -> String {
    "out".into()
}
fn default_true() -> bool {
    true
}

/// Text between the first pair of backticks in a serde message.
fn quoted(msg: &str) -> String {
    msg.split('`').nth(1).unwrap_or_default().to_string()
}

fn classify(err: serde_json::Error) -> ConfigError {
    use serde_json::error::Category;
    let msg = err.to_string();
    match err.classify() {
        Category::Syntax | Category::Eof | Category::Io => ConfigError::Syntax(msg),
        Category::Data => {
            if msg.starts_with("unknown field") || msg.starts_with("unknown variant") {
                ConfigError::UnknownKey {
                    key: quoted(&msg),
                    message: msg,
                }
            } else if msg.starts_with("missing field") {
                ConfigError::MissingField {
                    field: quoted(&msg),
                    message: msg,
                }
            } else {
                ConfigError::Schema(msg)
            }
        }
    }
}

/// Parses and validates a configuration, filling documented defaults.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut cfg: ScenarioConfig = serde_json::from_str(text).map_err(classify)?;
    cfg.apply_defaults()?;
    cfg.validate()?;
    Ok(cfg)
}

impl ScenarioConfig {
    fn apply_defaults(&mut self) -> Result<(), ConfigError> {
        for side in Side::ALL {
            if let Some(a) = self.absorbers.get_mut(side) {
                match (a.r_target, a.sigma_max) {
                    (Some(_), Some(_)) => {
                        return Err(ConfigError::Invalid(format!(
                            "absorber {}: give either r_target or sigma_max, not both",
                            side.name()
                        )))
                    }
                    (None, None) => a.r_target = Some(DEFAULT_R_TARGET),
                    _ => {}
                }
            }
        }
        Ok(())
    }

    /// Checks every invariant by building the simulation once.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let scenario = self.to_scenario()?;
        Simulation::new(&scenario).map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Resolves design targets into concrete coefficients.
    pub fn to_scenario(&self) -> Result<Scenario, ConfigError> {
        let c = self.medium.c_max();
        if !(c > 0.0 && c.is_finite()) {
            return Err(ConfigError::Invalid(
                "medium must have a positive speed".into(),
            ));
        }
        let mut absorbers = PmlSpec::default();
        for (side, a) in self.absorbers.iter() {
            let sigma_max = match (a.r_target, a.sigma_max) {
                (_, Some(s)) => s,
                (Some(r), None) if a.thickness > 0.0 => {
                    sigma_max_for_round_trip(r, a.thickness, a.degree, c).map_err(|e| {
                        ConfigError::Invalid(format!("absorber {}: {e}", side.name()))
                    })?
                }
                _ => 0.0,
            };
            *absorbers.get_mut(side) = Some(AbsorberSide {
                thickness: a.thickness,
                degree: a.degree,
                sigma_max,
                kappa_max: a.kappa_max,
                mode: a.mode,
            });
        }
        let duration = match self.run.duration {
            DurationConfig::Time(t) => Duration::Time(t),
            DurationConfig::Steps(n) => Duration::Steps(n),
            DurationConfig::Periods(n) => {
                let omega = self
                    .sources
                    .first()
                    .map(|s| s.waveform.omega())
                    .ok_or_else(|| {
                        ConfigError::Invalid("duration in periods needs a source".into())
                    })?;
                Duration::Time(n * 2.0 * PI / omega)
            }
        };
        let mut names: Vec<&str> = self.probes.iter().map(|p| p.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(ConfigError::Invalid("probe names must be unique".into()));
        }
        if names
            .iter()
            .any(|n| n.is_empty() || n.contains(['/', '\\']) || *n == "manifest")
        {
            return Err(ConfigError::Invalid(
                "probe names must be plain file stems".into(),
            ));
        }
        Ok(Scenario {
            grid: self.grid.clone(),
            medium: self.medium.clone(),
            absorbers,
            sources: self.sources.clone(),
            probes: self.probes.clone(),
            duration,
            safety: self.run.safety,
        })
    }

    /// Sets a dotted key (`absorbers.x_hi.degree`, `sources.0.amplitude`)
    /// to a JSON value and revalidates. Setting `sigma_max` drops a
    /// `r_target` on the same absorber and vice versa.
    pub fn with_override(&self, key: &str, value: serde_json::Value) -> Result<Self, ConfigError> {
        let mut tree = serde_json::to_value(self).expect("config serializes");
        let mut node = &mut tree;
        let parts: Vec<&str> = key.split('.').collect();
        for (n, part) in parts.iter().enumerate() {
            let last = n + 1 == parts.len();
            node = match node {
                serde_json::Value::Object(map) => {
                    if last {
                        match *part {
                            "sigma_max" => map.remove("r_target"),
                            "r_target" => map.remove("sigma_max"),
                            _ => None,
                        };
                        map.insert(part.to_string(), value);
                        break;
                    }
                    map.entry(part.to_string())
                        .or_insert_with(|| serde_json::Value::Object(Default::default()))
                }
                serde_json::Value::Array(items) => {
                    let idx: usize = part.parse().map_err(|_| ConfigError::UnknownKey {
                        key: key.into(),
                        message: format!("`{part}` is not an index"),
                    })?;
                    let len = items.len();
                    let slot = items.get_mut(idx).ok_or_else(|| ConfigError::UnknownKey {
                        key: key.into(),
                        message: format!("index {idx} out of range ({len} entries)"),
                    })?;
                    if last {
                        *slot = value;
                        break;
                    }
                    slot
                }
                _ => {
                    return Err(ConfigError::UnknownKey {
                        key: key.into(),
                        message: format!("`{part}` does not name a field"),
                    })
                }
            };
        }
        let mut cfg: ScenarioConfig = serde_json::from_value(tree).map_err(classify)?;
        cfg.apply_defaults()?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "grid": {"dim": 1, "extent": [4.0], "resolution": 20},
        "sources": [{"kind": "point", "position": [1.0],
                     "waveform": {"gaussian_pulse": {"omega": 6.0, "width": 0.5, "delay": 2.0}}}],
        "probes": [{"name": "p", "kind": {"time_series": {"point": [2.0]}}}],
        "absorbers": {"x_hi": {"thickness": 0.5}},
        "run": {"duration": {"time": 1.0}}
    }"#;

    #[test]
    fn defaults_filled() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.run.safety, 0.5);
        let a = cfg.absorbers.x_hi.as_ref().unwrap();
        assert_eq!(a.degree, 2);
        assert_eq!(a.r_target, Some(1e-6));
        assert_eq!(a.kappa_max, 1.0);
        assert_eq!(a.mode, AbsorberMode::Pml);
        assert_eq!(cfg.grid.boundary_y, crate::grid::BoundaryY::HardWall);
        assert_eq!(cfg.medium, MediumSpec::Uniform { a: 1.0, b: 1.0 });
    }

    #[test]
    fn unknown_key_is_named() {
        let text = MINIMAL.replace("\"thickness\": 0.5", "\"thickness\": 0.5, \"sgima_max\": 3");
        match parse_config(&text) {
            Err(ConfigError::UnknownKey { key, .. }) => assert_eq!(key, "sgima_max"),
            other => panic!("expected unknown key error, got {other:?}"),
        }
    }

    #[test]
    fn error_categories_are_distinct() {
        assert!(matches!(parse_config("{"), Err(ConfigError::Syntax(_))));
        let no_run = MINIMAL.replace(r#""run": {"duration": {"time": 1.0}}"#, r#""outputs": {}"#);
        match parse_config(&no_run) {
            Err(ConfigError::MissingField { field, .. }) => assert_eq!(field, "run"),
            other => panic!("expected missing field, got {other:?}"),
        }
        let inside = MINIMAL.replace("\"position\": [1.0]", "\"position\": [3.9]");
        assert!(matches!(
            parse_config(&inside),
            Err(ConfigError::Invalid(_))
        ));
        let both = MINIMAL.replace(
            "\"thickness\": 0.5",
            "\"thickness\": 0.5, \"sigma_max\": 3, \"r_target\": 0.1",
        );
        assert!(matches!(parse_config(&both), Err(ConfigError::Invalid(_))));
        let wrong_type = MINIMAL.replace("\"resolution\": 20", "\"resolution\": \"fine\"");
        assert!(matches!(
            parse_config(&wrong_type),
            Err(ConfigError::Schema(_))
        ));
    }

    #[test]
    fn round_trip_is_identical() {
        let cfg = parse_config(MINIMAL).unwrap();
        let again = parse_config(&cfg.to_json()).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn periods_resolve_against_first_source() {
        let text = MINIMAL.replace(r#"{"time": 1.0}"#, r#"{"periods": 3}"#);
        let s = parse_config(&text).unwrap().to_scenario().unwrap();
        assert_eq!(s.duration, Duration::Time(3.0 * 2.0 * PI / 6.0));
    }

    #[test]
    fn r_target_resolves_sigma() {
        let s = parse_config(MINIMAL).unwrap().to_scenario().unwrap();
        let a = s.absorbers.x_hi.unwrap();
        assert!((a.sigma_max - 3.0 * 6.0 * 10f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn dotted_override() {
        let cfg = parse_config(MINIMAL).unwrap();
        let cfg2 = cfg
            .with_override("absorbers.x_hi.degree", serde_json::json!(3))
            .unwrap();
        assert_eq!(cfg2.absorbers.x_hi.unwrap().degree, 3);
        let cfg3 = cfg
            .with_override("sources.0.amplitude", serde_json::json!(2.0))
            .unwrap();
        assert_eq!(cfg3.sources[0].amplitude, 2.0);
        assert!(matches!(
            cfg.with_override("absorbers.x_hi.sgima", serde_json::json!(1)),
            Err(ConfigError::UnknownKey { .. })
        ));
    }

    #[test]
    fn overriding_sigma_replaces_r_target() {
        let cfg = parse_config(MINIMAL).unwrap();
        let s = cfg
            .with_override("absorbers.x_hi.sigma_max", serde_json::json!(7.0))
            .unwrap();
        let a = s.absorbers.x_hi.clone().unwrap();
        assert_eq!((a.sigma_max, a.r_target), (Some(7.0), None));
        let r = s
            .with_override("absorbers.x_hi.r_target", serde_json::json!(0.01))
            .unwrap();
        let a = r.absorbers.x_hi.unwrap();
        assert_eq!((a.sigma_max, a.r_target), (None, Some(0.01)));
    }
}
