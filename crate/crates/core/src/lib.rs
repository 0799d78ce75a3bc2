//! Finite-difference time-domain solver for the first-order scalar wave
//! system `du/dt = b div v`, `dv/dt = a grad u` in 1D and 2D, with
//! stretched-coordinate perfectly matched layers and the measurement
//! protocols used to check them.
//!
//! ```
//! use pmlwave::config::parse_config;
//!
//! let cfg = parse_config(r#"{
//!     "grid": {"dim": 1, "extent": [4.0], "resolution": 20},
//!     "absorbers": {"x_hi": {"thickness": 0.5}},
//!     "sources": [{"kind": "point", "position": [1.0],
//!                  "waveform": {"gaussian_pulse": {"omega": 6.28, "width": 0.3, "delay": 1.0}}}],
//!     "probes": [{"name": "p", "kind": {"time_series": {"point": [2.0]}}}],
//!     "run": {"duration": {"time": 2.0}}
//! }"#).unwrap();
//! let out = cfg.to_scenario().unwrap().run().unwrap();
//! assert!(out.probe("p").is_some());
//! ```

pub mod analysis;
pub mod config;
pub mod energy;
pub mod error;
pub mod field;
pub mod grid;
pub mod medium;
pub mod pml;
pub mod probe;
pub mod run;
pub mod scenario;
pub mod snapshot;
pub mod source;
pub mod stepper;
pub mod validate;

pub use config::{parse_config, ScenarioConfig};
pub use error::{Error, Result};
pub use field::FieldState;
pub use grid::{build_grid, BoundaryY, Grid, GridSpec};
pub use medium::{cfl_dt, Material, Medium, MediumSpec};
pub use run::{run_scenario, RunManifest};
pub use scenario::{Duration, RunOutput, Scenario, Simulation};
pub use source::{SourceKind, SourceSpec, Waveform};
pub use stepper::step_plain;
