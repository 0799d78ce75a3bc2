//! Measurement protocols: reference-run reflection, decay-rate fits and
//! parameter sweeps.

mod fit;
mod reflection;
mod sweep;

pub use fit::{fit_decay_rate, fit_through_origin, linear_fit, DecayFit, MIN_FIT_SAMPLES};
pub use reflection::{compare_traces, measure_reflection, ReflectionResult, ReflectionSetup};
pub use sweep::{
    angle_sweep, cone_angle_bound, cone_angle_limit, layer_decay_fit, layer_decay_from_data,
    resolution_convergence, snap_angle, sweep_csv, LayerDecay, SweepMeasure, SweepPoint,
    SweepVariable, INNER_SPAN,
};
