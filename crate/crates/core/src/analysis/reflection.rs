use serde::Serialize;

use crate::error::{Error, Result};
use crate::pml::Side;
use crate::probe::{ProbeData, ProbeSpec};
use crate::scenario::{Duration, Scenario, Simulation};
use crate::source::Waveform;

const PROBE_NAME: &str = "reflection_probe";

/// Gaussian widths after the delay at which a pulse counts as passed.
const PULSE_TAIL_WIDTHS: f64 = 4.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReflectionResult {
    /// `max |u_test - u_ref|` over the window divided by `max |u_ref|`.
    pub r: f64,
    pub probe: Vec<f64>,
    /// `[t1, t2]`
    pub window: (f64, f64),
    pub reference_extent: Vec<f64>,
    pub reference_lower: Vec<f64>,
    /// Earliest time a signal from the reference's outer wall can reach the
    /// probe; always greater than `window.1`.
    pub reference_echo_time: f64,
    pub incident_peak: f64,
    pub reflected_peak: f64,
}

/// Test and reference scenarios of one reflection measurement.
#[derive(Clone, Debug)]
pub struct ReflectionSetup {
    pub test: Scenario,
    pub reference: Scenario,
    pub probe: Vec<f64>,
    pub window: (f64, f64),
    pub reference_echo_time: f64,
}

fn axis(side: Side) -> usize {
    if side.is_x() {
        0
    } else {
        1
    }
}

impl ReflectionSetup {
    /// Builds the reference by removing the absorber on `side` and padding
    /// the domain there by `pad_factor * c_max * T / 2`, rounded up to whole
    /// cells.
    pub fn new(scenario: &Scenario, probe: &[f64], side: Side, pad_factor: f64) -> Result<Self> {
        if !(pad_factor > 0.0 && pad_factor.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "pad_factor must be > 0, got {pad_factor}"
            )));
        }
        let dim = scenario.grid.dim;
        if probe.len() != dim {
            return Err(Error::InvalidProbe(format!(
                "probe needs {dim} coordinates"
            )));
        }
        if dim == 1 && !side.is_x() {
            return Err(Error::InvalidArgument("1D grids have no y sides".into()));
        }
        let mut test = scenario.clone();
        test.probes = vec![ProbeSpec::time_series(PROBE_NAME, probe.to_vec())];

        let sim = Simulation::new(&test)?;
        let grid = &sim.grid;
        let y = if dim == 2 { probe[1] } else { 0.0 };
        if test.absorbers.contains(grid, probe[0], y) {
            return Err(Error::InvalidProbe("probe lies inside an absorber".into()));
        }
        let t_total = sim.total_steps as f64 * sim.dt;
        test.duration = Duration::Steps(sim.total_steps);
        let c_max = sim.medium.c_max(grid);

        let pulses: Vec<(&[f64], f64, f64)> = test
            .sources
            .iter()
            .filter(|s| s.amplitude != 0.0)
            .map(|s| match s.waveform {
                Waveform::GaussianPulse { width, delay, .. } => {
                    Ok((s.position.as_slice(), width, delay))
                }
                Waveform::ContinuousWave { .. } => Err(Error::Measurement(
                    "reflection measurement needs pulsed sources".into(),
                )),
            })
            .collect::<Result<_>>()?;
        if pulses.is_empty() {
            return Err(Error::Measurement("scenario has no active source".into()));
        }

        let ax = axis(side);
        let cell = if ax == 0 { grid.dx } else { grid.dy };
        let pad_cells = (pad_factor * c_max * t_total / 2.0 / cell).ceil().max(1.0);
        let pad = pad_cells * cell;

        let mut reference = test.clone();
        *reference.absorbers.get_mut(side) = None;
        let mut lower = vec![grid.x_min];
        if dim == 2 {
            lower.push(grid.y_min);
        }
        let n_axis = if ax == 0 { grid.nx } else { grid.ny };
        reference.grid.extent[ax] = (n_axis as f64 + pad_cells) * cell;
        if matches!(side, Side::XLo | Side::YLo) {
            lower[ax] -= pad;
        }
        reference.grid.lower = Some(lower.clone());

        let wall = match side {
            Side::XLo | Side::YLo => lower[ax],
            Side::XHi => grid.x_max() + pad,
            Side::YHi => grid.y_max() + pad,
        };
        let mut t1: f64 = 0.0;
        let mut echo = f64::INFINITY;
        for &(pos, width, delay) in &pulses {
            let direct = pos
                .iter()
                .zip(probe)
                .map(|(a, b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt();
            t1 = t1.max(delay + PULSE_TAIL_WIDTHS * width + direct / c_max);
            let path = (wall - pos[ax]).abs() + (wall - probe[ax]).abs();
            echo = echo.min(path / c_max);
        }
        let t2 = t_total;
        if t1 >= t2 {
            return Err(Error::Measurement(format!(
                "window is empty: the direct pulse passes the probe at t = {t1:.4} but the run ends at {t2:.4}"
            )));
        }
        if echo <= t2 {
            return Err(Error::Measurement(format!(
                "window/causality violation: reference wall echo at t = {echo:.4} precedes window end {t2:.4}; increase pad_factor"
            )));
        }
        Ok(ReflectionSetup {
            test,
            reference,
            probe: probe.to_vec(),
            window: (t1, t2),
            reference_echo_time: echo,
        })
    }

    pub fn run(&self) -> Result<ReflectionResult> {
        let (test, reference) = rayon::join(|| trace(&self.test), || trace(&self.reference));
        let (times, test) = test?;
        let (_, reference) = reference?;
        let (r, incident, reflected) = compare_traces(&times, &test, &reference, self.window)?;
        Ok(ReflectionResult {
            r,
            probe: self.probe.clone(),
            window: self.window,
            reference_extent: self.reference.grid.extent.clone(),
            reference_lower: self.reference.grid.lower.clone().unwrap_or_default(),
            reference_echo_time: self.reference_echo_time,
            incident_peak: incident,
            reflected_peak: reflected,
        })
    }
}

fn trace(scenario: &Scenario) -> Result<(Vec<f64>, Vec<f64>)> {
    let out = scenario.run()?;
    match out.probe(PROBE_NAME) {
        Some(ProbeData::TimeSeries { times, values, .. }) => Ok((times.clone(), values.clone())),
        _ => unreachable!("reflection probe is a time series"),
    }
}

/// Returns `(R, incident peak, reflected peak)` where the reflected peak is
/// `max |test - reference|` over `window` and the incident peak is
/// `max |reference|` over the whole trace.
pub fn compare_traces(
    times: &[f64],
    test: &[f64],
    reference: &[f64],
    window: (f64, f64),
) -> Result<(f64, f64, f64)> {
    if test.len() != reference.len() || times.len() != test.len() {
        return Err(Error::Measurement(format!(
            "trace lengths differ ({} vs {})",
            test.len(),
            reference.len()
        )));
    }
    let incident = reference.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if incident == 0.0 {
        return Err(Error::Measurement(
            "reference signal is identically zero".into(),
        ));
    }
    let reflected = times
        .iter()
        .zip(test.iter().zip(reference))
        .filter(|(t, _)| **t >= window.0 && **t <= window.1)
        .fold(0.0f64, |m, (_, (a, b))| m.max((a - b).abs()));
    Ok((reflected / incident, incident, reflected))
}

/// Runs `scenario` and a padded reference without the absorber on `side`,
/// and compares the traces at `probe`.
pub fn measure_reflection(
    scenario: &Scenario,
    probe: &[f64],
    side: Side,
    pad_factor: f64,
) -> Result<ReflectionResult> {
    ReflectionSetup::new(scenario, probe, side, pad_factor)?.run()
}
