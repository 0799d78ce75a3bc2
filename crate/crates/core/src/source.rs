//! Additive (soft) sources.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldState;
use crate::grid::Grid;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Waveform {
    /// `sin(omega (t - delay) - phase) exp(-(t - delay)^2 / (2 width^2))`
    GaussianPulse { omega: f64, width: f64, delay: f64 },
    /// `ramp(t) sin(omega t - phase)`, ramp linear on `[0, ramp_time]`.
    ContinuousWave { omega: f64, ramp_time: f64 },
}

impl Waveform {
    pub fn omega(&self) -> f64 {
        match *self {
            Waveform::GaussianPulse { omega, .. } | Waveform::ContinuousWave { omega, .. } => omega,
        }
    }

    pub fn value(&self, t: f64, phase: f64) -> f64 {
        match *self {
            Waveform::GaussianPulse {
                omega,
                width,
                delay,
            } => {
                let s = t - delay;
                (omega * s - phase).sin() * (-s * s / (2.0 * width * width)).exp()
            }
            Waveform::ContinuousWave { omega, ramp_time } => {
                let ramp = if t >= ramp_time {
                    1.0
                } else if t <= 0.0 {
                    0.0
                } else {
                    t / ramp_time
                };
                ramp * (omega * t - phase).sin()
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Waveform::GaussianPulse {
                omega,
                width,
                delay,
            } => omega > 0.0 && width > 0.0 && delay.is_finite(),
            Waveform::ContinuousWave { omega, ramp_time } => omega > 0.0 && ramp_time >= 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSource(format!(
                "invalid waveform parameters {self:?}"
            )))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    /// Single cell nearest `position`.
    Point,
    /// Column of cells at `x = position[0]`, over `y_span` (whole column if
    /// absent). `ky` imposes the phase `ky * y` on the carrier.
    Line,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceSpec {
    pub kind: SourceKind,
    pub position: Vec<f64>,
    pub waveform: Waveform,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_span: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub ky: f64,
}

fn one() -> f64 {
    1.0
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

impl SourceSpec {
    pub fn point(position: Vec<f64>, waveform: Waveform, amplitude: f64) -> Self {
        SourceSpec {
            kind: SourceKind::Point,
            position,
            waveform,
            amplitude,
            y_span: None,
            ky: 0.0,
        }
    }

    pub fn line(x: f64, waveform: Waveform, amplitude: f64) -> Self {
        SourceSpec {
            kind: SourceKind::Line,
            position: vec![x],
            waveform,
            amplitude,
            y_span: None,
            ky: 0.0,
        }
    }
}

/// A source bound to grid cells, with the phase of each cell.
#[derive(Clone, Debug)]
pub struct ResolvedSource {
    pub cells: Vec<(usize, f64)>,
    pub waveform: Waveform,
    pub amplitude: f64,
}

impl ResolvedSource {
    pub fn new(grid: &Grid, spec: &SourceSpec) -> Result<Self> {
        spec.waveform.validate()?;
        if !spec.amplitude.is_finite() {
            return Err(Error::InvalidSource("amplitude must be finite".into()));
        }
        let x = *spec
            .position
            .first()
            .ok_or_else(|| Error::InvalidSource("empty position".into()))?;
        let cells = match spec.kind {
            SourceKind::Point => {
                if spec.position.len() != grid.dim {
                    return Err(Error::InvalidSource(format!(
                        "point source needs {} coordinates, got {}",
                        grid.dim,
                        spec.position.len()
                    )));
                }
                let y = spec.position.get(1).copied().unwrap_or(0.0);
                let (i, j) = grid.nearest_cell(x, y).ok_or_else(|| {
                    Error::InvalidSource(format!("position {:?} outside grid", spec.position))
                })?;
                vec![(grid.idx(i, j), spec.ky * grid.cell_y(j))]
            }
            SourceKind::Line => {
                if !grid.is_2d() {
                    return Err(Error::InvalidSource("line sources need a 2D grid".into()));
                }
                let (i, _) = grid
                    .nearest_cell(x, grid.cell_y(0))
                    .ok_or_else(|| Error::InvalidSource(format!("line x = {x} outside grid")))?;
                let [y0, y1] = spec.y_span.unwrap_or([grid.y_min, grid.y_max()]);
                let cells: Vec<_> = (0..grid.ny)
                    .filter(|&j| {
                        let y = grid.cell_y(j);
                        y >= y0 && y < y1
                    })
                    .map(|j| (grid.idx(i, j), spec.ky * grid.cell_y(j)))
                    .collect();
                if cells.is_empty() {
                    return Err(Error::InvalidSource(format!(
                        "y span {:?} covers no cells",
                        [y0, y1]
                    )));
                }
                cells
            }
        };
        Ok(ResolvedSource {
            cells,
            waveform: spec.waveform,
            amplitude: spec.amplitude,
        })
    }

    /// `u += dt * amplitude * waveform(t)` on each cell.
    pub fn apply(&self, state: &mut FieldState, t: f64, dt: f64) {
        if self.amplitude == 0.0 {
            return;
        }
        for &(c, phase) in &self.cells {
            state.u[c] += dt * self.amplitude * self.waveform.value(t, phase);
        }
    }
}

pub fn apply_source(
    state: &mut FieldState,
    grid: &Grid,
    source: &SourceSpec,
    t: f64,
    dt: f64,
) -> Result<()> {
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("negative source time {t}")));
    }
    ResolvedSource::new(grid, source)?.apply(state, t, dt);
    Ok(())
}
