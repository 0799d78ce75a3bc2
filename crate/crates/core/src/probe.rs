//! Point, line and running-DFT probes on `u`.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::FieldState;
use crate::grid::Grid;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ProbeKind {
    TimeSeries {
        point: Vec<f64>,
    },
    /// `u` at every cell center along an axis-aligned segment, every
    /// `every` steps.
    LineProfile {
        start: Vec<f64>,
        end: Vec<f64>,
        #[serde(default = "one_u64")]
        every: u64,
    },
    /// Running transform `sum u(t_n) exp(+i omega t_n) dt` over
    /// `t_start <= t_n <= t_end`, at a point or along a segment.
    Dft {
        start: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        end: Option<Vec<f64>>,
        omegas: Vec<f64>,
        #[serde(default)]
        t_start: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t_end: Option<f64>,
    },
}

fn one_u64() -> u64 {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    pub name: String,
    pub kind: ProbeKind,
}

impl ProbeSpec {
    pub fn time_series(name: &str, point: Vec<f64>) -> Self {
        ProbeSpec {
            name: name.into(),
            kind: ProbeKind::TimeSeries { point },
        }
    }

    pub fn dft_segment(
        name: &str,
        start: Vec<f64>,
        end: Vec<f64>,
        omegas: Vec<f64>,
        t_start: f64,
    ) -> Self {
        ProbeSpec {
            name: name.into(),
            kind: ProbeKind::Dft {
                start,
                end: Some(end),
                omegas,
                t_start,
                t_end: None,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProbeData {
    TimeSeries {
        point: (f64, f64),
        times: Vec<f64>,
        values: Vec<f64>,
    },
    LineProfile {
        positions: Vec<(f64, f64)>,
        times: Vec<f64>,
        rows: Vec<Vec<f64>>,
    },
    Dft {
        positions: Vec<(f64, f64)>,
        omegas: Vec<f64>,
        /// `sums[p * omegas.len() + k]`
        sums: Vec<Complex64>,
        samples: u64,
        dt: f64,
    },
}

impl ProbeData {
    /// Accumulated window length `T` of a DFT probe.
    pub fn dft_duration(&self) -> Option<f64> {
        match self {
            ProbeData::Dft { samples, dt, .. } => Some(*samples as f64 * dt),
            _ => None,
        }
    }

    /// `2 |sum| / T` per position for the `k`-th frequency.
    pub fn dft_amplitudes(&self, k: usize) -> Option<Vec<f64>> {
        let ProbeData::Dft { omegas, sums, .. } = self else {
            return None;
        };
        let t = self.dft_duration()?;
        if t <= 0.0 {
            return None;
        }
        Some(
            sums.chunks(omegas.len())
                .map(|s| 2.0 * s[k].norm() / t)
                .collect(),
        )
    }

    pub fn positions(&self) -> Vec<(f64, f64)> {
        match self {
            ProbeData::TimeSeries { point, .. } => vec![*point],
            ProbeData::LineProfile { positions, .. } | ProbeData::Dft { positions, .. } => {
                positions.clone()
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProbeRecorder {
    pub spec: ProbeSpec,
    pub data: ProbeData,
    t_window: (f64, f64),
    every: u64,
}

fn point_of(grid: &Grid, p: &[f64], what: &str) -> Result<(f64, f64)> {
    if p.len() != grid.dim {
        return Err(Error::InvalidProbe(format!(
            "{what} needs {} coordinates, got {}",
            grid.dim,
            p.len()
        )));
    }
    let pt = (p[0], p.get(1).copied().unwrap_or(0.0));
    if !grid.contains(pt.0, pt.1) {
        return Err(Error::InvalidProbe(format!("{what} {p:?} outside grid")));
    }
    Ok(pt)
}

/// Cell-center sample points along an axis-aligned segment.
fn segment_points(grid: &Grid, a: (f64, f64), b: (f64, f64)) -> Result<Vec<(f64, f64)>> {
    if a.1 == b.1 {
        let (x0, x1) = (a.0.min(b.0), a.0.max(b.0));
        let pts: Vec<_> = (0..grid.nx)
            .map(|i| grid.cell_x(i))
            .filter(|&x| x >= x0 && x <= x1)
            .map(|x| (x, a.1))
            .collect();
        non_empty(pts)
    } else if a.0 == b.0 && grid.is_2d() {
        let (y0, y1) = (a.1.min(b.1), a.1.max(b.1));
        let pts: Vec<_> = (0..grid.ny)
            .map(|j| grid.cell_y(j))
            .filter(|&y| y >= y0 && y <= y1)
            .map(|y| (a.0, y))
            .collect();
        non_empty(pts)
    } else {
        Err(Error::InvalidProbe("segments must be axis-aligned".into()))
    }
}

fn non_empty(pts: Vec<(f64, f64)>) -> Result<Vec<(f64, f64)>> {
    if pts.is_empty() {
        Err(Error::InvalidProbe(
            "segment contains no cell centers".into(),
        ))
    } else {
        Ok(pts)
    }
}

impl ProbeRecorder {
    pub fn new(grid: &Grid, spec: &ProbeSpec, dt: f64) -> Result<Self> {
        let mut t_window = (f64::NEG_INFINITY, f64::INFINITY);
        let mut every = 1;
        let data = match &spec.kind {
            ProbeKind::TimeSeries { point } => ProbeData::TimeSeries {
                point: point_of(grid, point, "probe point")?,
                times: Vec::new(),
                values: Vec::new(),
            },
            ProbeKind::LineProfile {
                start,
                end,
                every: e,
            } => {
                if *e == 0 {
                    return Err(Error::InvalidProbe(
                        "line profile stride must be >= 1".into(),
                    ));
                }
                every = *e;
                let a = point_of(grid, start, "segment start")?;
                let b = point_of(grid, end, "segment end")?;
                ProbeData::LineProfile {
                    positions: segment_points(grid, a, b)?,
                    times: Vec::new(),
                    rows: Vec::new(),
                }
            }
            ProbeKind::Dft {
                start,
                end,
                omegas,
                t_start,
                t_end,
            } => {
                if omegas.is_empty() || omegas.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                    return Err(Error::InvalidProbe(
                        "dft frequencies must be positive".into(),
                    ));
                }
                let a = point_of(grid, start, "dft start")?;
                let positions = match end {
                    Some(end) => segment_points(grid, a, point_of(grid, end, "dft end")?)?,
                    None => vec![a],
                };
                t_window = (*t_start, t_end.unwrap_or(f64::INFINITY));
                ProbeData::Dft {
                    sums: vec![Complex64::new(0.0, 0.0); positions.len() * omegas.len()],
                    positions,
                    omegas: omegas.clone(),
                    samples: 0,
                    dt,
                }
            }
        };
        Ok(ProbeRecorder {
            spec: spec.clone(),
            data,
            t_window,
            every,
        })
    }

    pub fn record(&mut self, state: &FieldState, grid: &Grid, t: f64) {
        match &mut self.data {
            ProbeData::TimeSeries {
                point,
                times,
                values,
            } => {
                times.push(t);
                values.push(state.sample_u(grid, point.0, point.1));
            }
            ProbeData::LineProfile {
                positions,
                times,
                rows,
            } => {
                if state.step.is_multiple_of(self.every) {
                    times.push(t);
                    rows.push(
                        positions
                            .iter()
                            .map(|&(x, y)| state.sample_u(grid, x, y))
                            .collect(),
                    );
                }
            }
            ProbeData::Dft {
                positions,
                omegas,
                sums,
                samples,
                dt,
            } => {
                if t < self.t_window.0 || t > self.t_window.1 {
                    return;
                }
                *samples += 1;
                let phases: Vec<Complex64> = omegas
                    .iter()
                    .map(|w| Complex64::from_polar(*dt, w * t))
                    .collect();
                let nw = omegas.len();
                for (p, &(x, y)) in positions.iter().enumerate() {
                    let u = state.sample_u(grid, x, y);
                    for (k, ph) in phases.iter().enumerate() {
                        sums[p * nw + k] += ph * u;
                    }
                }
            }
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match &self.data {
            ProbeData::TimeSeries {
                point,
                times,
                values,
            } => {
                let _ = writeln!(out, "# time_series x={} y={}", point.0, point.1);
                out.push_str("t,u\n");
                for (t, u) in times.iter().zip(values) {
                    let _ = writeln!(out, "{t},{u}");
                }
            }
            ProbeData::LineProfile {
                positions,
                times,
                rows,
            } => {
                out.push_str("# line_profile\n");
                out.push_str("t,x,y,u\n");
                for (t, row) in times.iter().zip(rows) {
                    for ((x, y), u) in positions.iter().zip(row) {
                        let _ = writeln!(out, "{t},{x},{y},{u}");
                    }
                }
            }
            ProbeData::Dft {
                positions,
                omegas,
                sums,
                ..
            } => {
                let t = self.data.dft_duration().unwrap_or(0.0);
                let _ = writeln!(
                    out,
                    "# dft amplitude = 2|sum u(t) exp(+i omega t) dt| / T, T={t}"
                );
                out.push_str("x,y,omega,amplitude,re,im\n");
                for (p, (x, y)) in positions.iter().enumerate() {
                    for (k, w) in omegas.iter().enumerate() {
                        let s = sums[p * omegas.len() + k];
                        let amp = if t > 0.0 { 2.0 * s.norm() / t } else { 0.0 };
                        let _ = writeln!(out, "{x},{y},{w},{amp},{},{}", s.re, s.im);
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, BoundaryY};
    use std::f64::consts::PI;

    #[test]
    fn dft_of_unit_cosine() {
        let g = build_grid(&[1.0], 10.0, BoundaryY::HardWall).unwrap();
        let omega = 2.0 * PI;
        let samples_per_period = 64;
        let dt = 1.0 / samples_per_period as f64;
        let spec = ProbeSpec {
            name: "d".into(),
            kind: ProbeKind::Dft {
                start: vec![0.55],
                end: None,
                omegas: vec![omega],
                t_start: 0.0,
                t_end: None,
            },
        };
        let mut rec = ProbeRecorder::new(&g, &spec, dt).unwrap();
        let mut s = FieldState::zeros(&g);
        for n in 0..(5 * samples_per_period) {
            let t = n as f64 * dt;
            s.u[5] = (omega * t).cos();
            rec.record(&s, &g, t);
        }
        let amp = rec.data.dft_amplitudes(0).unwrap()[0];
        assert!((amp - 1.0).abs() < 1e-3, "amplitude {amp}");
    }

    #[test]
    fn zero_field_records_zeros() {
        let g = build_grid(&[1.0, 1.0], 10.0, BoundaryY::HardWall).unwrap();
        let s = FieldState::zeros(&g);
        let spec = ProbeSpec {
            name: "l".into(),
            kind: ProbeKind::LineProfile {
                start: vec![0.0, 0.5],
                end: vec![1.0, 0.5],
                every: 1,
            },
        };
        let mut rec = ProbeRecorder::new(&g, &spec, 0.1).unwrap();
        rec.record(&s, &g, 0.0);
        let ProbeData::LineProfile {
            positions, rows, ..
        } = &rec.data
        else {
            unreachable!()
        };
        assert_eq!(positions.len(), 10);
        assert!(rows[0].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn out_of_grid_probe_rejected() {
        let g = build_grid(&[1.0], 10.0, BoundaryY::HardWall).unwrap();
        assert!(ProbeRecorder::new(&g, &ProbeSpec::time_series("p", vec![2.0]), 0.1).is_err());
        assert!(ProbeRecorder::new(&g, &ProbeSpec::time_series("p", vec![0.5, 0.5]), 0.1).is_err());
    }

    #[test]
    fn csv_header_names_convention() {
        let g = build_grid(&[1.0], 10.0, BoundaryY::HardWall).unwrap();
        let spec = ProbeSpec::dft_segment("d", vec![0.0], vec![1.0], vec![1.0], 0.0);
        let rec = ProbeRecorder::new(&g, &spec, 0.1).unwrap();
        let csv = rec.to_csv();
        assert!(csv.starts_with("# dft amplitude = 2|sum u(t) exp(+i omega t) dt| / T"));
        assert_eq!(csv.lines().count(), 12);
    }
}
