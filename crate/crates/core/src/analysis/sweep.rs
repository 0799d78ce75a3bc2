use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::fit::{fit_decay_rate, DecayFit};
use crate::analysis::reflection::measure_reflection;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::pml::{PmlSpec, Side};
use crate::probe::{ProbeData, ProbeKind};
use crate::scenario::{Scenario, Simulation};
use crate::source::{SourceKind, Waveform};

/// Default fit span as fractions of the layer depth.
pub const INNER_SPAN: (f64, f64) = (0.2, 0.8);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Omega,
    AngleDeg,
    Resolution,
    Thickness,
    Degree,
    SigmaMax,
}

impl SweepVariable {
    pub fn column(self) -> &'static str {
        match self {
            SweepVariable::Omega => "omega_rad_per_time",
            SweepVariable::AngleDeg => "angle_deg",
            SweepVariable::Resolution => "resolution_cells_per_length",
            SweepVariable::Thickness => "thickness_length",
            SweepVariable::Degree => "degree",
            SweepVariable::SigmaMax => "sigma_max_per_time",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMeasure {
    Reflection(f64),
    /// Decay slope with respect to depth into the layer (1/length) and the
    /// fit's coefficient of determination.
    Slope {
        slope: f64,
        r_squared: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepPoint {
    pub variable: SweepVariable,
    pub value: f64,
    pub measured: SweepMeasure,
}

/// One row per point; all points must share the variable and measure kind.
pub fn sweep_csv(points: &[SweepPoint]) -> Result<String> {
    let Some(first) = points.first() else {
        return Ok(String::new());
    };
    let mut out = String::new();
    match first.measured {
        SweepMeasure::Reflection(_) => {
            let _ = writeln!(out, "{},reflection_ratio", first.variable.column());
        }
        SweepMeasure::Slope { .. } => {
            let _ = writeln!(
                out,
                "{},slope_per_length,r_squared",
                first.variable.column()
            );
        }
    }
    for p in points {
        if p.variable != first.variable {
            return Err(Error::InvalidArgument(
                "sweep mixes independent variables".into(),
            ));
        }
        match (first.measured, p.measured) {
            (SweepMeasure::Reflection(_), SweepMeasure::Reflection(r)) => {
                let _ = writeln!(out, "{},{r}", p.value);
            }
            (SweepMeasure::Slope { .. }, SweepMeasure::Slope { slope, r_squared }) => {
                let _ = writeln!(out, "{},{slope},{r_squared}", p.value);
            }
            _ => {
                return Err(Error::InvalidArgument(
                    "sweep mixes measured quantities".into(),
                ))
            }
        }
    }
    Ok(out)
}

/// Decay fit of a DFT segment that lies inside one absorber.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LayerDecay {
    pub side: &'static str,
    pub omega: f64,
    /// Depth from the inner face of the layer, one per segment sample.
    pub depth: Vec<f64>,
    pub amplitude: Vec<f64>,
    /// Slope with respect to depth; negative when the field decays inward.
    pub fit: DecayFit,
}

/// Fits the first DFT segment probe's amplitude at its first frequency
/// against depth into the absorber containing it, over
/// `[span.0 L, span.1 L]`.
pub fn layer_decay_from_data(
    grid: &Grid,
    absorbers: &PmlSpec,
    data: &ProbeData,
    span: (f64, f64),
) -> Result<LayerDecay> {
    let ProbeData::Dft {
        positions, omegas, ..
    } = data
    else {
        return Err(Error::InvalidProbe("decay fit needs a DFT probe".into()));
    };
    let amplitude = data
        .dft_amplitudes(0)
        .ok_or_else(|| Error::Measurement("DFT probe accumulated no samples".into()))?;
    let mid = positions[positions.len() / 2];
    let (side, (lo, hi)) = absorbers
        .sides()
        .map(|(s, _)| (s, absorbers.span(grid, s).unwrap()))
        .find(|(s, (lo, hi))| {
            let c = if s.is_x() { mid.0 } else { mid.1 };
            c > *lo && c < *hi
        })
        .ok_or_else(|| Error::Measurement("DFT segment is not inside an absorber".into()))?;
    let depth: Vec<f64> = positions
        .iter()
        .map(|&(x, y)| {
            let c = if side.is_x() { x } else { y };
            match side {
                Side::XLo | Side::YLo => hi - c,
                Side::XHi | Side::YHi => c - lo,
            }
        })
        .collect();
    let thickness = hi - lo;
    let fit = fit_decay_rate(&depth, &amplitude, (span.0 * thickness, span.1 * thickness))?;
    Ok(LayerDecay {
        side: side.name(),
        omega: omegas[0],
        depth,
        amplitude,
        fit,
    })
}

/// Runs `scenario` and fits the decay of its first DFT probe.
pub fn layer_decay_fit(scenario: &Scenario, span: (f64, f64)) -> Result<LayerDecay> {
    let mut sim = Simulation::new(scenario)?;
    let grid = sim.grid.clone();
    sim.run()?;
    let out = sim.into_output();
    let probe = out
        .probes
        .iter()
        .find(|p| matches!(p.spec.kind, ProbeKind::Dft { .. }))
        .ok_or_else(|| Error::InvalidProbe("scenario has no DFT probe".into()))?;
    layer_decay_from_data(&grid, &scenario.absorbers, &probe.data, span)
}

/// Nearest admissible angle: `k_y L_y / 2 pi` must be an integer. Returns
/// `(snapped angle in degrees, k_y)`.
pub fn snap_angle(theta_deg: f64, k: f64, period: f64) -> Result<(f64, f64)> {
    if !(0.0..90.0).contains(&theta_deg) {
        return Err(Error::InvalidArgument(format!(
            "incidence angle must be in [0, 90) degrees, got {theta_deg}"
        )));
    }
    let m = (k * theta_deg.to_radians().sin() * period / (2.0 * PI)).round();
    let ky = 2.0 * PI * m / period;
    if ky >= k {
        return Err(Error::InvalidArgument(format!(
            "snapped k_y = {ky} is not propagating for |k| = {k}"
        )));
    }
    Ok(((ky / k).asin().to_degrees(), ky))
}

/// CW planewave per angle via phased line sources; returns the fitted decay
/// slope (inner span of the layer) per snapped angle.
pub fn angle_sweep(base: &Scenario, angles_deg: &[f64]) -> Result<Vec<SweepPoint>> {
    let grid = base.grid.build()?;
    if !(grid.is_2d() && grid.periodic_y()) {
        return Err(Error::InvalidArgument(
            "angle sweeps need a 2D grid with periodic y".into(),
        ));
    }
    let src = base
        .sources
        .iter()
        .position(|s| {
            s.kind == SourceKind::Line && matches!(s.waveform, Waveform::ContinuousWave { .. })
        })
        .ok_or_else(|| {
            Error::InvalidSource("angle sweeps need a continuous-wave line source".into())
        })?;
    let source = &base.sources[src];
    let c = base
        .medium
        .material_at(
            source.position[0],
            grid.y_min + 0.5 * grid.ny as f64 * grid.dy,
        )
        .speed();
    let k = source.waveform.omega() / c;
    let period = grid.ny as f64 * grid.dy;
    let runs = angles_deg
        .iter()
        .map(|&theta| {
            let (snapped, ky) = snap_angle(theta, k, period)?;
            let mut s = base.clone();
            for (n, spec) in s.sources.iter_mut().enumerate() {
                if n == src || (spec.kind == SourceKind::Line && spec.waveform == source.waveform) {
                    spec.ky = ky;
                }
            }
            Ok((snapped, s))
        })
        .collect::<Result<Vec<_>>>()?;
    runs.par_iter()
        .map(|(theta, s)| {
            let d = layer_decay_fit(s, INNER_SPAN)?;
            Ok(SweepPoint {
                variable: SweepVariable::AngleDeg,
                value: *theta,
                measured: SweepMeasure::Slope {
                    slope: d.fit.slope,
                    r_squared: d.fit.r_squared,
                },
            })
        })
        .collect()
}

/// Reflection at each resolution for the same physical scenario.
pub fn resolution_convergence(
    scenario: &Scenario,
    resolutions: &[f64],
    probe: &[f64],
    side: Side,
    pad_factor: f64,
) -> Result<Vec<SweepPoint>> {
    if resolutions.len() < 3 {
        return Err(Error::InvalidArgument(
            "need at least three resolutions".into(),
        ));
    }
    let coarsest = resolutions.iter().copied().fold(f64::INFINITY, f64::min);
    if coarsest.is_nan() || coarsest <= 0.0 {
        return Err(Error::InvalidArgument(
            "resolutions must be positive".into(),
        ));
    }
    for &r in resolutions {
        let ratio = r / coarsest;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio {
            return Err(Error::InvalidArgument(format!(
                "resolution {r} is not a multiple of the coarsest {coarsest}"
            )));
        }
    }
    resolutions
        .par_iter()
        .map(|&res| {
            let mut s = scenario.clone();
            s.grid.resolution = res;
            let r = measure_reflection(&s, probe, side, pad_factor)?;
            Ok(SweepPoint {
                variable: SweepVariable::Resolution,
                value: res,
                measured: SweepMeasure::Reflection(r.r),
            })
        })
        .collect()
}

/// Largest incidence angle (degrees) on a boundary face at distance
/// `boundary_distance` from a centered source region of side
/// `region_extent` in a square (2D) or cubic (3D) domain. The worst ray runs
/// from one edge of the source region to the far corner of the face.
pub fn cone_angle_bound(region_extent: f64, boundary_distance: f64, dim: usize) -> Result<f64> {
    if !(2..=3).contains(&dim) {
        return Err(Error::InvalidArgument(format!(
            "dim must be 2 or 3, got {dim}"
        )));
    }
    if !(region_extent >= 0.0 && boundary_distance >= 0.0) {
        return Err(Error::InvalidArgument(
            "extent and distance must be non-negative".into(),
        ));
    }
    if boundary_distance == 0.0 {
        return Ok(90.0);
    }
    let lateral = ((dim - 1) as f64).sqrt() * (region_extent + boundary_distance);
    Ok(lateral.atan2(boundary_distance).to_degrees())
}

/// `acos(1 / sqrt(dim))` in degrees: the bound for a distant boundary.
pub fn cone_angle_limit(dim: usize) -> f64 {
    (1.0 / (dim as f64).sqrt()).acos().to_degrees()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cone_limits() {
        assert!((cone_angle_limit(3) - 54.7356).abs() < 1e-4);
        assert!((cone_angle_limit(2) - 45.0).abs() < 1e-12);
        assert!((cone_angle_bound(1.0, 1e9, 3).unwrap() - cone_angle_limit(3)).abs() < 1e-6);
        assert!((cone_angle_bound(1.0, 1e9, 2).unwrap() - 45.0).abs() < 1e-6);
        assert_eq!(cone_angle_bound(0.0, 0.0, 3).unwrap(), 90.0);
        assert_eq!(cone_angle_bound(1.0, 0.0, 2).unwrap(), 90.0);
        assert!(cone_angle_bound(1.0, 1.0, 3).unwrap() > cone_angle_limit(3));
        assert!(cone_angle_bound(1.0, 1.0, 4).is_err());
    }

    #[test]
    fn snapping_is_admissible() {
        let k = 2.0 * PI;
        for theta in [0.0, 10.0, 30.0, 45.0, 60.0, 65.0] {
            let (snapped, ky) = snap_angle(theta, k, 8.0).unwrap();
            let m = ky * 8.0 / (2.0 * PI);
            assert!((m - m.round()).abs() < 1e-12);
            assert!((snapped - theta).abs() < 5.0, "{theta} -> {snapped}");
        }
        assert!(snap_angle(90.0, k, 8.0).is_err());
        assert!(snap_angle(89.0, k, 1.9).is_err());
    }

    #[test]
    fn csv_header_names_units() {
        let pts = [
            SweepPoint {
                variable: SweepVariable::Resolution,
                value: 10.0,
                measured: SweepMeasure::Reflection(1e-3),
            },
            SweepPoint {
                variable: SweepVariable::Resolution,
                value: 20.0,
                measured: SweepMeasure::Reflection(1e-4),
            },
        ];
        let csv = sweep_csv(&pts).unwrap();
        assert_eq!(
            csv,
            "resolution_cells_per_length,reflection_ratio\n10,0.001\n20,0.0001\n"
        );
        let mut mixed = pts;
        mixed[1].variable = SweepVariable::Degree;
        assert!(sweep_csv(&mixed).is_err());
    }

    #[test]
    fn convergence_preconditions() {
        let s = crate::validate::standard_1d(20.0);
        let err = |r: &[f64]| resolution_convergence(&s, r, &[3.0], Side::XHi, 1.0).is_err();
        assert!(err(&[10.0, 20.0]));
        assert!(err(&[10.0, 15.0, 20.0]));
    }
}
