//! Reflection and decay sweeps on the bundled scenarios.

use pmlwave::analysis::{
    angle_sweep, layer_decay_fit, measure_reflection, resolution_convergence, snap_angle,
    SweepMeasure, SweepPoint, INNER_SPAN,
};
use pmlwave::pml::Side;
use pmlwave::probe::{ProbeKind, ProbeSpec};
use pmlwave::scenario::{Duration, Scenario};
use pmlwave::validate::{bundled_config, standard_1d};

const PROBE: [f64; 1] = [3.0];
const RESOLUTIONS: [f64; 3] = [10.0, 20.0, 40.0];

fn bundled(name: &str) -> Scenario {
    bundled_config(name).unwrap().to_scenario().unwrap()
}

fn reflections(points: &[SweepPoint]) -> Vec<f64> {
    points
        .iter()
        .map(|p| match p.measured {
            SweepMeasure::Reflection(r) => r,
            _ => unreachable!(),
        })
        .collect()
}

#[test]
fn reflection_falls_with_resolution() {
    let pts =
        resolution_convergence(&standard_1d(10.0), &RESOLUTIONS, &PROBE, Side::XHi, 1.0).unwrap();
    let r = reflections(&pts);
    assert!(r[1] < r[0] && r[2] < r[1], "{r:?}");
}

#[test]
fn step_profile_reflects_more_at_every_resolution() {
    let smooth =
        resolution_convergence(&standard_1d(10.0), &RESOLUTIONS, &PROBE, Side::XHi, 1.0).unwrap();
    let step = resolution_convergence(
        &bundled("step-vs-cubic"),
        &RESOLUTIONS,
        &PROBE,
        Side::XHi,
        1.0,
    )
    .unwrap();
    for (s, p) in reflections(&step).iter().zip(reflections(&smooth)) {
        assert!(*s > p, "step {s:e} vs smooth {p:e}");
    }
}

#[test]
fn undamped_layer_reads_floor_before_the_echo() {
    let mut s = standard_1d(10.0);
    if let Some(a) = s.absorbers.x_hi.as_mut() {
        a.sigma_max = 0.0;
    }
    // With the wall at x = 9, nothing emitted after t = 0 returns to the
    // probe before t = 13.5.
    s.grid.extent = vec![9.0];
    s.duration = Duration::Time(9.0);
    let pts = resolution_convergence(&s, &RESOLUTIONS, &PROBE, Side::XHi, 1.0).unwrap();
    for r in reflections(&pts) {
        assert!(r <= 1e-10, "R = {r:e}");
    }
}

#[test]
fn reflection_window_precedes_reference_echo() {
    let r = measure_reflection(&standard_1d(20.0), &PROBE, Side::XHi, 1.0).unwrap();
    assert!(r.window.1 < r.reference_echo_time);
    assert!(r.window.0 < r.window.1);
    assert!(r.r >= 0.0 && r.r <= 1e-3);
    assert!(r.reference_extent[0] > 6.0);
}

/// The angle-sweep scenario collapsed onto its x axis.
fn normal_incidence_1d(base: &Scenario) -> Scenario {
    let mut s = base.clone();
    s.grid.dim = 1;
    s.grid.extent.truncate(1);
    s.grid.boundary_y = Default::default();
    s.absorbers.y_lo = None;
    s.absorbers.y_hi = None;
    for src in &mut s.sources {
        src.kind = pmlwave::SourceKind::Point;
        src.position.truncate(1);
        src.y_span = None;
        src.ky = 0.0;
    }
    s.probes = base
        .probes
        .iter()
        .map(|p| match &p.kind {
            ProbeKind::Dft {
                start,
                end,
                omegas,
                t_start,
                t_end,
            } => ProbeSpec {
                name: p.name.clone(),
                kind: ProbeKind::Dft {
                    start: vec![start[0]],
                    end: end.as_ref().map(|e| vec![e[0]]),
                    omegas: omegas.clone(),
                    t_start: *t_start,
                    t_end: *t_end,
                },
            },
            _ => p.clone(),
        })
        .collect();
    s
}

#[test]
fn normal_incidence_matches_one_dimension() {
    let base = bundled("angle-sweep");
    let pts = angle_sweep(&base, &[0.0]).unwrap();
    let SweepMeasure::Slope { slope: oblique, .. } = pts[0].measured else {
        unreachable!()
    };
    let flat = layer_decay_fit(&normal_incidence_1d(&base), INNER_SPAN)
        .unwrap()
        .fit
        .slope;
    assert!(
        (oblique - flat).abs() <= 0.03 * flat.abs(),
        "2D {oblique} vs 1D {flat}"
    );
}

#[test]
fn snapped_angles_are_admissible() {
    let base = bundled("angle-sweep");
    let period = base.grid.extent[1];
    let k = 2.0 * std::f64::consts::PI;
    for theta in [0.0, 12.0, 30.0, 45.0, 60.0] {
        let (snapped, ky) = snap_angle(theta, k, period).unwrap();
        let m = ky * period / (2.0 * std::f64::consts::PI);
        assert_eq!(m, m.round());
        assert!((k * snapped.to_radians().sin() - ky).abs() < 1e-12);
    }
}
