//! Properties of the leap-frog and stretched steppers on whole grids.

use pmlwave::energy::discrete_energy;
use pmlwave::grid::{build_grid, BoundaryY, Grid};
use pmlwave::medium::{cfl_dt, Medium};
use pmlwave::pml::{build_pml_maps, step_pml, AbsorberSide, PmlSpec};
use pmlwave::probe::ProbeData;
use pmlwave::probe::ProbeSpec;
use pmlwave::scenario::{Duration, Scenario};
use pmlwave::source::{SourceSpec, Waveform};
use pmlwave::{step_plain, FieldState, GridSpec, MediumSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn random_state(grid: &Grid, rng: &mut ChaCha8Rng) -> FieldState {
    let mut s = FieldState::zeros(grid);
    for f in [&mut s.u, &mut s.v_x, &mut s.v_y] {
        f.iter_mut().for_each(|x| *x = rng.random_range(-1.0..1.0));
    }
    s
}

fn random_medium(grid: &Grid, rng: &mut ChaCha8Rng) -> Medium {
    let mut m = Medium::uniform(grid, 1.0, 1.0).unwrap();
    for f in [&mut m.a_x, &mut m.a_y, &mut m.b] {
        f.iter_mut().for_each(|x| *x = rng.random_range(0.25..2.0));
    }
    m
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Reflects fields about the x midplane. `v_x` is a gradient component and
/// changes sign.
fn mirror_x(s: &FieldState, grid: &Grid) -> FieldState {
    let (nx, nfx) = (grid.nx, grid.n_faces_x());
    let mut m = s.clone();
    for j in 0..grid.ny {
        for i in 0..nx {
            m.u[j * nx + i] = s.u[j * nx + nx - 1 - i];
        }
        for k in 0..nfx {
            m.v_x[j * nfx + k] = -s.v_x[j * nfx + nfx - 1 - k];
        }
    }
    for j in 0..grid.n_faces_y() {
        for i in 0..nx {
            m.v_y[j * nx + i] = s.v_y[j * nx + nx - 1 - i];
        }
    }
    m
}

fn mirror_medium_x(m: &Medium, grid: &Grid) -> Medium {
    let (nx, nfx) = (grid.nx, grid.n_faces_x());
    let mut r = m.clone();
    for j in 0..grid.ny {
        for i in 0..nx {
            r.b[j * nx + i] = m.b[j * nx + nx - 1 - i];
        }
        for k in 0..nfx {
            r.a_x[j * nfx + k] = m.a_x[j * nfx + nfx - 1 - k];
        }
    }
    for j in 0..grid.n_faces_y() {
        for i in 0..nx {
            r.a_y[j * nx + i] = m.a_y[j * nx + nx - 1 - i];
        }
    }
    r
}

fn grid_for(dim: usize, periodic: bool, nx: usize, ny: usize) -> Grid {
    if dim == 1 {
        build_grid(&[nx as f64 / 10.0], 10.0, BoundaryY::HardWall).unwrap()
    } else {
        let by = if periodic {
            BoundaryY::Periodic
        } else {
            BoundaryY::HardWall
        };
        build_grid(&[nx as f64 / 10.0, ny as f64 / 10.0], 10.0, by).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn stepping_is_linear(
        seed in any::<u64>(),
        dim in 1usize..=2,
        periodic in any::<bool>(),
        nx in 4usize..24,
        ny in 4usize..24,
        alpha in -3.0f64..3.0,
        beta in -3.0f64..3.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = grid_for(dim, periodic, nx, ny);
        let medium = random_medium(&grid, &mut rng);
        let dt = cfl_dt(&grid, &medium, 0.5).unwrap();
        let s1 = random_state(&grid, &mut rng);
        let s2 = random_state(&grid, &mut rng);
        let mut mixed = s1.combine(alpha, &s2, beta);
        let (mut a, mut b) = (s1, s2);
        for _ in 0..20 {
            step_plain(&mut mixed, &medium, &grid, dt);
            step_plain(&mut a, &medium, &grid, dt);
            step_plain(&mut b, &medium, &grid, dt);
        }
        let expect = a.combine(alpha, &b, beta);
        let scale = expect.u.iter().chain(&expect.v_x).chain(&expect.v_y)
            .fold(1.0f64, |m, x| m.max(x.abs()));
        prop_assert!(max_abs_diff(&mixed.u, &expect.u) <= 1e-12 * scale);
        prop_assert!(max_abs_diff(&mixed.v_x, &expect.v_x) <= 1e-12 * scale);
        prop_assert!(max_abs_diff(&mixed.v_y, &expect.v_y) <= 1e-12 * scale);
    }

    #[test]
    fn mirroring_commutes_with_stepping(
        seed in any::<u64>(),
        dim in 1usize..=2,
        periodic in any::<bool>(),
        nx in 4usize..24,
        ny in 4usize..24,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = grid_for(dim, periodic, nx, ny);
        let medium = random_medium(&grid, &mut rng);
        let mirrored_medium = mirror_medium_x(&medium, &grid);
        let dt = cfl_dt(&grid, &medium, 0.5).unwrap();
        let mut s = random_state(&grid, &mut rng);
        let mut m = mirror_x(&s, &grid);
        for _ in 0..20 {
            step_plain(&mut s, &medium, &grid, dt);
            step_plain(&mut m, &mirrored_medium, &grid, dt);
        }
        prop_assert_eq!(mirror_x(&s, &grid), m);
    }

    #[test]
    fn zero_state_stays_zero_with_absorbers(steps in 1u64..400, sigma in 0.0f64..50.0, kappa in 1.0f64..4.0) {
        let grid = build_grid(&[2.0, 2.0], 10.0, BoundaryY::HardWall).unwrap();
        let medium = Medium::uniform(&grid, 1.0, 1.0).unwrap();
        let side = AbsorberSide { kappa_max: kappa, ..AbsorberSide::pml(0.5, 2, sigma) };
        let spec = PmlSpec {
            x_lo: Some(side),
            x_hi: Some(side),
            y_lo: Some(side),
            y_hi: Some(side),
        };
        let coeffs = build_pml_maps(&grid, &spec).unwrap();
        let dt = cfl_dt(&grid, &medium, 0.5).unwrap();
        let mut s = FieldState::with_auxiliaries(&grid);
        for _ in 0..steps {
            step_pml(&mut s, &medium, &coeffs, &grid, dt);
        }
        prop_assert!(s.u.iter().chain(&s.v_x).chain(&s.v_y).chain(&s.phi).all(|&x| x == 0.0));
    }
}

fn gaussian_bump(grid: &Grid, x0: f64, y0: f64, width: f64) -> FieldState {
    let mut s = FieldState::zeros(grid);
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            let (x, y) = (grid.cell_x(i) - x0, grid.cell_y(j) - y0);
            let r2 = if grid.is_2d() { x * x + y * y } else { x * x };
            s.u[grid.idx(i, j)] = (-r2 / (2.0 * width * width)).exp();
        }
    }
    s
}

fn energy_spread(grid: &Grid, steps: usize) -> f64 {
    let medium = Medium::uniform(grid, 1.0, 1.0).unwrap();
    let dt = cfl_dt(grid, &medium, 0.5).unwrap();
    let cx = grid.x_min + 0.5 * grid.nx as f64 * grid.dx;
    let cy = grid.y_min + 0.5 * grid.ny as f64 * grid.dy;
    let mut s = gaussian_bump(grid, cx, cy, 1.0);
    let e0 = discrete_energy(&s, &medium, grid);
    let mut worst: f64 = 0.0;
    for _ in 0..steps {
        step_plain(&mut s, &medium, grid, dt);
        let e = discrete_energy(&s, &medium, grid);
        worst = worst.max((e - e0).abs() / e0);
    }
    worst
}

#[test]
fn closed_box_energy_stays_within_one_percent_1d() {
    let grid = build_grid(&[10.0], 20.0, BoundaryY::HardWall).unwrap();
    let spread = energy_spread(&grid, 10_000);
    assert!(spread <= 0.01, "relative energy excursion {spread:.3e}");
}

#[test]
fn closed_box_energy_stays_within_one_percent_2d() {
    let grid = build_grid(&[6.0, 6.0], 20.0, BoundaryY::HardWall).unwrap();
    let spread = energy_spread(&grid, 10_000);
    assert!(spread <= 0.01, "relative energy excursion {spread:.3e}");
}

/// Right-going bump `f(x - t)` with `v = -f` (`a = b = 1`), stepped to `t`;
/// returns the peak location refined by a parabola through the top three
/// cells.
fn bump_peak(resolution: f64, t: f64) -> f64 {
    let grid = build_grid(&[10.0], resolution, BoundaryY::HardWall).unwrap();
    let medium = Medium::uniform(&grid, 1.0, 1.0).unwrap();
    let dt = 0.5 * grid.dx;
    let f = |x: f64| (-(x - 2.0).powi(2) / (2.0 * 0.3f64.powi(2))).exp();
    let mut s = FieldState::zeros(&grid);
    for i in 0..grid.nx {
        s.u[i] = f(grid.cell_x(i));
    }
    for k in 0..grid.n_faces_x() {
        s.v_x[k] = -f(grid.face_x(k) + 0.5 * dt);
    }
    let steps = (t / dt).round() as usize;
    for _ in 0..steps {
        step_plain(&mut s, &medium, &grid, dt);
    }
    let i = (1..grid.nx - 1)
        .max_by(|&a, &b| s.u[a].total_cmp(&s.u[b]))
        .unwrap();
    let (l, c, r) = (s.u[i - 1], s.u[i], s.u[i + 1]);
    grid.cell_x(i) + 0.5 * grid.dx * (l - r) / (l - 2.0 * c + r)
}

#[test]
fn pulse_peak_matches_fine_reference() {
    let coarse = bump_peak(10.0, 3.0);
    let fine = bump_peak(40.0, 3.0);
    assert!((coarse - fine).abs() <= 0.1, "coarse {coarse}, fine {fine}");
    assert!((fine - 5.0).abs() <= 0.1, "fine {fine}");
}

/// Energy-weighted arrival time of a pulse at a probe trace.
fn centroid(times: &[f64], values: &[f64]) -> f64 {
    let w: f64 = values.iter().map(|v| v * v).sum();
    times
        .iter()
        .zip(values)
        .map(|(t, v)| t * v * v)
        .sum::<f64>()
        / w
}

#[test]
fn pulse_travels_at_sqrt_ab() {
    // c = 2, carrier wavelength 2, 10 cells per unit: 20 cells per wavelength.
    let omega = 2.0 * PI;
    let scenario = Scenario {
        grid: GridSpec {
            dim: 1,
            extent: vec![30.0],
            resolution: 10.0,
            boundary_y: Default::default(),
            lower: None,
        },
        medium: MediumSpec::Uniform { a: 4.0, b: 1.0 },
        absorbers: PmlSpec::default(),
        sources: vec![SourceSpec::point(
            vec![10.0],
            Waveform::GaussianPulse {
                omega,
                width: 0.5,
                delay: 2.5,
            },
            1.0,
        )],
        probes: vec![
            ProbeSpec::time_series("near", vec![14.0]),
            ProbeSpec::time_series("far", vec![22.0]),
        ],
        duration: Duration::Time(11.0),
        safety: 0.5,
    };
    let out = scenario.run().unwrap();
    let arrival = |name: &str| match out.probe(name) {
        Some(ProbeData::TimeSeries { times, values, .. }) => centroid(times, values),
        _ => unreachable!(),
    };
    let speed = 8.0 / (arrival("far") - arrival("near"));
    assert!((speed - 2.0).abs() / 2.0 <= 0.02, "speed {speed}");
}

#[test]
fn inner_edge_jump_shrinks_with_dx() {
    // p = 2: the first sample inside the layer carries the only jump.
    let jump = |res: f64| {
        let grid = build_grid(&[4.0], res, BoundaryY::HardWall).unwrap();
        let spec = PmlSpec {
            x_hi: Some(AbsorberSide::pml(0.5, 2, 10.0)),
            ..Default::default()
        };
        let c = build_pml_maps(&grid, &spec).unwrap();
        c.sigma_x_u
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .zip(c.sigma_x_u.iter())
            .filter(|(_, &s)| s == 0.0)
            .map(|(d, _)| d)
            .fold(0.0, f64::max)
    };
    let (j20, j40, j80) = (jump(20.0), jump(40.0), jump(80.0));
    assert!(j20 > 0.0);
    assert!(j40 <= 0.5 * j20 && j80 <= 0.5 * j40, "{j20} {j40} {j80}");
}
