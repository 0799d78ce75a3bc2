//! Time steppers with absorbing layers.
//!
//! Frequency domain, with stretch factors `s_x = kappa_x + i sigma_x / omega`
//! and `s_y` likewise, the stretched system multiplied through by `s_x s_y`
//! becomes, in time domain,
//!
//! ```text
//! kappa_x dv_x/dt = a du/dx - sigma_x v_x
//! kappa_y dv_y/dt = a du/dy - sigma_y v_y
//! kappa_x kappa_y du/dt = b (kappa_y dv_x/dx + kappa_x dv_y/dy)
//!                         - (kappa_y sigma_x + kappa_x sigma_y) u + psi_x + psi_y - phi
//! dpsi_x/dt = sigma_y b dv_x/dx
//! dpsi_y/dt = sigma_x b dv_y/dy
//! dphi/dt   = sigma_x sigma_y u
//! ```
//!
//! Loss terms are averaged over the step, `w' = ((1 - h) w + dt' rhs) / (1 + h)`
//! with `h = sigma dt' / 2` and `dt' = dt / kappa`. The auxiliaries are
//! advanced from the freshly updated `v` and enter the `u` update at the half
//! step. `phi` is trapezoidal in `u`, which folds into the loss coefficient.
//!
//! Where `sigma = 0` and `kappa = 1` every expression collapses to the
//! operations of [`crate::stepper::step_plain`] in the same order.

use crate::field::FieldState;
use crate::grid::Grid;
use crate::medium::Medium;
use crate::pml::PmlCoefficients;
use crate::stepper::{cell_or_ghost, u_at, update_v_plain, y_face_above, y_neighbours};

pub fn step_pml(
    state: &mut FieldState,
    medium: &Medium,
    coeffs: &PmlCoefficients,
    grid: &Grid,
    dt: f64,
) {
    update_v_stretched(state, medium, coeffs, grid, dt);
    if grid.is_2d() {
        state.allocate_auxiliaries(grid);
        update_u_stretched_2d(state, medium, coeffs, grid, dt);
    } else {
        update_u_stretched_1d(state, medium, coeffs, grid, dt);
    }
    state.step += 1;
}

/// Scalar conductivity on `u` only: `du/dt = b div v - (sigma_x + sigma_y) u`,
/// `dv/dt = a grad u`. Not reflectionless; kept as a baseline.
pub fn step_nonpml_absorber(
    state: &mut FieldState,
    medium: &Medium,
    coeffs: &PmlCoefficients,
    grid: &Grid,
    dt: f64,
) {
    update_v_plain(state, medium, grid, dt);
    let inv_dx = 1.0 / grid.dx;
    let nfx = grid.n_faces_x();
    if grid.is_2d() {
        let inv_dy = 1.0 / grid.dy;
        for j in 0..grid.ny {
            let up = y_face_above(grid, j);
            let sy = coeffs.sigma_y_u[j];
            for i in 0..grid.nx {
                let c = grid.idx(i, j);
                let dvx = (state.v_x[j * nfx + i + 1] - state.v_x[j * nfx + i]) * inv_dx;
                let dvy = (state.v_y[grid.idx(i, up)] - state.v_y[c]) * inv_dy;
                let rhs = medium.b[c] * (dvx + dvy);
                let h = 0.5 * (coeffs.sigma_x_u[i] + sy) * dt;
                state.u[c] = ((1.0 - h) * state.u[c] + dt * rhs) / (1.0 + h);
            }
        }
    } else {
        for i in 0..grid.nx {
            let dvx = (state.v_x[i + 1] - state.v_x[i]) * inv_dx;
            let rhs = medium.b[i] * dvx;
            let h = 0.5 * coeffs.sigma_x_u[i] * dt;
            state.u[i] = ((1.0 - h) * state.u[i] + dt * rhs) / (1.0 + h);
        }
    }
    state.step += 1;
}

#[inline]
fn damped(w: f64, sigma: f64, kappa: f64, dt: f64, drive: f64) -> f64 {
    let dtk = dt / kappa;
    let h = 0.5 * sigma * dtk;
    ((1.0 - h) * w + dtk * drive) / (1.0 + h)
}

fn update_v_stretched(
    state: &mut FieldState,
    medium: &Medium,
    coeffs: &PmlCoefficients,
    grid: &Grid,
    dt: f64,
) {
    let inv_dx = 1.0 / grid.dx;
    let nfx = grid.n_faces_x();
    for j in 0..grid.ny {
        let row = &state.u[j * grid.nx..(j + 1) * grid.nx];
        for i in 0..nfx {
            let g = (u_at(row, i as isize) - u_at(row, i as isize - 1)) * inv_dx;
            let f = j * nfx + i;
            let dtk = dt / coeffs.kappa_x_v[i];
            let h = 0.5 * coeffs.sigma_x_v[i] * dtk;
            state.v_x[f] = ((1.0 - h) * state.v_x[f] + dtk * medium.a_x[f] * g) / (1.0 + h);
        }
    }
    if grid.is_2d() {
        let inv_dy = 1.0 / grid.dy;
        for j in 0..grid.n_faces_y() {
            let (below, above) = y_neighbours(grid, j);
            let dtk = dt / coeffs.kappa_y_v[j];
            let h = 0.5 * coeffs.sigma_y_v[j] * dtk;
            for i in 0..grid.nx {
                let g = (cell_or_ghost(state, grid, i, above)
                    - cell_or_ghost(state, grid, i, below))
                    * inv_dy;
                let f = grid.idx(i, j);
                state.v_y[f] = ((1.0 - h) * state.v_y[f] + dtk * medium.a_y[f] * g) / (1.0 + h);
            }
        }
    }
}

fn update_u_stretched_1d(
    state: &mut FieldState,
    medium: &Medium,
    coeffs: &PmlCoefficients,
    grid: &Grid,
    dt: f64,
) {
    let inv_dx = 1.0 / grid.dx;
    for i in 0..grid.nx {
        let dvx = (state.v_x[i + 1] - state.v_x[i]) * inv_dx;
        let rhs = medium.b[i] * dvx;
        state.u[i] = damped(
            state.u[i],
            coeffs.sigma_x_u[i],
            coeffs.kappa_x_u[i],
            dt,
            rhs,
        );
    }
}

fn update_u_stretched_2d(
    state: &mut FieldState,
    medium: &Medium,
    coeffs: &PmlCoefficients,
    grid: &Grid,
    dt: f64,
) {
    let inv_dx = 1.0 / grid.dx;
    let inv_dy = 1.0 / grid.dy;
    let nfx = grid.n_faces_x();
    for j in 0..grid.ny {
        let up = y_face_above(grid, j);
        let (sy, ky) = (coeffs.sigma_y_u[j], coeffs.kappa_y_u[j]);
        for i in 0..grid.nx {
            let (sx, kx) = (coeffs.sigma_x_u[i], coeffs.kappa_x_u[i]);
            let c = grid.idx(i, j);
            let b = medium.b[c];
            let dvx = (state.v_x[j * nfx + i + 1] - state.v_x[j * nfx + i]) * inv_dx;
            let dvy = (state.v_y[grid.idx(i, up)] - state.v_y[c]) * inv_dy;

            let mut rhs = b * (ky * dvx + kx * dvy);
            let mut loss = ky * sx + kx * sy;
            // each auxiliary is identically zero where its sigma vanishes
            if sy != 0.0 {
                let old = state.psi_x[c];
                let new = old + dt * sy * b * dvx;
                state.psi_x[c] = new;
                rhs += 0.5 * (old + new);
            }
            if sx != 0.0 {
                let old = state.psi_y[c];
                let new = old + dt * sx * b * dvy;
                state.psi_y[c] = new;
                rhs += 0.5 * (old + new);
            }
            let sxy = sx * sy;
            if sxy != 0.0 {
                loss += 0.5 * dt * sxy;
                rhs -= state.phi[c];
            }

            let u_old = state.u[c];
            let u_new = damped(u_old, loss, kx * ky, dt, rhs);
            state.u[c] = u_new;
            if sxy != 0.0 {
                state.phi[c] += dt * sxy * 0.5 * (u_old + u_new);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, BoundaryY};
    use crate::pml::{build_pml_maps, AbsorberSide, PmlSpec};
    use crate::stepper::step_plain;

    #[test]
    fn uniform_decay_factor_1d() {
        let g = build_grid(&[2.0], 20.0, BoundaryY::HardWall).unwrap();
        let m = Medium::uniform(&g, 1.0, 1.0).unwrap();
        let sigma = 3.0;
        let mut c = PmlCoefficients::none(&g);
        c.sigma_x_u.fill(sigma);
        c.sigma_x_v.fill(sigma);
        let dt = 0.01;
        let mut s = FieldState::zeros(&g);
        s.u.fill(1.0);
        step_pml(&mut s, &m, &c, &g, dt);
        let ratio = (1.0 - sigma * dt / 2.0) / (1.0 + sigma * dt / 2.0);
        for i in 1..g.nx - 1 {
            assert!((s.u[i] - ratio).abs() < 1e-15);
        }
    }

    #[test]
    fn scalar_absorber_leaves_v_undamped() {
        let g = build_grid(&[2.0], 20.0, BoundaryY::HardWall).unwrap();
        let m = Medium::uniform(&g, 1.0, 1.0).unwrap();
        let mut c = PmlCoefficients::none(&g);
        c.sigma_x_u.fill(2.0);
        c.sigma_x_v.fill(2.0);
        let mut s = FieldState::zeros(&g);
        s.u.fill(1.0);
        s.v_x.fill(0.5);
        step_nonpml_absorber(&mut s, &m, &c, &g, 0.01);
        let ratio = (1.0 - 0.01) / (1.0 + 0.01);
        for i in 2..g.nx - 1 {
            assert_eq!(s.v_x[i], 0.5);
            assert!((s.u[i - 1] - ratio).abs() < 1e-15);
        }
    }

    #[test]
    fn kappa_slows_the_update() {
        // kappa = 2 with sigma = 0 is a plain step with dt / 2
        let g = build_grid(&[1.0], 20.0, BoundaryY::HardWall).unwrap();
        let m = Medium::uniform(&g, 1.0, 1.0).unwrap();
        let mut c = PmlCoefficients::none(&g);
        c.kappa_x_u.fill(2.0);
        c.kappa_x_v.fill(2.0);
        let mut a = FieldState::zeros(&g);
        for (i, u) in a.u.iter_mut().enumerate() {
            *u = (i as f64 * 0.3).sin();
        }
        let mut b = a.clone();
        step_pml(&mut a, &m, &c, &g, 0.02);
        step_plain(&mut b, &m, &g, 0.01);
        for (x, y) in a.u.iter().zip(&b.u) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn auxiliaries_stay_confined() {
        let g = build_grid(&[2.0, 2.0], 20.0, BoundaryY::HardWall).unwrap();
        let m = Medium::uniform(&g, 1.0, 1.0).unwrap();
        let spec = PmlSpec {
            x_hi: Some(AbsorberSide::pml(0.5, 2, 20.0)),
            y_hi: Some(AbsorberSide::pml(0.5, 2, 20.0)),
            ..Default::default()
        };
        let c = build_pml_maps(&g, &spec).unwrap();
        let mut s = FieldState::with_auxiliaries(&g);
        for (k, u) in s.u.iter_mut().enumerate() {
            *u = ((k * 7919) % 101) as f64 / 101.0 - 0.5;
        }
        for _ in 0..200 {
            step_pml(&mut s, &m, &c, &g, 0.02);
        }
        for j in 0..g.ny {
            for i in 0..g.nx {
                let k = g.idx(i, j);
                if c.sigma_x_u[i] == 0.0 {
                    assert_eq!(s.psi_y[k], 0.0);
                }
                if c.sigma_y_u[j] == 0.0 {
                    assert_eq!(s.psi_x[k], 0.0);
                }
                if c.sigma_x_u[i] * c.sigma_y_u[j] == 0.0 {
                    assert_eq!(s.phi[k], 0.0);
                }
            }
        }
        assert!(s.psi_x.iter().any(|&v| v != 0.0));
        assert!(s.phi.iter().any(|&v| v != 0.0));
    }
}
