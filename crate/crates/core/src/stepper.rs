//! Unstretched leap-frog update.
//!
//! One cycle advances `v` from `t - dt/2` to `t + dt/2` using `grad u(t)`,
//! then `u` from `t` to `t + dt` using `div v(t + dt/2)`. Hard walls hold
//! `u = 0` in the ghost cells; periodic `y` wraps indices.
//!
//! The PML steppers in [`crate::pml`] reduce to exactly these expressions
//! (same operations, same order) wherever `sigma = 0` and `kappa = 1`.

use crate::field::FieldState;
use crate::grid::Grid;
use crate::medium::Medium;

pub fn step_plain(state: &mut FieldState, medium: &Medium, grid: &Grid, dt: f64) {
    update_v_plain(state, medium, grid, dt);
    if grid.is_2d() {
        let inv_dx = 1.0 / grid.dx;
        let inv_dy = 1.0 / grid.dy;
        let nfx = grid.n_faces_x();
        for j in 0..grid.ny {
            let up = y_face_above(grid, j);
            for i in 0..grid.nx {
                let c = grid.idx(i, j);
                let dvx = (state.v_x[j * nfx + i + 1] - state.v_x[j * nfx + i]) * inv_dx;
                let dvy = (state.v_y[grid.idx(i, up)] - state.v_y[c]) * inv_dy;
                state.u[c] += dt * (medium.b[c] * (dvx + dvy));
            }
        }
    } else {
        let inv_dx = 1.0 / grid.dx;
        for i in 0..grid.nx {
            let dvx = (state.v_x[i + 1] - state.v_x[i]) * inv_dx;
            state.u[i] += dt * (medium.b[i] * dvx);
        }
    }
    state.step += 1;
}

/// `v += dt a grad u` on every face. Shared by the plain stepper and the
/// scalar (non-PML) absorber, which leaves `v` undamped.
pub(crate) fn update_v_plain(state: &mut FieldState, medium: &Medium, grid: &Grid, dt: f64) {
    let inv_dx = 1.0 / grid.dx;
    let nfx = grid.n_faces_x();
    for j in 0..grid.ny {
        let row = &state.u[j * grid.nx..(j + 1) * grid.nx];
        for i in 0..nfx {
            let g = (u_at(row, i as isize) - u_at(row, i as isize - 1)) * inv_dx;
            let f = j * nfx + i;
            state.v_x[f] += dt * medium.a_x[f] * g;
        }
    }
    if grid.is_2d() {
        let inv_dy = 1.0 / grid.dy;
        for j in 0..grid.n_faces_y() {
            let (below, above) = y_neighbours(grid, j);
            for i in 0..grid.nx {
                let g = (cell_or_ghost(state, grid, i, above)
                    - cell_or_ghost(state, grid, i, below))
                    * inv_dy;
                let f = grid.idx(i, j);
                state.v_y[f] += dt * medium.a_y[f] * g;
            }
        }
    }
}

#[inline]
pub(crate) fn u_at(row: &[f64], i: isize) -> f64 {
    if i < 0 || i as usize >= row.len() {
        0.0
    } else {
        row[i as usize]
    }
}

/// Cell rows on either side of y-face `j`; `None` marks a hard-wall ghost.
#[inline]
pub(crate) fn y_neighbours(grid: &Grid, j: usize) -> (Option<usize>, Option<usize>) {
    if grid.periodic_y() {
        (Some((j + grid.ny - 1) % grid.ny), Some(j))
    } else {
        (j.checked_sub(1), (j < grid.ny).then_some(j))
    }
}

/// Index of the y-face above cell row `j`.
#[inline]
pub(crate) fn y_face_above(grid: &Grid, j: usize) -> usize {
    if grid.periodic_y() {
        (j + 1) % grid.ny
    } else {
        j + 1
    }
}

#[inline]
pub(crate) fn cell_or_ghost(state: &FieldState, grid: &Grid, i: usize, j: Option<usize>) -> f64 {
    j.map_or(0.0, |j| state.u[grid.idx(i, j)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, BoundaryY};
    use crate::medium::cfl_dt;

    #[test]
    fn zero_state_is_fixed_point() {
        let g = build_grid(&[1.0, 1.0], 20.0, BoundaryY::HardWall).unwrap();
        let m = Medium::uniform(&g, 1.0, 1.0).unwrap();
        let dt = cfl_dt(&g, &m, 0.5).unwrap();
        let mut s = FieldState::zeros(&g);
        for _ in 0..50 {
            step_plain(&mut s, &m, &g, dt);
        }
        assert!(s.u.iter().chain(&s.v_x).chain(&s.v_y).all(|&x| x == 0.0));
        assert_eq!(s.step, 50);
    }

    #[test]
    fn constant_field_is_stationary_in_periodic_interior() {
        let g = build_grid(&[1.0, 1.0], 20.0, BoundaryY::Periodic).unwrap();
        let m = Medium::uniform(&g, 1.0, 1.0).unwrap();
        let mut s = FieldState::zeros(&g);
        s.u.fill(1.0);
        step_plain(&mut s, &m, &g, 0.01);
        // only faces touching the x hard walls see a gradient
        for j in 0..g.ny {
            for i in 1..g.nx {
                assert_eq!(s.v_x[j * g.n_faces_x() + i], 0.0);
            }
            for i in 1..g.nx - 1 {
                assert_eq!(s.u[g.idx(i, j)], 1.0);
            }
        }
        assert!(s.v_y.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn hard_wall_ghost_drives_boundary_faces() {
        let g = build_grid(&[1.0], 10.0, BoundaryY::HardWall).unwrap();
        let m = Medium::uniform(&g, 1.0, 1.0).unwrap();
        let mut s = FieldState::zeros(&g);
        s.u.fill(1.0);
        step_plain(&mut s, &m, &g, 0.01);
        assert!((s.v_x[0] - 0.1).abs() < 1e-15);
        assert!((s.v_x[10] + 0.1).abs() < 1e-15);
    }
}
