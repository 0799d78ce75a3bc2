use crate::field::FieldState;
use crate::grid::Grid;
use crate::medium::Medium;
use crate::pml::PmlCoefficients;

/// `sum u^2 / (2b) dV + sum v^2 / (2a) dV`, pairing `v(t - dt/2)` with `u(t)`.
pub fn discrete_energy(state: &FieldState, medium: &Medium, grid: &Grid) -> f64 {
    energy_where(state, medium, grid, |_| true, |_, _| true, |_, _| true)
}

/// Energy restricted to the locations where no absorber is active.
pub fn interior_energy(
    state: &FieldState,
    medium: &Medium,
    grid: &Grid,
    coeffs: &PmlCoefficients,
) -> f64 {
    let quiet_y = |j: usize| !grid.is_2d() || coeffs.y_is_quiet_u(j);
    energy_where(
        state,
        medium,
        grid,
        |c| coeffs.x_is_quiet_u(c % grid.nx) && quiet_y(c / grid.nx),
        |i, j| coeffs.x_is_quiet_v(i) && quiet_y(j),
        |i, j| coeffs.x_is_quiet_u(i) && coeffs.y_is_quiet_v(j),
    )
}

fn energy_where(
    state: &FieldState,
    medium: &Medium,
    grid: &Grid,
    cell: impl Fn(usize) -> bool,
    face_x: impl Fn(usize, usize) -> bool,
    face_y: impl Fn(usize, usize) -> bool,
) -> f64 {
    let mut e = 0.0;
    for (c, (u, b)) in state.u.iter().zip(&medium.b).enumerate() {
        if cell(c) {
            e += u * u / (2.0 * b);
        }
    }
    let nfx = grid.n_faces_x();
    for (f, (v, a)) in state.v_x.iter().zip(&medium.a_x).enumerate() {
        if face_x(f % nfx, f / nfx) {
            e += v * v / (2.0 * a);
        }
    }
    for (f, (v, a)) in state.v_y.iter().zip(&medium.a_y).enumerate() {
        if face_y(f % grid.nx, f / grid.nx) {
            e += v * v / (2.0 * a);
        }
    }
    e * grid.dv()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, BoundaryY};

    #[test]
    fn zero_state_has_zero_energy() {
        let g = build_grid(&[1.0, 1.0], 10.0, BoundaryY::HardWall).unwrap();
        let m = Medium::uniform(&g, 1.0, 1.0).unwrap();
        assert_eq!(discrete_energy(&FieldState::zeros(&g), &m, &g), 0.0);
    }

    #[test]
    fn constant_u_energy() {
        let g = build_grid(&[10.0], 10.0, BoundaryY::HardWall).unwrap();
        let m = Medium::uniform(&g, 1.0, 1.0).unwrap();
        let mut s = FieldState::zeros(&g);
        s.u.fill(1.0);
        assert!((discrete_energy(&s, &m, &g) - 5.0).abs() < 1e-12);
    }
}
