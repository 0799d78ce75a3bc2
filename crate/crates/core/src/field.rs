use crate::grid::Grid;

/// Unknowns of the staggered scheme.
///
/// `u` is held at integer time levels, `v_x`/`v_y` at half-integer levels:
/// between steps, `u` is at `t = step * dt` and `v` at `t - dt / 2`.
/// The auxiliary PML fields live at cell centers and are empty unless the
/// state was created with [`FieldState::with_auxiliaries`].
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub u: Vec<f64>,
    pub v_x: Vec<f64>,
    pub v_y: Vec<f64>,
    pub psi_x: Vec<f64>,
    pub psi_y: Vec<f64>,
    pub phi: Vec<f64>,
    pub step: u64,
}

impl FieldState {
    pub fn zeros(grid: &Grid) -> Self {
        FieldState {
            u: vec![0.0; grid.n_cells()],
            v_x: vec![0.0; grid.n_faces_x() * grid.ny],
            v_y: vec![0.0; grid.nx * grid.n_faces_y()],
            psi_x: Vec::new(),
            psi_y: Vec::new(),
            phi: Vec::new(),
            step: 0,
        }
    }

    /// Zero state with auxiliary fields allocated (2D only; the 1D
    /// stretched equations need none).
    pub fn with_auxiliaries(grid: &Grid) -> Self {
        let mut s = Self::zeros(grid);
        s.allocate_auxiliaries(grid);
        s
    }

    pub fn allocate_auxiliaries(&mut self, grid: &Grid) {
        if grid.is_2d() && !self.has_auxiliaries() {
            let n = grid.n_cells();
            self.psi_x = vec![0.0; n];
            self.psi_y = vec![0.0; n];
            self.phi = vec![0.0; n];
        }
    }

    pub fn has_auxiliaries(&self) -> bool {
        !self.phi.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        [
            &self.u,
            &self.v_x,
            &self.v_y,
            &self.psi_x,
            &self.psi_y,
            &self.phi,
        ]
        .iter()
        .all(|f| f.iter().all(|x| x.is_finite()))
    }

    /// `alpha * self + beta * other`, componentwise.
    pub fn combine(&self, alpha: f64, other: &FieldState, beta: f64) -> FieldState {
        let mix = |a: &[f64], b: &[f64]| -> Vec<f64> {
            a.iter().zip(b).map(|(x, y)| alpha * x + beta * y).collect()
        };
        FieldState {
            u: mix(&self.u, &other.u),
            v_x: mix(&self.v_x, &other.v_x),
            v_y: mix(&self.v_y, &other.v_y),
            psi_x: mix(&self.psi_x, &other.psi_x),
            psi_y: mix(&self.psi_y, &other.psi_y),
            phi: mix(&self.phi, &other.phi),
            step: self.step,
        }
    }

    /// Value of `u` at a physical point, bilinearly interpolated between
    /// cell centers. Points outside the outermost centers interpolate
    /// towards the zero ghost values.
    pub fn sample_u(&self, grid: &Grid, x: f64, y: f64) -> f64 {
        let fx = grid.frac_x(x);
        let i0 = fx.floor();
        let tx = fx - i0;
        let i0 = i0 as isize;
        let get_x = |j: usize, i: isize| -> f64 {
            if i < 0 || i >= grid.nx as isize {
                0.0
            } else {
                self.u[grid.idx(i as usize, j)]
            }
        };
        if !grid.is_2d() {
            return (1.0 - tx) * get_x(0, i0) + tx * get_x(0, i0 + 1);
        }
        let fy = grid.frac_y(y);
        let j0 = fy.floor();
        let ty = fy - j0;
        let j0 = j0 as isize;
        let ny = grid.ny as isize;
        let row = |j: isize| -> f64 {
            let j = if grid.periodic_y() {
                Some(j.rem_euclid(ny))
            } else if (0..ny).contains(&j) {
                Some(j)
            } else {
                None
            };
            match j {
                Some(j) => (1.0 - tx) * get_x(j as usize, i0) + tx * get_x(j as usize, i0 + 1),
                None => 0.0,
            }
        };
        (1.0 - ty) * row(j0) + ty * row(j0 + 1)
    }
}
