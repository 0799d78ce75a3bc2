//! Rectilinear staggered grid geometry.
//!
//! Layout (x shown, y is analogous):
//!
//! ```text
//!  ghost |  u[0]  |  u[1]  | ... | u[nx-1] | ghost
//!       vx[0]    vx[1]    vx[2] ...      vx[nx]
//! ```
//!
//! `u` lives at cell centers, `v_x` on the x-faces (face `i` sits between
//! `u[i-1]` and `u[i]`). Ghost cells beyond the outer faces hold `u = 0`.
//! In 2D, storage is row-major with `x` fastest: `u[j * nx + i]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryY {
    #[default]
    HardWall,
    Periodic,
}

/// Physical description of a grid, before discretization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    /// Physical extents; one entry per dimension.
    pub extent: Vec<f64>,
    /// Cells per unit length.
    pub resolution: f64,
    #[serde(default)]
    pub boundary_y: BoundaryY,
    /// Lower corner of the domain (defaults to the origin).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<Vec<f64>>,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        let mut grid = build_grid(&self.extent, self.resolution, self.boundary_y)?;
        if let Some(lower) = &self.lower {
            if lower.len() != self.dim {
                return Err(Error::InvalidGrid(format!(
                    "lower corner has {} entries, expected {}",
                    lower.len(),
                    self.dim
                )));
            }
            grid.x_min = lower[0];
            if self.dim == 2 {
                grid.y_min = lower[1];
            }
        }
        if grid.dim != self.dim {
            return Err(Error::InvalidGrid(format!(
                "dim = {} but {} extents given",
                self.dim,
                self.extent.len()
            )));
        }
        Ok(grid)
    }

    pub fn x_min(&self) -> f64 {
        self.lower.as_ref().map_or(0.0, |l| l[0])
    }

    pub fn y_min(&self) -> f64 {
        self.lower
            .as_ref()
            .and_then(|l| l.get(1).copied())
            .unwrap_or(0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub dim: usize,
    pub nx: usize,
    /// 1 in 1D.
    pub ny: usize,
    pub dx: f64,
    /// Equal to `dx` in 1D (unused).
    pub dy: f64,
    pub x_min: f64,
    pub y_min: f64,
    pub boundary_y: BoundaryY,
}

/// Builds a grid covering `[0, extent]` per axis with
/// `round(extent * resolution)` cells.
pub fn build_grid(extent: &[f64], resolution: f64, boundary_y: BoundaryY) -> Result<Grid> {
    let dim = extent.len();
    if !(1..=2).contains(&dim) {
        return Err(Error::InvalidGrid(format!(
            "dimension must be 1 or 2, got {dim}"
        )));
    }
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(Error::InvalidGrid(format!(
            "resolution must be positive, got {resolution}"
        )));
    }
    let cells = |e: f64, axis: &str| -> Result<(usize, f64)> {
        if !(e > 0.0 && e.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "{axis} extent must be positive, got {e}"
            )));
        }
        let n = (e * resolution).round() as usize;
        if n < 4 {
            return Err(Error::InvalidGrid(format!("n{axis} = {n} < 4")));
        }
        Ok((n, e / n as f64))
    };
    let (nx, dx) = cells(extent[0], "x")?;
    let (ny, dy) = if dim == 2 {
        cells(extent[1], "y")?
    } else {
        (1, dx)
    };
    Ok(Grid {
        dim,
        nx,
        ny,
        dx,
        dy,
        x_min: 0.0,
        y_min: 0.0,
        boundary_y: if dim == 2 {
            boundary_y
        } else {
            BoundaryY::HardWall
        },
    })
}

impl Grid {
    pub fn is_2d(&self) -> bool {
        self.dim == 2
    }

    pub fn periodic_y(&self) -> bool {
        self.is_2d() && self.boundary_y == BoundaryY::Periodic
    }

    pub fn x_max(&self) -> f64 {
        self.x_min + self.nx as f64 * self.dx
    }

    pub fn y_max(&self) -> f64 {
        if self.is_2d() {
            self.y_min + self.ny as f64 * self.dy
        } else {
            self.y_min
        }
    }

    /// Coordinate of cell (0,0)'s center.
    pub fn origin(&self) -> (f64, f64) {
        (self.cell_x(0), self.cell_y(0))
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    /// Number of x-faces per row.
    pub fn n_faces_x(&self) -> usize {
        self.nx + 1
    }

    /// Number of y-faces per column (0 in 1D).
    pub fn n_faces_y(&self) -> usize {
        match (self.dim, self.boundary_y) {
            (1, _) => 0,
            (_, BoundaryY::Periodic) => self.ny,
            (_, BoundaryY::HardWall) => self.ny + 1,
        }
    }

    pub fn cell_x(&self, i: usize) -> f64 {
        self.x_min + (i as f64 + 0.5) * self.dx
    }

    pub fn cell_y(&self, j: usize) -> f64 {
        if self.is_2d() {
            self.y_min + (j as f64 + 0.5) * self.dy
        } else {
            0.0
        }
    }

    pub fn face_x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx
    }

    pub fn face_y(&self, j: usize) -> f64 {
        self.y_min + j as f64 * self.dy
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Cell volume element.
    pub fn dv(&self) -> f64 {
        if self.is_2d() {
            self.dx * self.dy
        } else {
            self.dx
        }
    }

    /// Fractional cell-center index of a physical x coordinate.
    pub fn frac_x(&self, x: f64) -> f64 {
        (x - self.x_min) / self.dx - 0.5
    }

    pub fn frac_y(&self, y: f64) -> f64 {
        (y - self.y_min) / self.dy - 0.5
    }

    /// Nearest cell index to a physical point, or `None` outside the domain.
    pub fn nearest_cell(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        if !self.contains(x, y) {
            return None;
        }
        let i = ((x - self.x_min) / self.dx)
            .floor()
            .clamp(0.0, (self.nx - 1) as f64) as usize;
        let j = if self.is_2d() {
            ((y - self.y_min) / self.dy)
                .floor()
                .clamp(0.0, (self.ny - 1) as f64) as usize
        } else {
            0
        };
        Some((i, j))
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let in_x = x >= self.x_min && x <= self.x_max();
        let in_y = !self.is_2d() || (y >= self.y_min && y <= self.y_max());
        in_x && in_y
    }
}
