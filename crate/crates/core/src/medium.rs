//! Material coefficients of the first-order system
//! `du/dt = b div v`, `dv/dt = a grad u`, with local speed `c = sqrt(a b)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    pub a: f64,
    pub b: f64,
}

impl Material {
    pub const VACUUM: Material = Material { a: 1.0, b: 1.0 };

    pub fn speed(&self) -> f64 {
        (self.a * self.b).sqrt()
    }

    fn validate(&self) -> Result<()> {
        if self.a > 0.0 && self.b > 0.0 && self.a.is_finite() && self.b.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "material coefficients must be positive and finite, got a={}, b={}",
                self.a, self.b
            )))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub x: [f64; 2],
    /// Omitted in 1D.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<[f64; 2]>,
    pub a: f64,
    pub b: f64,
}

impl Rect {
    fn contains(&self, x: f64, y: f64) -> bool {
        let in_y = self.y.is_none_or(|[y0, y1]| y >= y0 && y < y1);
        x >= self.x[0] && x < self.x[1] && in_y
    }
}

/// Medium description in physical coordinates. Every variant is defined on
/// the whole plane, so a grid may be enlarged without redefining it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MediumSpec {
    Uniform {
        a: f64,
        b: f64,
    },
    /// x-invariant slab waveguide: `core` for `core_y[0] <= y < core_y[1]`.
    Waveguide {
        background: Material,
        core: Material,
        core_y: [f64; 2],
    },
    /// Piecewise-constant rectangles over a background; later entries win.
    Rectangles {
        background: Material,
        rects: Vec<Rect>,
    },
}

impl Default for MediumSpec {
    fn default() -> Self {
        MediumSpec::Uniform { a: 1.0, b: 1.0 }
    }
}

impl MediumSpec {
    pub fn material_at(&self, x: f64, y: f64) -> Material {
        match self {
            MediumSpec::Uniform { a, b } => Material { a: *a, b: *b },
            MediumSpec::Waveguide {
                background,
                core,
                core_y,
            } => {
                if y >= core_y[0] && y < core_y[1] {
                    *core
                } else {
                    *background
                }
            }
            MediumSpec::Rectangles { background, rects } => rects
                .iter()
                .rev()
                .find(|r| r.contains(x, y))
                .map_or(*background, |r| Material { a: r.a, b: r.b }),
        }
    }

    fn materials(&self) -> Vec<Material> {
        match self {
            MediumSpec::Uniform { a, b } => vec![Material { a: *a, b: *b }],
            MediumSpec::Waveguide {
                background, core, ..
            } => vec![*background, *core],
            MediumSpec::Rectangles { background, rects } => std::iter::once(*background)
                .chain(rects.iter().map(|r| Material { a: r.a, b: r.b }))
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.materials().iter().try_for_each(Material::validate)
    }

    /// Largest phase speed of any material in the description.
    pub fn c_max(&self) -> f64 {
        self.materials()
            .iter()
            .map(Material::speed)
            .fold(0.0, f64::max)
    }
}

/// Sampled coefficients: `a` at the faces of each velocity component, `b`
/// at cell centers. Discontinuities are sampled pointwise.
#[derive(Clone, Debug, PartialEq)]
pub struct Medium {
    /// `(nx + 1) * ny` samples on x-faces.
    pub a_x: Vec<f64>,
    /// `nx * n_faces_y` samples on y-faces (empty in 1D).
    pub a_y: Vec<f64>,
    /// `nx * ny` samples at cell centers.
    pub b: Vec<f64>,
}

impl Medium {
    pub fn from_fn(grid: &Grid, f: impl Fn(f64, f64) -> Material) -> Result<Self> {
        let nfx = grid.n_faces_x();
        let nfy = grid.n_faces_y();
        let mut a_x = Vec::with_capacity(nfx * grid.ny);
        let mut b = Vec::with_capacity(grid.n_cells());
        for j in 0..grid.ny {
            let y = grid.cell_y(j);
            for i in 0..nfx {
                a_x.push(f(grid.face_x(i), y).a);
            }
            for i in 0..grid.nx {
                b.push(f(grid.cell_x(i), y).b);
            }
        }
        let mut a_y = Vec::with_capacity(grid.nx * nfy);
        for j in 0..nfy {
            let y = grid.face_y(j);
            for i in 0..grid.nx {
                a_y.push(f(grid.cell_x(i), y).a);
            }
        }
        let medium = Medium { a_x, a_y, b };
        medium.validate()?;
        Ok(medium)
    }

    pub fn uniform(grid: &Grid, a: f64, b: f64) -> Result<Self> {
        Self::from_fn(grid, |_, _| Material { a, b })
    }

    pub fn from_spec(grid: &Grid, spec: &MediumSpec) -> Result<Self> {
        spec.validate()?;
        Self::from_fn(grid, |x, y| spec.material_at(x, y))
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: &f64| *v > 0.0 && v.is_finite();
        if self.a_x.iter().chain(&self.a_y).chain(&self.b).all(ok) {
            Ok(())
        } else {
            Err(Error::InvalidArgument(
                "medium coefficients must be positive and finite".into(),
            ))
        }
    }

    /// Maximum of `sqrt(a b)` with `a` interpolated to cell centers.
    pub fn c_max(&self, grid: &Grid) -> f64 {
        let nfx = grid.n_faces_x();
        let mut c_max: f64 = 0.0;
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let mut a = 0.5 * (self.a_x[j * nfx + i] + self.a_x[j * nfx + i + 1]);
                if grid.is_2d() {
                    let up = if grid.periodic_y() {
                        (j + 1) % grid.ny
                    } else {
                        j + 1
                    };
                    let a_y = 0.5 * (self.a_y[grid.idx(i, j)] + self.a_y[grid.idx(i, up)]);
                    a = a.max(a_y);
                }
                c_max = c_max.max((a * self.b[grid.idx(i, j)]).sqrt());
            }
        }
        c_max
    }
}

/// Leap-frog time step `safety * min(dx, dy) / (c_max sqrt(dim))`.
pub fn cfl_dt(grid: &Grid, medium: &Medium, safety: f64) -> Result<f64> {
    if !(safety > 0.0 && safety <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "CFL safety must lie in (0, 1], got {safety}"
        )));
    }
    medium.validate()?;
    let h = if grid.is_2d() {
        grid.dx.min(grid.dy)
    } else {
        grid.dx
    };
    Ok(safety * h / (medium.c_max(grid) * (grid.dim as f64).sqrt()))
}
