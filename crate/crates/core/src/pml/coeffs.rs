use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::pml::profile::{kappa_profile, sigma_profile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum AbsorberMode {
    /// Stretched-coordinate PML.
    #[default]
    Pml,
    /// Plain conductivity on `u` only.
    NonpmlScalar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    XLo,
    XHi,
    YLo,
    YHi,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::XLo, Side::XHi, Side::YLo, Side::YHi];

    pub fn name(self) -> &'static str {
        match self {
            Side::XLo => "x_lo",
            Side::XHi => "x_hi",
            Side::YLo => "y_lo",
            Side::YHi => "y_hi",
        }
    }

    pub fn is_x(self) -> bool {
        matches!(self, Side::XLo | Side::XHi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsorberSide {
    pub thickness: f64,
    pub degree: u32,
    pub sigma_max: f64,
    pub kappa_max: f64,
    pub mode: AbsorberMode,
}

impl AbsorberSide {
    pub fn pml(thickness: f64, degree: u32, sigma_max: f64) -> Self {
        AbsorberSide {
            thickness,
            degree,
            sigma_max,
            kappa_max: 1.0,
            mode: AbsorberMode::Pml,
        }
    }
}

/// Per-side absorber layout; `None` means a bare hard wall.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PmlSpec {
    pub x_lo: Option<AbsorberSide>,
    pub x_hi: Option<AbsorberSide>,
    pub y_lo: Option<AbsorberSide>,
    pub y_hi: Option<AbsorberSide>,
}

impl PmlSpec {
    pub fn get(&self, side: Side) -> Option<&AbsorberSide> {
        match side {
            Side::XLo => self.x_lo.as_ref(),
            Side::XHi => self.x_hi.as_ref(),
            Side::YLo => self.y_lo.as_ref(),
            Side::YHi => self.y_hi.as_ref(),
        }
        .filter(|s| s.thickness > 0.0)
    }

    pub fn get_mut(&mut self, side: Side) -> &mut Option<AbsorberSide> {
        match side {
            Side::XLo => &mut self.x_lo,
            Side::XHi => &mut self.x_hi,
            Side::YLo => &mut self.y_lo,
            Side::YHi => &mut self.y_hi,
        }
    }

    pub fn sides(&self) -> impl Iterator<Item = (Side, &AbsorberSide)> {
        Side::ALL
            .into_iter()
            .filter_map(|s| self.get(s).map(|a| (s, a)))
    }

    /// The common mode of all active sides.
    pub fn mode(&self) -> Result<Option<AbsorberMode>> {
        let mut mode = None;
        for (side, a) in self.sides() {
            match mode {
                None => mode = Some(a.mode),
                Some(m) if m != a.mode => {
                    return Err(Error::InvalidAbsorber(format!(
                        "side {} uses {:?} but another side uses {m:?}; modes cannot be mixed",
                        side.name(),
                        a.mode
                    )))
                }
                _ => {}
            }
        }
        Ok(mode)
    }

    /// Physical span `[lo, hi]` covered by a side's absorber.
    pub fn span(&self, grid: &Grid, side: Side) -> Option<(f64, f64)> {
        let a = self.get(side)?;
        Some(match side {
            Side::XLo => (grid.x_min, grid.x_min + a.thickness),
            Side::XHi => (grid.x_max() - a.thickness, grid.x_max()),
            Side::YLo => (grid.y_min, grid.y_min + a.thickness),
            Side::YHi => (grid.y_max() - a.thickness, grid.y_max()),
        })
    }

    /// Whether `(x, y)` lies strictly inside any absorber span.
    pub fn contains(&self, grid: &Grid, x: f64, y: f64) -> bool {
        self.sides().any(|(side, _)| {
            let (lo, hi) = self.span(grid, side).unwrap();
            let c = if side.is_x() { x } else { y };
            c > lo && c < hi
        })
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        for side in Side::ALL {
            let Some(a) = (match side {
                Side::XLo => self.x_lo.as_ref(),
                Side::XHi => self.x_hi.as_ref(),
                Side::YLo => self.y_lo.as_ref(),
                Side::YHi => self.y_hi.as_ref(),
            }) else {
                continue;
            };
            let bad = |msg: String| Err(Error::InvalidAbsorber(format!("{}: {msg}", side.name())));
            if !(a.thickness >= 0.0 && a.thickness.is_finite()) {
                return bad(format!("thickness must be >= 0, got {}", a.thickness));
            }
            if !(a.sigma_max >= 0.0 && a.sigma_max.is_finite()) {
                return bad(format!("sigma_max must be >= 0, got {}", a.sigma_max));
            }
            if !(a.kappa_max >= 1.0 && a.kappa_max.is_finite()) {
                return bad(format!("kappa_max must be >= 1, got {}", a.kappa_max));
            }
            if a.mode == AbsorberMode::NonpmlScalar && a.kappa_max != 1.0 {
                return bad("the scalar absorber has no real stretch; kappa_max must be 1".into());
            }
            if a.thickness > 0.0 && !side.is_x() {
                if !grid.is_2d() {
                    return bad("y absorbers need a 2D grid".into());
                }
                if grid.periodic_y() {
                    return bad("y absorbers are incompatible with periodic y".into());
                }
            }
        }
        let total = |lo: Option<&AbsorberSide>, hi: Option<&AbsorberSide>| {
            lo.map_or(0.0, |a| a.thickness) + hi.map_or(0.0, |a| a.thickness)
        };
        let x_extent = grid.nx as f64 * grid.dx;
        if total(self.get(Side::XLo), self.get(Side::XHi)) > x_extent * (1.0 + 1e-12) {
            return Err(Error::InvalidAbsorber("x absorber spans overlap".into()));
        }
        if grid.is_2d() {
            let y_extent = grid.ny as f64 * grid.dy;
            if total(self.get(Side::YLo), self.get(Side::YHi)) > y_extent * (1.0 + 1e-12) {
                return Err(Error::InvalidAbsorber("y absorber spans overlap".into()));
            }
        }
        self.mode()?;
        Ok(())
    }
}

/// Absorber coefficients sampled at each field's own staggered location.
/// `sigma_x` depends on `x` only and `sigma_y` on `y` only, so they are
/// stored per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct PmlCoefficients {
    pub mode: AbsorberMode,
    /// At cell centers, length `nx`.
    pub sigma_x_u: Vec<f64>,
    pub kappa_x_u: Vec<f64>,
    /// At x-faces, length `nx + 1`.
    pub sigma_x_v: Vec<f64>,
    pub kappa_x_v: Vec<f64>,
    /// At cell centers, length `ny`.
    pub sigma_y_u: Vec<f64>,
    pub kappa_y_u: Vec<f64>,
    /// At y-faces, length `n_faces_y`.
    pub sigma_y_v: Vec<f64>,
    pub kappa_y_v: Vec<f64>,
}

impl PmlCoefficients {
    /// No absorption anywhere.
    pub fn none(grid: &Grid) -> Self {
        PmlCoefficients {
            mode: AbsorberMode::Pml,
            sigma_x_u: vec![0.0; grid.nx],
            kappa_x_u: vec![1.0; grid.nx],
            sigma_x_v: vec![0.0; grid.n_faces_x()],
            kappa_x_v: vec![1.0; grid.n_faces_x()],
            sigma_y_u: vec![0.0; grid.ny],
            kappa_y_u: vec![1.0; grid.ny],
            sigma_y_v: vec![0.0; grid.n_faces_y()],
            kappa_y_v: vec![1.0; grid.n_faces_y()],
        }
    }

    pub fn x_is_quiet_u(&self, i: usize) -> bool {
        self.sigma_x_u[i] == 0.0 && self.kappa_x_u[i] == 1.0
    }

    pub fn x_is_quiet_v(&self, i: usize) -> bool {
        self.sigma_x_v[i] == 0.0 && self.kappa_x_v[i] == 1.0
    }

    pub fn y_is_quiet_u(&self, j: usize) -> bool {
        self.sigma_y_u[j] == 0.0 && self.kappa_y_u[j] == 1.0
    }

    pub fn y_is_quiet_v(&self, j: usize) -> bool {
        self.sigma_y_v[j] == 0.0 && self.kappa_y_v[j] == 1.0
    }

    /// True when every coefficient is `sigma = 0, kappa = 1`.
    pub fn is_trivial(&self) -> bool {
        let zero = |v: &[f64]| v.iter().all(|&s| s == 0.0);
        let one = |v: &[f64]| v.iter().all(|&k| k == 1.0);
        zero(&self.sigma_x_u)
            && zero(&self.sigma_x_v)
            && zero(&self.sigma_y_u)
            && zero(&self.sigma_y_v)
            && one(&self.kappa_x_u)
            && one(&self.kappa_x_v)
            && one(&self.kappa_y_u)
            && one(&self.kappa_y_v)
    }

    /// Named coefficient arrays, in a fixed order.
    pub fn arrays(&self) -> [(&'static str, &[f64]); 8] {
        [
            ("sigma_x_u", &self.sigma_x_u),
            ("kappa_x_u", &self.kappa_x_u),
            ("sigma_x_v", &self.sigma_x_v),
            ("kappa_x_v", &self.kappa_x_v),
            ("sigma_y_u", &self.sigma_y_u),
            ("kappa_y_u", &self.kappa_y_u),
            ("sigma_y_v", &self.sigma_y_v),
            ("kappa_y_v", &self.kappa_y_v),
        ]
    }
}

/// Samples `(sigma, kappa)` at coordinate `c` along one axis.
fn sample_axis(
    c: f64,
    lower: f64,
    upper: f64,
    lo: Option<&AbsorberSide>,
    hi: Option<&AbsorberSide>,
    tol: f64,
) -> Result<(f64, f64)> {
    let depth = |a: &AbsorberSide, d: f64| -> Result<Option<(f64, f64)>> {
        if d <= tol {
            return Ok(None);
        }
        let xi = (d / a.thickness).min(1.0);
        Ok(Some((
            sigma_profile(xi, a.degree, a.sigma_max)?,
            kappa_profile(xi, a.degree, a.kappa_max),
        )))
    };
    if let Some(a) = lo {
        if let Some(v) = depth(a, lower + a.thickness - c)? {
            return Ok(v);
        }
    }
    if let Some(a) = hi {
        if let Some(v) = depth(a, c - (upper - a.thickness))? {
            return Ok(v);
        }
    }
    Ok((0.0, 1.0))
}

pub fn build_pml_maps(grid: &Grid, spec: &PmlSpec) -> Result<PmlCoefficients> {
    spec.validate(grid)?;
    let mut coeffs = PmlCoefficients::none(grid);
    coeffs.mode = spec.mode()?.unwrap_or_default();

    let (xl, xh) = (spec.get(Side::XLo), spec.get(Side::XHi));
    let tol_x = 1e-9 * grid.dx;
    for i in 0..grid.nx {
        (coeffs.sigma_x_u[i], coeffs.kappa_x_u[i]) =
            sample_axis(grid.cell_x(i), grid.x_min, grid.x_max(), xl, xh, tol_x)?;
    }
    for i in 0..grid.n_faces_x() {
        (coeffs.sigma_x_v[i], coeffs.kappa_x_v[i]) =
            sample_axis(grid.face_x(i), grid.x_min, grid.x_max(), xl, xh, tol_x)?;
    }
    if grid.is_2d() {
        let (yl, yh) = (spec.get(Side::YLo), spec.get(Side::YHi));
        let tol_y = 1e-9 * grid.dy;
        for j in 0..grid.ny {
            (coeffs.sigma_y_u[j], coeffs.kappa_y_u[j]) =
                sample_axis(grid.cell_y(j), grid.y_min, grid.y_max(), yl, yh, tol_y)?;
        }
        for j in 0..grid.n_faces_y() {
            (coeffs.sigma_y_v[j], coeffs.kappa_y_v[j]) =
                sample_axis(grid.face_y(j), grid.y_min, grid.y_max(), yl, yh, tol_y)?;
        }
    }
    Ok(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, BoundaryY};

    fn grid2() -> Grid {
        build_grid(&[2.0, 2.0], 10.0, BoundaryY::HardWall).unwrap()
    }

    #[test]
    fn interior_is_unstretched() {
        let g = grid2();
        let spec = PmlSpec {
            x_hi: Some(AbsorberSide::pml(0.5, 2, 10.0)),
            ..Default::default()
        };
        let c = build_pml_maps(&g, &spec).unwrap();
        assert_eq!(c.sigma_x_u[3], 0.0);
        assert_eq!(c.kappa_x_u[3], 1.0);
        // inner edge face sits exactly at depth 0
        assert_eq!(c.sigma_x_v[15], 0.0);
        assert!(c.sigma_x_v[16] > 0.0);
    }

    #[test]
    fn outermost_samples() {
        let g = grid2();
        let (l, smax) = (0.5, 10.0);
        let spec = PmlSpec {
            x_hi: Some(AbsorberSide::pml(l, 2, smax)),
            ..Default::default()
        };
        let c = build_pml_maps(&g, &spec).unwrap();
        let expected = smax * ((l - g.dx / 2.0) / l).powi(2);
        assert!((c.sigma_x_u[g.nx - 1] - expected).abs() < 1e-12);
        assert!((c.sigma_x_v[g.nx] - smax).abs() < 1e-12);
    }

    #[test]
    fn corner_has_both_sigmas() {
        let g = grid2();
        let spec = PmlSpec {
            x_hi: Some(AbsorberSide::pml(0.5, 2, 10.0)),
            y_hi: Some(AbsorberSide::pml(0.5, 2, 10.0)),
            ..Default::default()
        };
        let c = build_pml_maps(&g, &spec).unwrap();
        assert!(c.sigma_x_u[g.nx - 1] > 0.0 && c.sigma_y_u[g.ny - 1] > 0.0);
    }

    #[test]
    fn profiles_are_monotone_towards_walls() {
        let g = grid2();
        let mut side = AbsorberSide::pml(0.7, 3, 5.0);
        side.kappa_max = 3.0;
        let spec = PmlSpec {
            x_lo: Some(side),
            x_hi: Some(side),
            y_lo: Some(side),
            y_hi: Some(side),
        };
        let c = build_pml_maps(&g, &spec).unwrap();
        for v in [&c.sigma_x_v, &c.kappa_x_v, &c.sigma_y_u, &c.kappa_y_v] {
            let n = v.len();
            for k in n / 2..n - 1 {
                assert!(v[k + 1] >= v[k]);
            }
            for k in 0..n / 2 {
                assert!(v[k] >= v[k + 1]);
            }
        }
    }

    #[test]
    fn invalid_layouts_rejected() {
        let g = grid2();
        let overlap = PmlSpec {
            x_lo: Some(AbsorberSide::pml(1.2, 2, 1.0)),
            x_hi: Some(AbsorberSide::pml(1.0, 2, 1.0)),
            ..Default::default()
        };
        assert!(build_pml_maps(&g, &overlap).is_err());

        let mut mixed = PmlSpec {
            x_lo: Some(AbsorberSide::pml(0.5, 2, 1.0)),
            x_hi: Some(AbsorberSide::pml(0.5, 2, 1.0)),
            ..Default::default()
        };
        mixed.x_hi.as_mut().unwrap().mode = AbsorberMode::NonpmlScalar;
        assert!(build_pml_maps(&g, &mixed).is_err());

        let g1 = build_grid(&[2.0], 10.0, BoundaryY::HardWall).unwrap();
        let y_in_1d = PmlSpec {
            y_lo: Some(AbsorberSide::pml(0.5, 2, 1.0)),
            ..Default::default()
        };
        assert!(build_pml_maps(&g1, &y_in_1d).is_err());

        let gp = build_grid(&[2.0, 2.0], 10.0, BoundaryY::Periodic).unwrap();
        assert!(build_pml_maps(
            &gp,
            &PmlSpec {
                y_hi: Some(AbsorberSide::pml(0.5, 2, 1.0)),
                ..Default::default()
            }
        )
        .is_err());

        let mut bad_kappa = AbsorberSide::pml(0.5, 2, 1.0);
        bad_kappa.kappa_max = 0.5;
        assert!(build_pml_maps(
            &g,
            &PmlSpec {
                x_lo: Some(bad_kappa),
                ..Default::default()
            }
        )
        .is_err());
    }

    #[test]
    fn step_profile_excludes_inner_edge() {
        let g = build_grid(&[2.0], 10.0, BoundaryY::HardWall).unwrap();
        let spec = PmlSpec {
            x_lo: Some(AbsorberSide::pml(0.5, 0, 3.0)),
            ..Default::default()
        };
        let c = build_pml_maps(&g, &spec).unwrap();
        assert_eq!(c.sigma_x_v[5], 0.0);
        assert_eq!(c.sigma_x_v[4], 3.0);
        assert_eq!(c.sigma_x_u[4], 3.0);
        assert_eq!(c.sigma_x_u[5], 0.0);
    }
}
