//! Absorbing layers: profiles, coefficient maps, the stretched-coordinate
//! steppers and a scalar-conductivity baseline.
//!
//! The stretched equations can equally be read as an anisotropic absorbing
//! material: `a` becomes the diagonal tensor `diag(a / s_x, a / s_y)` (with
//! `s = kappa + i sigma / omega`) and `b` becomes `b / (s_x s_y)`. There is
//! no separate code path for that reading; [`step_pml`] integrates it.

mod analytic;
mod coeffs;
mod profile;
mod step;

pub use analytic::{attenuation_factor, evanescent_factor, kx_over_omega, StretchFactor};
pub use coeffs::{build_pml_maps, AbsorberMode, AbsorberSide, PmlCoefficients, PmlSpec, Side};
pub use profile::{kappa_profile, sigma_integral, sigma_max_for_round_trip, sigma_profile};
pub use step::{step_nonpml_absorber, step_pml};
