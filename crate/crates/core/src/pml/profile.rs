use crate::error::{Error, Result};

/// `sigma_max * xi^p` at relative depth `xi` into the layer.
/// `p = 0` gives a constant (step) profile.
pub fn sigma_profile(xi: f64, degree: u32, sigma_max: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::InvalidArgument(format!(
            "relative depth must lie in [0, 1], got {xi}"
        )));
    }
    if sigma_max.is_nan() || sigma_max < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "sigma_max must be non-negative, got {sigma_max}"
        )));
    }
    Ok(sigma_max * xi.powi(degree as i32))
}

/// Real stretch `1 + (kappa_max - 1) xi^p`, graded like sigma.
pub fn kappa_profile(xi: f64, degree: u32, kappa_max: f64) -> f64 {
    1.0 + (kappa_max - 1.0) * xi.powi(degree as i32)
}

/// Peak conductivity giving round-trip amplitude `r_target` at normal
/// incidence: `r = exp(-(2/c) int sigma)` with `int sigma = sigma_max L / (p + 1)`.
pub fn sigma_max_for_round_trip(r_target: f64, thickness: f64, degree: u32, c: f64) -> Result<f64> {
    if !(r_target > 0.0 && r_target <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "target reflection must lie in (0, 1], got {r_target}"
        )));
    }
    if !(thickness > 0.0 && c > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "thickness and speed must be positive, got L={thickness}, c={c}"
        )));
    }
    let s = -(degree as f64 + 1.0) * c * r_target.ln() / (2.0 * thickness);
    // ln(1) = 0 gives -0.0
    Ok(s + 0.0)
}

/// `int_0^L sigma dx` for the polynomial profile.
pub fn sigma_integral(thickness: f64, degree: u32, sigma_max: f64) -> f64 {
    sigma_max * thickness / (degree as f64 + 1.0)
}
