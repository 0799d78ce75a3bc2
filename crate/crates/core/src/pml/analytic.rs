//! Closed-form behaviour of the stretched coordinate, used as a reference
//! for the simulations.

use num_complex::Complex64;

/// `s = kappa + i sigma / omega`: `d x_stretched / dx` for one direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StretchFactor(pub Complex64);

impl StretchFactor {
    pub fn new(kappa: f64, sigma: f64, omega: f64) -> Self {
        StretchFactor(Complex64::new(kappa, sigma / omega))
    }

    /// Transformed derivative `d/dx -> (1/s) d/dx` applied to a spatial
    /// wavenumber.
    pub fn apply(&self, k: Complex64) -> Complex64 {
        k / self.0
    }
}

/// Amplitude ratio `exp(-(k_x / omega) int sigma)` of a propagating wave
/// after crossing a layer with the given conductivity integral.
pub fn attenuation_factor(k_x: f64, omega: f64, sigma_integral: f64) -> f64 {
    (-(k_x / omega) * sigma_integral).exp()
}

/// `k_x / omega = cos(theta) / c` for a plane wave at incidence angle `theta`.
pub fn kx_over_omega(theta: f64, c: f64) -> f64 {
    theta.cos() / c
}

/// Evanescent wave `exp(i k x_stretched)` with `k = i decay_rate`, evaluated
/// at depth `x` of a uniform layer with stretch `kappa + i sigma / omega`:
/// `exp(-decay_rate kappa x) exp(-i (sigma / omega) decay_rate x)`.
/// The magnitude does not depend on `sigma`.
pub fn evanescent_factor(decay_rate: f64, sigma: f64, omega: f64, kappa: f64, x: f64) -> Complex64 {
    let k = Complex64::new(0.0, decay_rate);
    let stretched_x = Complex64::new(kappa, sigma / omega) * x;
    (Complex64::i() * k * stretched_x).exp()
}
