use serde::Serialize;

use crate::error::{Error, Result};

/// Least-squares line through `(x, ln amplitude)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    /// d(ln amplitude)/dx, 1/length. Negative for decay along +x.
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination of the log-linear fit.
    pub r_squared: f64,
    pub span: (f64, f64),
    pub samples: usize,
}

pub const MIN_FIT_SAMPLES: usize = 8;

/// Fits `ln amplitude = slope x + intercept` over samples with `x` inside
/// `span` (inclusive).
pub fn fit_decay_rate(xs: &[f64], amplitudes: &[f64], span: (f64, f64)) -> Result<DecayFit> {
    if xs.len() != amplitudes.len() {
        return Err(Error::InvalidArgument(
            "positions and amplitudes differ in length".into(),
        ));
    }
    let (lo, hi) = (span.0.min(span.1), span.0.max(span.1));
    let mut pts = Vec::new();
    for (&x, &a) in xs.iter().zip(amplitudes) {
        if x >= lo && x <= hi {
            if a.is_nan() || a <= 0.0 {
                return Err(Error::Measurement(format!(
                    "non-positive amplitude {a} at x = {x} inside the fit span"
                )));
            }
            pts.push((x, a.ln()));
        }
    }
    if pts.len() < MIN_FIT_SAMPLES {
        return Err(Error::Measurement(format!(
            "{} samples in fit span, need at least {MIN_FIT_SAMPLES}",
            pts.len()
        )));
    }
    let (slope, intercept, r_squared) = linear_fit(&pts);
    Ok(DecayFit {
        slope,
        intercept,
        r_squared,
        span: (lo, hi),
        samples: pts.len(),
    })
}

/// Ordinary least squares; returns `(slope, intercept, R^2)`. A perfectly
/// flat response has `R^2 = 1` by convention.
pub fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    // Shifting by the first point keeps constant data exactly flat.
    let (x0, y0) = pts[0];
    let pts: Vec<(f64, f64)> = pts.iter().map(|p| (p.0 - x0, p.1 - y0)).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx + y0 - slope * x0;
    let ss_res: f64 = pts
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum();
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let r2 = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    (slope, intercept, r2)
}

/// Fit of `y = slope x` through the origin; returns `(slope, R^2)` with
/// `R^2` measured against the mean of `y`.
pub fn fit_through_origin(pts: &[(f64, f64)]) -> (f64, f64) {
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let slope = sxy / sxx;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let ss_res: f64 = pts.iter().map(|p| (p.1 - slope * p.0).powi(2)).sum();
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    (
        slope,
        if ss_tot == 0.0 {
            1.0
        } else {
            1.0 - ss_res / ss_tot
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|k| k as f64 * 0.1).collect()
    }

    #[test]
    fn exact_exponential() {
        let xs = grid(20);
        let amps: Vec<f64> = xs.iter().map(|x| (-2.0 * x).exp()).collect();
        let fit = fit_decay_rate(&xs, &amps, (0.0, 2.0)).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-9);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_samples() {
        let xs = grid(10);
        let fit = fit_decay_rate(&xs, &[3.0; 10], (0.0, 1.0)).unwrap();
        assert_eq!(fit.slope, 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        let xs = grid(10);
        let mut amps = vec![1.0; 10];
        amps[4] = 0.0;
        assert!(fit_decay_rate(&xs, &amps, (0.0, 1.0)).is_err());
        assert!(fit_decay_rate(&xs, &[1.0; 10], (0.0, 0.5)).is_err());
        // zero outside the span is fine
        assert!(fit_decay_rate(&xs, &amps, (0.5, 1.0)).is_err());
        let mut amps2 = vec![1.0; 20];
        amps2[0] = 0.0;
        assert!(fit_decay_rate(&grid(20), &amps2, (0.1, 1.9)).is_ok());
    }

    #[test]
    fn origin_fit() {
        let pts = [(1.0, 2.0), (0.5, 1.0), (0.0, 0.0)];
        let (s, r2) = fit_through_origin(&pts);
        assert!((s - 2.0).abs() < 1e-15);
        assert!((r2 - 1.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn recovers_own_model(slope in -20.0f64..20.0, intercept in -5.0f64..5.0) {
            let xs: Vec<f64> = (0..30).map(|k| 0.5 + k as f64 * 0.03).collect();
            let amps: Vec<f64> = xs.iter().map(|x| (slope * x + intercept).exp()).collect();
            let fit = fit_decay_rate(&xs, &amps, (0.5, 1.5)).unwrap();
            prop_assert!((fit.slope - slope).abs() <= 1e-9 * slope.abs().max(1.0));
            prop_assert!((fit.intercept - intercept).abs() <= 1e-9 * intercept.abs().max(1.0));
        }
    }
}
