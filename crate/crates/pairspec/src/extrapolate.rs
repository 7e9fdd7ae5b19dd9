//! Richardson extrapolation of eigenvalue sequences under mesh refinement.

use serde::Serialize;

use crate::error::{PairspecError, Result};

/// Why the fitted model was not used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtrapolationWarning {
    /// Successive differences change sign; the finest value is returned.
    NonMonotone,
    /// Successive differences vanish; the order cannot be fitted.
    Indeterminate,
    /// Differences grow under refinement; the finest value is returned.
    Diverging,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extrapolation {
    pub limit: f64,
    /// Fitted `p` of `λ(h) = λ* + C h^p`.
    pub order: Option<f64>,
    /// `|limit - finest value|`.
    pub error_estimate: f64,
    pub warning: Option<ExtrapolationWarning>,
}

/// Fits `λ(h) = λ* + C h^p` through the three finest `(spacing, value)`
/// points. Spacings must be strictly decreasing; they need not be in a
/// constant ratio.
pub fn extrapolate(spacings: &[f64], values: &[f64]) -> Result<Extrapolation> {
    if spacings.len() != values.len() {
        return Err(PairspecError::Input(format!(
            "{} spacings for {} values",
            spacings.len(),
            values.len()
        )));
    }
    if spacings.len() < 3 {
        return Err(PairspecError::Input(
            "extrapolation needs at least three spacings".into(),
        ));
    }
    if spacings.windows(2).any(|w| !(w[1] < w[0] && w[1] > 0.0)) {
        return Err(PairspecError::Input(
            "spacings must be positive and strictly decreasing".into(),
        ));
    }
    let n = values.len();
    let finest = values[n - 1];
    let raw = |warning| Extrapolation {
        limit: finest,
        order: None,
        error_estimate: 0.0,
        warning: Some(warning),
    };

    let diffs: Vec<f64> = values.windows(2).map(|w| w[0] - w[1]).collect();
    let scale = values
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let negligible = |d: f64| d.abs() <= 1e-13 * scale;
    if diffs.iter().all(|&d| negligible(d)) {
        return Ok(raw(ExtrapolationWarning::Indeterminate));
    }
    let sign = diffs
        .iter()
        .find(|d| !negligible(**d))
        .map_or(0.0, |d| d.signum());
    if diffs.iter().any(|&d| !negligible(d) && d.signum() != sign) {
        return Ok(raw(ExtrapolationWarning::NonMonotone));
    }

    let [h1, h2, h3] = [spacings[n - 3], spacings[n - 2], spacings[n - 1]];
    let (d12, d23) = (values[n - 3] - values[n - 2], values[n - 2] - finest);
    if negligible(d23) || negligible(d12) {
        return Ok(raw(ExtrapolationWarning::Indeterminate));
    }
    let rho = d12 / d23;
    let model = |p: f64| (h1.powf(p) - h2.powf(p)) / (h2.powf(p) - h3.powf(p));
    // the model ratio increases with p from its p -> 0 limit
    let (mut lo, mut hi) = (1e-6, 32.0);
    if rho.is_nan() || rho <= model(lo) {
        return Ok(raw(ExtrapolationWarning::Diverging));
    }
    if rho >= model(hi) {
        lo = hi;
    } else {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if model(mid) < rho {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let p = 0.5 * (lo + hi.max(lo));
    let c = d23 / (h2.powf(p) - h3.powf(p));
    let limit = finest - c * h3.powf(p);
    Ok(Extrapolation {
        limit,
        order: Some(p),
        error_estimate: (limit - finest).abs(),
        warning: None,
    })
}
