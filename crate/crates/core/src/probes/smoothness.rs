use serde::Serialize;

use super::{linear_fit, FitResult};
use crate::spectral::Field;

/// Coefficients below this fraction of the peak count as unresolved roundoff.
pub const RESOLVED_FLOOR: f64 = 1e-13;
/// Largest allowed top-quarter-band coefficient, relative to the peak.
pub const TOP_BAND_LIMIT: f64 = 1e-10;
pub const MIN_R_SQUARED: f64 = 0.99;

/// `|c_k|` folded over `k -> -k` (max of the pair), for `k = 0 .. N/2`.
fn folded_magnitudes(u: &Field) -> Vec<f64> {
    let c = u.spectrum();
    let n = c.len();
    (0..=n / 2)
        .map(|k| c[k].norm().max(c[(n - k) % n].norm()))
        .collect()
}

/// Largest coefficient with `|k| >= 3N/8`, relative to the largest coefficient.
pub fn top_band_ratio(u: &Field) -> f64 {
    let a = folded_magnitudes(u);
    let peak = a.iter().copied().fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    let start = 3 * (2 * (a.len() - 1)) / 8;
    a[start..].iter().copied().fold(0.0, f64::max) / peak
}

#[derive(Debug, Clone, Serialize)]
pub struct SmoothnessReport {
    /// Exponential rate `a` in `|c(xi)| ~ exp(-a xi)` (negated fit slope).
    pub decay_rate: f64,
    pub fit: FitResult,
    pub top_band_ratio: f64,
    /// Highest mode with `|c_k| >= RESOLVED_FLOOR * peak`.
    pub resolved_modes: usize,
    pub flagged: bool,
}

/// Fit `log|c_k|` against `xi_k` over the upper half of the resolved band.
pub fn probe_smoothness(u: &Field) -> SmoothnessReport {
    let a = folded_magnitudes(u);
    let peak = a.iter().copied().fold(0.0, f64::max);
    let dk = u.grid().base_wavenumber();
    let resolved = a
        .iter()
        .rposition(|&v| peak > 0.0 && v >= RESOLVED_FLOOR * peak)
        .unwrap_or(0);
    let (xs, ys): (Vec<f64>, Vec<f64>) = (resolved / 2..=resolved)
        .filter(|&k| k > 0 && a[k] > 0.0)
        .map(|k| (k as f64 * dk, a[k].ln()))
        .unzip();
    let fit = linear_fit(&xs, &ys);
    let top = top_band_ratio(u);
    let flagged = !(fit.r_squared >= MIN_R_SQUARED) || top > TOP_BAND_LIMIT || xs.len() < 3;
    SmoothnessReport {
        decay_rate: -fit.slope,
        fit,
        top_band_ratio: top,
        resolved_modes: resolved,
        flagged,
    }
}
