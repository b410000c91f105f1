use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::solver::check_exponents;
use crate::spectral::{dealiased_product, make_grid, sobolev_norm, Field, Grid};

/// Interpolation exponent `gamma < 1` built as in the product-estimate argument.
pub fn interpolation_exponent(s: f64, r: f64) -> Result<f64> {
    check_exponents(s, r)?;
    let mid = |a: f64, b: f64| 0.5 * (a + b);
    let gamma = if s > 1.0 {
        let r_eff = r.max(0.0);
        let tau = mid(1.0, s - r_eff);
        (r_eff + tau) / s
    } else {
        // s = 1 is handled with an order strictly between r + 1 and 1
        let s_eff = if s == 1.0 { mid(r + 1.0, 1.0) } else { s };
        let r_eff = if r > -1.0 { r } else { mid(-1.0, s_eff - 1.0) };
        (r_eff + 1.0) / s_eff
    };
    Ok(gamma)
}

/// `|u^2|_{H^{r/2}} / (|u|_{L^2}^{2 - gamma} |u|_{H^{s/2}}^gamma)`; `None` for the zero field.
pub fn nonlinear_ratio(u: &Field, s: f64, r: f64, gamma: f64) -> Result<Option<f64>> {
    let l2 = u.l2_norm();
    if l2 == 0.0 {
        return Ok(None);
    }
    let sq = dealiased_product(u, u)?;
    let top = sobolev_norm(&sq, 0.5 * r);
    let bottom = l2.powf(2.0 - gamma) * sobolev_norm(u, 0.5 * s).powf(gamma);
    Ok(Some(top / bottom))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Envelope {
    Flat,
    Algebraic,
    Gaussian,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleStats {
    pub band: usize,
    pub count: usize,
    pub max: f64,
    pub median: f64,
    pub min: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct NonlinearBoundReport {
    pub s: f64,
    pub r: f64,
    pub gamma: f64,
    pub base: EnsembleStats,
    pub doubled: EnsembleStats,
    /// `max` at the doubled band stays below twice the `max` at the base band.
    pub stable: bool,
}

/// Box `2 pi * 8` with modes up to `BASE_BAND` (and twice that).
const BOX: f64 = 16.0 * std::f64::consts::PI;
pub const BASE_BAND: usize = 32;

/// Random band-limited field with modes `1 <= |k| <= band` and envelope
/// drawn per member (flat, `<xi>^-a`, or Gaussian).
pub fn random_field(grid: &Arc<Grid>, band: usize, kind: Envelope, rng: &mut ChaCha8Rng) -> Field {
    let n = grid.points();
    let dk = grid.base_wavenumber();
    let xi_band = band as f64 * dk;
    let a = rng.random_range(0.5..3.0);
    let width = rng.random_range(0.1..1.0) * xi_band;
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    for k in 1..=band {
        let xi = k as f64 * dk;
        let env = match kind {
            Envelope::Flat => 1.0,
            Envelope::Algebraic => (1.0 + xi * xi).powf(-0.5 * a),
            Envelope::Gaussian => (-(xi / width).powi(2)).exp(),
        };
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let z = Complex64::new(re, im) * env;
        c[k] = z;
        c[n - k] = z.conj();
    }
    Field::from_spectrum(grid, &c)
}

fn ensemble(
    s: f64,
    r: f64,
    gamma: f64,
    size: usize,
    band: usize,
    seed: u64,
) -> Result<EnsembleStats> {
    let grid = make_grid(BOX, (4 * band).next_power_of_two().max(8))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kinds = [Envelope::Flat, Envelope::Algebraic, Envelope::Gaussian];
    let mut ratios = Vec::with_capacity(size);
    for i in 0..size {
        let u = random_field(&grid, band, kinds[i % 3], &mut rng);
        if let Some(q) = nonlinear_ratio(&u, s, r, gamma)? {
            ratios.push(q);
        }
    }
    if ratios.is_empty() {
        return Err(Error::Probe("empty ensemble".into()));
    }
    ratios.sort_by(f64::total_cmp);
    let m = ratios.len();
    let median = if m % 2 == 1 {
        ratios[m / 2]
    } else {
        0.5 * (ratios[m / 2 - 1] + ratios[m / 2])
    };
    Ok(EnsembleStats {
        band,
        count: m,
        max: ratios[m - 1],
        median,
        min: ratios[0],
    })
}

/// Ensemble statistics of [`nonlinear_ratio`] at band `BASE_BAND` and `2 * BASE_BAND`.
pub fn probe_nonlinear_bound(
    s: f64,
    r: f64,
    ensemble_size: usize,
    seed: u64,
) -> Result<NonlinearBoundReport> {
    let gamma = interpolation_exponent(s, r)?;
    if ensemble_size == 0 {
        return Err(Error::param("ensemble_size", "must be positive"));
    }
    let base = ensemble(s, r, gamma, ensemble_size, BASE_BAND, seed)?;
    let doubled = ensemble(
        s,
        r,
        gamma,
        ensemble_size,
        2 * BASE_BAND,
        seed.wrapping_add(1),
    )?;
    let stable = doubled.max < 2.0 * base.max;
    Ok(NonlinearBoundReport {
        s,
        r,
        gamma,
        base,
        doubled,
        stable,
    })
}
