//! Numerical probes of the inequalities, bounds and scaling laws.

mod commutator;
mod gamma;
mod nonlinear;
mod smoothness;
mod tail;

pub use commutator::{probe_commutator_decay, CommutatorRow, Cutoff};
pub use gamma::{
    infimum_from_ansatz, infimum_from_records, probe_gamma_upper, probe_subadditivity,
    GammaEstimate, GammaReport, InfimumReport, InfimumRow, SplitRow,
};
pub use nonlinear::{
    interpolation_exponent, nonlinear_ratio, probe_nonlinear_bound, random_field, EnsembleStats,
    Envelope, NonlinearBoundReport, BASE_BAND,
};
pub use smoothness::{probe_smoothness, top_band_ratio, SmoothnessReport, TOP_BAND_LIMIT};
pub use tail::tail_mass;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use crate::solver::WaveSolution;
use crate::spectral::sobolev_norm;

/// Per-mass diagnostics of a computed wave.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub mu: f64,
    pub nu: f64,
    pub h_half_s_norm: f64,
    pub sup_norm: f64,
    #[serde(rename = "Nval")]
    pub nval: f64,
    #[serde(rename = "Eval")]
    pub eval: f64,
    pub residual_l2: f64,
    pub tail_mass: f64,
    pub converged: bool,
}

impl SweepRecord {
    pub fn from_solution(sol: &WaveSolution, s: f64) -> Self {
        SweepRecord {
            mu: sol.mu,
            nu: sol.nu,
            h_half_s_norm: sobolev_norm(&sol.u, 0.5 * s),
            sup_norm: sol.u.sup_norm(),
            nval: sol.values.nonlinear,
            eval: sol.values.energy,
            residual_l2: sol.residual_l2,
            tail_mass: tail_mass(&sol.u),
            converged: sol.converged(),
        }
    }
}

/// Least-squares line `y = slope x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Range of the abscissa values used (before any log transform).
    pub window: [f64; 2],
    pub points: usize,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> FitResult {
    let n = x.len().min(y.len());
    let (lo, hi) = x[..n]
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    if n < 2 {
        return FitResult {
            slope: f64::NAN,
            intercept: f64::NAN,
            r_squared: 0.0,
            window: [lo, hi],
            points: n,
        };
    }
    let mx = x[..n].iter().sum::<f64>() / n as f64;
    let my = y[..n].iter().sum::<f64>() / n as f64;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x[..n].iter().zip(&y[..n]) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
        syy += (b - my) * (b - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    FitResult {
        slope,
        intercept,
        r_squared,
        window: [lo, hi],
        points: n,
    }
}

/// Fit of `log y` against `log x`, with the window reported in `x`.
pub fn log_log_fit(x: &[f64], y: &[f64]) -> FitResult {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mut fit = linear_fit(&lx, &ly);
    fit.window = [fit.window[0].exp(), fit.window[1].exp()];
    fit
}

/// Records admitted to scaling fits: converged with `tail_mass / mu <= 1e-8`.
pub const ADMISSION_TAIL: f64 = 1e-8;
pub const MIN_SCALING_RECORDS: usize = 5;
pub const MIN_R_SQUARED_SCALING: f64 = 0.995;

/// Quantity, expected slope and tolerance for the gated scaling fits.
pub const SCALING_TARGETS: [(&str, f64, f64); 3] = [
    ("one_minus_nu", 2.0, 0.1),
    ("h_half_s_norm", 0.5, 0.05),
    ("nval", 3.0, 0.1),
];

#[derive(Debug, Clone, Serialize)]
pub struct ScalingReport {
    pub admitted: usize,
    pub fits: BTreeMap<String, FitResult>,
    /// Per gated quantity: slope within tolerance and `r^2 >= 0.995`.
    pub checks: BTreeMap<String, bool>,
}

impl ScalingReport {
    pub fn passed(&self) -> bool {
        self.checks.values().all(|&ok| ok)
    }
}

/// Log-log fits of the sweep quantities against `mu`. `sup_norm` is fitted
/// and reported but not gated.
pub fn probe_scaling_laws(records: &[SweepRecord]) -> Result<ScalingReport> {
    let admitted: Vec<&SweepRecord> = records
        .iter()
        .filter(|r| r.converged && r.mu > 0.0 && r.tail_mass <= ADMISSION_TAIL * r.mu)
        .collect();
    if admitted.len() < MIN_SCALING_RECORDS {
        return Err(Error::Probe(format!(
            "scaling fits need at least {MIN_SCALING_RECORDS} admitted records, got {}",
            admitted.len()
        )));
    }
    let mus: Vec<f64> = admitted.iter().map(|r| r.mu).collect();
    let (lo, hi) = mus
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    if hi < 10.0 * lo * (1.0 - 1e-12) {
        return Err(Error::Probe(format!(
            "admitted masses span [{lo}, {hi}], less than a decade"
        )));
    }
    let column = |f: fn(&SweepRecord) -> f64| admitted.iter().map(|r| f(r)).collect::<Vec<f64>>();
    let mut fits = BTreeMap::new();
    fits.insert(
        "one_minus_nu".to_string(),
        log_log_fit(&mus, &column(|r| 1.0 - r.nu)),
    );
    fits.insert(
        "h_half_s_norm".to_string(),
        log_log_fit(&mus, &column(|r| r.h_half_s_norm)),
    );
    fits.insert("nval".to_string(), log_log_fit(&mus, &column(|r| r.nval)));
    fits.insert(
        "sup_norm".to_string(),
        log_log_fit(&mus, &column(|r| r.sup_norm)),
    );
    let checks = SCALING_TARGETS
        .iter()
        .map(|(name, slope, tol)| {
            let f = &fits[*name];
            let ok = (f.slope - slope).abs() <= *tol && f.r_squared >= MIN_R_SQUARED_SCALING;
            (name.to_string(), ok)
        })
        .collect();
    Ok(ScalingReport {
        admitted: admitted.len(),
        fits,
        checks,
    })
}

/// Machine-readable probe outcome.
#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub probe: String,
    pub pass: bool,
    pub metrics: serde_json::Value,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(mu: f64) -> SweepRecord {
        SweepRecord {
            mu,
            nu: 1.0 - mu * mu / 4.0,
            h_half_s_norm: (2.0 * (mu + mu.powi(3) / 12.0)).sqrt(),
            sup_norm: mu / 2f64.sqrt(),
            nval: mu.powi(3) / 6.0,
            eval: mu - mu.powi(3) / 12.0,
            residual_l2: 1e-11,
            tail_mass: 0.0,
            converged: true,
        }
    }

    #[test]
    fn exact_line() {
        let f = linear_fit(&[0.0, 1.0, 2.0, 3.0], &[1.0, 3.0, 5.0, 7.0]);
        assert!((f.slope - 2.0).abs() < 1e-15 && (f.intercept - 1.0).abs() < 1e-15);
        assert_eq!(f.r_squared, 1.0);
    }

    #[test]
    fn sech_family_slopes() {
        let recs: Vec<SweepRecord> = [0.01, 0.02, 0.04, 0.06, 0.08, 0.1]
            .iter()
            .map(|&m| record(m))
            .collect();
        let rep = probe_scaling_laws(&recs).unwrap();
        assert!(rep.passed(), "{:?}", rep.fits);
        assert!((rep.fits["one_minus_nu"].slope - 2.0).abs() < 1e-12);
        assert!((rep.fits["nval"].slope - 3.0).abs() < 1e-12);
        assert!((rep.fits["sup_norm"].slope - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_few_or_narrow() {
        let recs: Vec<SweepRecord> = [0.1, 0.2, 0.3, 0.4].iter().map(|&m| record(m)).collect();
        assert!(probe_scaling_laws(&recs).is_err());
        let recs: Vec<SweepRecord> = [0.1, 0.2, 0.3, 0.4, 0.5]
            .iter()
            .map(|&m| record(m))
            .collect();
        assert!(probe_scaling_laws(&recs).is_err());
        let mut recs: Vec<SweepRecord> = [0.01, 0.02, 0.04, 0.06, 0.1]
            .iter()
            .map(|&m| record(m))
            .collect();
        recs[0].tail_mass = 1.0;
        assert!(probe_scaling_laws(&recs).is_err());
    }
}
