use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use super::SweepRecord;
use crate::error::{Error, Result};
use crate::functionals::Model;
use crate::solver::{ansatz, solve, suggest_grid, SolveConfig};
use crate::spectral::{make_grid, Grid, Symbol};

/// Upper bound for the constrained infimum at one mass.
#[derive(Debug, Clone, Serialize)]
pub struct GammaEstimate {
    pub mu: f64,
    pub gamma_upper: f64,
    pub provenance: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct GammaReport {
    pub estimate: GammaEstimate,
    pub theta_best: f64,
    pub below_mu: bool,
    /// `(theta, energy)` for every scanned scale.
    pub scan: Vec<(f64, f64)>,
}

/// Minimum energy of the mass-`mu` long-wave ansatz over `thetas`.
pub fn probe_gamma_upper(
    mu: f64,
    thetas: &[f64],
    grid: &Arc<Grid>,
    disp: &Symbol,
    nl: &Symbol,
) -> Result<GammaReport> {
    if !(mu > 0.0) {
        return Err(Error::param("mu", "must be positive"));
    }
    if thetas.is_empty() || thetas.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
        return Err(Error::param("theta", "values must lie in (0, 1)"));
    }
    let model = Model::new(grid, disp, nl);
    let mut scan = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        scan.push((theta, model.values(&ansatz(grid, theta, mu)?).energy));
    }
    let &(theta_best, gamma_upper) = scan
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty scan");
    Ok(GammaReport {
        estimate: GammaEstimate {
            mu,
            gamma_upper,
            provenance: format!("gaussian ansatz scan over {} scales", thetas.len()),
        },
        theta_best,
        below_mu: gamma_upper < mu,
        scan,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct InfimumRow {
    pub mu: f64,
    pub energy: f64,
    /// `(mu - energy) / mu^3`
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InfimumReport {
    pub rows: Vec<InfimumRow>,
    /// Smallest `(mu - E) / mu^3` across the rows.
    pub kappa: f64,
    pub all_below_mu: bool,
    pub positive: bool,
}

impl InfimumReport {
    fn from_pairs(pairs: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let rows: Vec<InfimumRow> = pairs
            .into_iter()
            .map(|(mu, energy)| InfimumRow {
                mu,
                energy,
                ratio: (mu - energy) / mu.powi(3),
            })
            .collect();
        if rows.is_empty() {
            return Err(Error::Probe("no masses to examine".into()));
        }
        let kappa = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
        Ok(InfimumReport {
            all_below_mu: rows.iter().all(|r| r.energy < r.mu),
            positive: kappa > 0.0,
            kappa,
            rows,
        })
    }

    pub fn passed(&self) -> bool {
        self.all_below_mu && self.positive
    }
}

/// Energies of computed waves against `mu - kappa mu^3`.
pub fn infimum_from_records(records: &[SweepRecord]) -> Result<InfimumReport> {
    InfimumReport::from_pairs(
        records
            .iter()
            .filter(|r| r.converged)
            .map(|r| (r.mu, r.eval)),
    )
}

/// Ansatz energies at the scale `theta = c3 mu` for each mass.
pub fn infimum_from_ansatz(
    mus: &[f64],
    c3: f64,
    disp: &Symbol,
    nl: &Symbol,
) -> Result<InfimumReport> {
    let mut pairs = Vec::with_capacity(mus.len());
    for &mu in mus {
        let theta = c3 * mu;
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::param(
                "c3",
                format!("c3 * mu = {theta} must lie in (0, 1)"),
            ));
        }
        // Gaussian of width 1/theta: box to ~e^-58 at the ends, band to ~e^-40
        let length = 24.0 / theta;
        let points = ((length * 9.0 * theta / std::f64::consts::PI).ceil() as usize)
            .next_power_of_two()
            .max(256);
        let grid = make_grid(length, points)?;
        let e = Model::new(&grid, disp, nl)
            .values(&ansatz(&grid, theta, mu)?)
            .energy;
        pairs.push((mu, e));
    }
    InfimumReport::from_pairs(pairs)
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitRow {
    pub lambda: f64,
    pub gamma_mu: f64,
    pub gamma_lambda: f64,
    pub gamma_rest: f64,
    /// `gamma_mu - gamma_lambda - gamma_rest`; negative when strictly subadditive.
    pub defect: f64,
    pub conclusive: bool,
}

/// Solver-based upper bounds `G(mu) - G(lambda) - G(mu - lambda)` per split.
/// `base` supplies the symbols and tolerances; grids follow [`suggest_grid`].
pub fn probe_subadditivity(mu: f64, splits: &[f64], base: &SolveConfig) -> Result<Vec<SplitRow>> {
    if splits.iter().any(|l| !(*l > 0.0 && *l < mu)) {
        return Err(Error::param(
            "splits",
            format!("every split must lie in (0, {mu})"),
        ));
    }
    let mut cache: BTreeMap<u64, Option<f64>> = BTreeMap::new();
    let mut energy = |m: f64| -> Result<Option<f64>> {
        if let Some(e) = cache.get(&m.to_bits()) {
            return Ok(*e);
        }
        let mut cfg = base.clone();
        cfg.mu = m;
        cfg.grid = suggest_grid(base.s(), m)?;
        cfg.auto_grid = true;
        let e = solve(&cfg)
            .ok()
            .filter(|s| s.converged())
            .map(|s| s.values.energy);
        cache.insert(m.to_bits(), e);
        Ok(e)
    };
    let g_mu = energy(mu)?;
    let mut rows = Vec::with_capacity(splits.len());
    for &lambda in splits {
        let (a, b) = (energy(lambda)?, energy(mu - lambda)?);
        let conclusive = g_mu.is_some() && a.is_some() && b.is_some();
        let (gm, ga, gb) = (
            g_mu.unwrap_or(f64::NAN),
            a.unwrap_or(f64::NAN),
            b.unwrap_or(f64::NAN),
        );
        rows.push(SplitRow {
            lambda,
            gamma_mu: gm,
            gamma_lambda: ga,
            gamma_rest: gb,
            defect: gm - ga - gb,
            conclusive,
        });
    }
    Ok(rows)
}
