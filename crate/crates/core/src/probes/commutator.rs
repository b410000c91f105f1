use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{apply_multiplier, dealiased_product, Field, Symbol};

/// Cutoff `rho` in `rho_R(x) = rho(x / R)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cutoff {
    /// `exp(-x^2)`
    Gaussian,
    Constant(f64),
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CommutatorRow {
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(rename = "I")]
    pub value: f64,
}

/// `I(R) = |int v^2 (rho_R Lambda^r u^2 - Lambda^r (rho_R u^2))|` for each `R`.
pub fn probe_commutator_decay(
    u: &Field,
    v: &Field,
    r: f64,
    radii: &[f64],
    cutoff: Cutoff,
) -> Result<Vec<CommutatorRow>> {
    u.ensure_same_grid(v)?;
    let grid = u.grid();
    let limit = grid.length() / 8.0;
    let sym = Symbol::bessel(r);
    let u2 = dealiased_product(u, u)?;
    let v2 = dealiased_product(v, v)?;
    let lu2 = apply_multiplier(&u2, &sym)?;
    radii
        .iter()
        .map(|&radius| {
            if !(radius > 0.0 && radius <= limit) {
                return Err(Error::Probe(format!(
                    "cutoff radius {radius} outside (0, L/8 = {limit}]"
                )));
            }
            let diff = match cutoff {
                Cutoff::Constant(c) => lu2.scale(c).sub(&lu2.scale(c)),
                Cutoff::Gaussian => {
                    let rho = Field::from_fn(grid, |x| (-(x / radius).powi(2)).exp());
                    let a = dealiased_product(&rho, &lu2)?;
                    let b = apply_multiplier(&dealiased_product(&rho, &u2)?, &sym)?;
                    a.sub(&b)
                }
            };
            Ok(CommutatorRow {
                radius,
                value: v2.inner(&diff).abs(),
            })
        })
        .collect()
}
