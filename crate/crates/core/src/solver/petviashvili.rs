use num_complex::Complex64;

use super::{Method, SolveConfig, Status, WaveSolution};
use crate::error::{Error, Result};
use crate::functionals::mass;
use crate::spectral::Field;

/// Fixed-speed Petviashvili iteration
/// `u <- M^(3/2) (Lambda^s - nu)^(-1) (u Lambda^r u^2)` with
/// `M = <(Lambda^s - nu) u, u> / <u Lambda^r u^2, u>`.
///
/// The mass of the limit is an output; `cfg.mu` is ignored.
pub fn petviashvili(nu: f64, cfg: &SolveConfig, u0: &Field) -> Result<WaveSolution> {
    super::check_exponents(cfg.s(), cfg.r())?;
    u0.ensure_finite()?;
    u0.ensure_same_grid(&Field::zeros(&cfg.grid))?;
    let model = cfg.model();
    let min = model.critical_speed();
    if !(nu < min) {
        return Err(Error::Supercritical { nu, min });
    }
    let grid = &cfg.grid;
    let l = grid.length();
    let shifted: Vec<f64> = model.dispersion_weights().iter().map(|m| m - nu).collect();
    let nyq = grid.nyquist();

    let mut c = u0.spectrum();
    let mut status = Status::MaxIterations;
    let mut iterations = 0;
    for k in 0..cfg.max_iter {
        iterations = k;
        let (cub, _) = model.cubic_spectrum(&c);
        let lin: f64 = c
            .iter()
            .zip(&shifted)
            .map(|(ck, w)| w * ck.norm_sqr())
            .sum::<f64>()
            * l;
        let nl: f64 = c
            .iter()
            .zip(&cub)
            .map(|(a, b)| (a.conj() * b).re)
            .sum::<f64>()
            * l;
        let quotient = lin / nl;
        if !(quotient > 0.0 && quotient.is_finite()) {
            return Err(Error::DegenerateQuotient {
                iteration: k,
                value: quotient,
            });
        }
        // residual (Lambda^s - nu) u - u Lambda^r u^2, measured in L2
        let res: f64 = c
            .iter()
            .zip(&cub)
            .zip(&shifted)
            .map(|((ck, bk), w)| (ck * w - bk).norm_sqr())
            .sum::<f64>()
            * l;
        if (quotient - 1.0).abs() <= cfg.tol_step && res.sqrt() <= cfg.tol_residual {
            status = Status::Converged;
            break;
        }
        let factor = quotient.powf(1.5);
        c = cub
            .iter()
            .zip(&shifted)
            .map(|(b, w)| b * (factor / w))
            .collect();
        c[nyq] = Complex64::new(0.0, 0.0);
        iterations = k + 1;
    }
    let u = Field::from_spectrum(grid, &c);
    let mu = mass(&u);
    Ok(WaveSolution::assemble(
        &model,
        u,
        nu,
        mu,
        iterations,
        Method::Petviashvili,
        status,
    ))
}
