use num_complex::Complex64;

use super::anderson::Anderson;
use super::{project_mass, SolveConfig, Status, WaveSolution};
use crate::error::Result;
use crate::spectral::Field;

const DEPTH: usize = 5;
const MAX_SWEEPS: usize = 500;

#[derive(Debug, Clone)]
pub struct RefineOutcome {
    pub solution: WaveSolution,
    pub sweeps: usize,
    /// Set when no sweep lowered the residual; `solution` is then the input.
    pub no_progress: bool,
}

/// Fixed-point polish `u <- (Lambda^s - nu + 1)^(-1) (u Lambda^r u^2 + u)`,
/// with `nu` from the Rayleigh quotient each sweep, the mass held at
/// `sol.mu`, and Anderson mixing over the last few sweeps.
pub fn preconditioned_refine(sol: &WaveSolution, cfg: &SolveConfig) -> Result<RefineOutcome> {
    let model = super::SolveConfig {
        grid: sol.u.grid().clone(),
        ..cfg.clone()
    }
    .model();
    let grid = sol.u.grid().clone();
    let mu = sol.mu;
    let nyq = grid.nyquist();
    let sweeps_cap = cfg.max_iter.min(MAX_SWEEPS);
    if sol.residual_l2 <= cfg.tol_residual {
        return Ok(RefineOutcome {
            solution: sol.clone(),
            sweeps: 0,
            no_progress: false,
        });
    }

    let mut u = sol.u.clone();
    let mut best = (sol.residual_l2, sol.u.clone(), sol.nu);
    let mut acc = Anderson::new(DEPTH);
    let mut sweeps = 0;
    for k in 0..sweeps_cap {
        let ev = model.evaluate(&u);
        let nu = ev.rayleigh_speed()?;
        let res = ev.residual(&u, nu).l2_norm();
        if res < best.0 {
            best = (res, u.clone(), nu);
        }
        if res <= cfg.tol_residual {
            break;
        }
        sweeps = k + 1;
        let mut c = u.spectrum();
        let cub = ev.cubic.spectrum();
        for ((ck, bk), m) in c.iter_mut().zip(&cub).zip(model.dispersion_weights()) {
            *ck = (*bk + *ck) / (m - nu + 1.0);
        }
        c[nyq] = Complex64::new(0.0, 0.0);
        let image = Field::from_spectrum(&grid, &c);
        let next = acc.mix(u.values(), image.values());
        let next = Field::new(grid.clone(), next)?;
        if !next.is_finite() {
            break;
        }
        u = project_mass(&next, mu)?;
    }
    let ev = model.evaluate(&u);
    let nu = ev.rayleigh_speed()?;
    let res = ev.residual(&u, nu).l2_norm();
    if res < best.0 {
        best = (res, u, nu);
    }
    let no_progress = !(best.0 < sol.residual_l2);
    let solution = if no_progress {
        sol.clone()
    } else {
        let status = if best.0 <= cfg.tol_residual {
            Status::Converged
        } else {
            Status::MaxIterations
        };
        WaveSolution::assemble(
            &model,
            best.1,
            best.2,
            mu,
            sol.iterations + sweeps,
            sol.method,
            status,
        )
    };
    Ok(RefineOutcome {
        solution,
        sweeps,
        no_progress,
    })
}
