use super::{embed, project_mass, solve_from, SolveConfig, WaveSolution};
use crate::error::{Error, Result};
use crate::probes::SweepRecord;

/// One mass of a continuation sweep. `solution` is `Err` when the solve
/// itself failed; a returned but unconverged solution is kept as `Ok`.
#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub mu: f64,
    pub solution: std::result::Result<WaveSolution, String>,
}

impl SweepEntry {
    pub fn converged(&self) -> bool {
        matches!(&self.solution, Ok(s) if s.converged())
    }

    pub fn record(&self, cfg: &SolveConfig) -> Option<SweepRecord> {
        self.solution
            .as_ref()
            .ok()
            .map(|s| SweepRecord::from_solution(s, cfg.s()))
    }
}

/// Solve along `cfg.continuation` (ascending), warm-starting each mass from
/// the previous profile rescaled onto the new mass.
pub fn continuation_sweep(cfg: &SolveConfig) -> Result<Vec<SweepEntry>> {
    let mus = &cfg.continuation;
    if mus.is_empty() {
        return Err(Error::param("continuation", "empty list"));
    }
    if mus.iter().any(|m| !(*m > 0.0 && m.is_finite())) {
        return Err(Error::param("continuation", "masses must be positive"));
    }
    if mus.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::param(
            "continuation",
            "masses must be strictly ascending",
        ));
    }
    let mut local = cfg.clone();
    local.mu = mus[0];
    local.validate()?;
    let mut out = Vec::with_capacity(mus.len());
    let mut prev: Option<WaveSolution> = None;
    for &mu in mus {
        local.mu = mu;
        let seed = match &prev {
            Some(p) => {
                let u = if p.u.grid() == &local.grid {
                    p.u.clone()
                } else {
                    embed(&p.u, &local.grid)
                };
                Some(project_mass(&u, mu)?)
            }
            None => None,
        };
        let result = solve_from(&local, seed);
        let entry = SweepEntry {
            mu,
            solution: result.map_err(|e| e.to_string()),
        };
        if let Ok(sol) = &entry.solution {
            if sol.u.grid().points() >= local.grid.points() {
                local.grid = sol.u.grid().clone();
            }
            if sol.converged() {
                prev = Some(sol.clone());
            }
        }
        out.push(entry);
    }
    Ok(out)
}
