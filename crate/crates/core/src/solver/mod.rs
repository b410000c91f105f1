//! Solitary-wave solvers: mass-constrained descent, fixed-speed
//! Petviashvili iteration, fixed-point refinement and continuation in mass.

mod anderson;
mod descent;
mod petviashvili;
mod recentre;
mod refine;
mod sweep;

pub use descent::constrained_descent;
pub use petviashvili::petviashvili;
pub use recentre::{recentre, Recentred};
pub use refine::{preconditioned_refine, RefineOutcome};
pub use sweep::{continuation_sweep, SweepEntry};

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{mass, FunctionalValues, Model};
use crate::probes::{tail_mass, top_band_ratio};
use crate::spectral::{
    check_nonlinear_symbol, check_symbol_assumptions, make_grid, Field, Grid, Symbol,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Descent,
    Petviashvili,
    Hybrid,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Descent => "descent",
            Method::Petviashvili => "petviashvili",
            Method::Hybrid => "hybrid",
        })
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "descent" => Ok(Method::Descent),
            "petviashvili" => Ok(Method::Petviashvili),
            "hybrid" => Ok(Method::Hybrid),
            other => Err(Error::param("method", format!("unknown method `{other}`"))),
        }
    }
}

/// How an iteration ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    /// Step norm fell below `tol_step` before the residual reached `tol_residual`.
    StepTolerance,
    /// Line search could not find an acceptable step.
    LineSearchFailed,
    MaxIterations,
    /// Speed at or above the dispersion minimum.
    Supercritical,
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub mu: f64,
    pub disp: Symbol,
    pub nl: Symbol,
    pub grid: Arc<Grid>,
    pub method: Method,
    /// Long-wave ansatz scale; `None` scans for the lowest-energy scale.
    pub theta0: Option<f64>,
    pub tol_residual: f64,
    pub tol_step: f64,
    pub max_iter: usize,
    pub continuation: Vec<f64>,
    /// Prescribed speed for the Petviashvili iteration.
    pub nu: Option<f64>,
    pub evenize: bool,
    /// Enlarge the box while the tail mass exceeds `1e-10 * mu`.
    pub auto_grid: bool,
}

pub const DEFAULT_LENGTH: f64 = 200.0 * std::f64::consts::PI;
pub const DEFAULT_POINTS: usize = 4096;
/// Tail-mass fraction that triggers box enlargement.
pub const TAIL_TOLERANCE: f64 = 1e-10;
/// Top-quarter-band spectral fraction that triggers grid refinement.
pub const RESOLUTION_TOLERANCE: f64 = 1e-13;
const MAX_REGRIDS: usize = 6;

impl SolveConfig {
    pub fn new(mu: f64, disp: Symbol, nl: Symbol, grid: Arc<Grid>) -> Self {
        SolveConfig {
            mu,
            disp,
            nl,
            grid,
            method: Method::Descent,
            theta0: None,
            tol_residual: 1e-10,
            tol_step: 1e-12,
            max_iter: 20_000,
            continuation: Vec::new(),
            nu: None,
            evenize: false,
            auto_grid: false,
        }
    }

    /// Bessel symbols of orders `s` and `r`.
    pub fn bessel(s: f64, r: f64, mu: f64, grid: Arc<Grid>) -> Self {
        Self::new(mu, Symbol::bessel(s), Symbol::bessel(r), grid)
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn s(&self) -> f64 {
        self.disp.order()
    }

    pub fn r(&self) -> f64 {
        self.nl.order()
    }

    pub fn validate(&self) -> Result<()> {
        check_exponents(self.s(), self.r())?;
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(Error::param(
                "mu",
                format!("must be positive, got {}", self.mu),
            ));
        }
        if !(self.tol_residual > 0.0) {
            return Err(Error::param("tol_residual", "must be positive"));
        }
        if !(self.tol_step > 0.0) {
            return Err(Error::param("tol_step", "must be positive"));
        }
        if self.max_iter < 1 {
            return Err(Error::param("max_iter", "must be at least 1"));
        }
        if let Some(t) = self.theta0 {
            check_theta(t)?;
        }
        if let Symbol::General(_) = self.disp {
            let rep = check_symbol_assumptions(
                &self.disp,
                self.s(),
                self.disp.low_order().unwrap_or(2.0),
            );
            if !rep.passed() {
                return Err(Error::Symbol(rep.failures.join("; ")));
            }
        }
        if let Symbol::General(_) = self.nl {
            let rep = check_nonlinear_symbol(&self.nl, self.r());
            if !rep.passed() {
                return Err(Error::Symbol(rep.failures.join("; ")));
            }
        }
        Ok(())
    }

    pub fn model(&self) -> Model {
        Model::new(&self.grid, &self.disp, &self.nl)
    }
}

/// `s > 0` and `r < s - 1`.
pub fn check_exponents(s: f64, r: f64) -> Result<()> {
    if s > 0.0 && r < s - 1.0 && s.is_finite() && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Assumption { s, r })
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta <= 1.0 {
        Ok(())
    } else {
        Err(Error::param(
            "theta",
            format!("must lie in (0, 1], got {theta}"),
        ))
    }
}

/// A computed profile with its speed and diagnostics.
#[derive(Debug, Clone)]
pub struct WaveSolution {
    pub u: Field,
    pub nu: f64,
    pub mu: f64,
    pub residual_l2: f64,
    pub iterations: usize,
    pub values: FunctionalValues,
    pub method: Method,
    pub status: Status,
}

impl WaveSolution {
    pub fn converged(&self) -> bool {
        self.status == Status::Converged
    }

    /// Assemble a solution at `(u, nu)`, re-evaluating every diagnostic so
    /// the reported residual is exactly that of the stored profile.
    pub(crate) fn assemble(
        model: &Model,
        u: Field,
        nu: f64,
        mu: f64,
        iterations: usize,
        method: Method,
        status: Status,
    ) -> Self {
        let ev = model.evaluate(&u);
        let residual_l2 = ev.residual(&u, nu).l2_norm();
        let status = if status == Status::Converged && nu >= model.critical_speed() {
            Status::Supercritical
        } else {
            status
        };
        WaveSolution {
            u,
            nu,
            mu,
            residual_l2,
            iterations,
            values: ev.values,
            method,
            status,
        }
    }
}

/// Rescale `u` onto the sphere `Q = mu`.
pub fn project_mass(u: &Field, mu: f64) -> Result<Field> {
    let q = mass(u);
    if !(q > 0.0) {
        return Err(Error::ZeroField);
    }
    if !(mu > 0.0) {
        return Err(Error::param("mu", "must be positive"));
    }
    Ok(u.scale((mu / q).sqrt()))
}

/// Unit-mass Gaussian `(2/sqrt(pi))^(1/2) exp(-x^2/2)`.
pub fn unit_gaussian(x: f64) -> f64 {
    (2.0 / std::f64::consts::PI.sqrt()).sqrt() * (-0.5 * x * x).exp()
}

/// Long-wave ansatz `sqrt(theta) phi(theta x)` projected onto `Q = mu`.
pub fn ansatz(grid: &Arc<Grid>, theta: f64, mu: f64) -> Result<Field> {
    check_theta(theta)?;
    let phi = Field::from_fn(grid, |x| theta.sqrt() * unit_gaussian(theta * x));
    project_mass(&phi, mu)
}

/// Ansatz scales scanned when `theta0` is not given.
pub(crate) fn theta_scan(grid: &Grid) -> Vec<f64> {
    // widest admissible profile keeps ~9 standard deviations inside the box
    let lo = (18.0 / grid.length()).min(1.0);
    let n = 41;
    (0..n)
        .map(|i| lo * (1.0 / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

pub fn longwave_initial_guess(cfg: &SolveConfig) -> Result<Field> {
    let theta = match cfg.theta0 {
        Some(t) => t,
        None => best_theta(cfg)?,
    };
    ansatz(&cfg.grid, theta, cfg.mu)
}

fn best_theta(cfg: &SolveConfig) -> Result<f64> {
    let model = cfg.model();
    let mut best = (f64::INFINITY, 1.0);
    for theta in theta_scan(&cfg.grid) {
        let e = model.values(&ansatz(&cfg.grid, theta, cfg.mu)?).energy;
        if e < best.0 {
            best = (e, theta);
        }
    }
    Ok(best.1)
}

/// Sech-shaped guess for a prescribed speed, from the long-wave limit.
pub fn speed_initial_guess(grid: &Arc<Grid>, s: f64, nu: f64, critical: f64) -> Field {
    let gap = (critical - nu).max(1e-12);
    let amp = (2.0 * gap).sqrt();
    let rate = (2.0 * gap / s.max(1e-3)).sqrt();
    Field::from_fn(grid, |x| amp / (rate * x).cosh())
}

/// Solve for one mass (descent / hybrid) or one speed (Petviashvili).
pub fn solve(cfg: &SolveConfig) -> Result<WaveSolution> {
    cfg.validate()?;
    solve_from(cfg, None)
}

/// As [`solve`], starting from `seed` when given (it must live on `cfg.grid`).
pub(crate) fn solve_from(cfg: &SolveConfig, seed: Option<Field>) -> Result<WaveSolution> {
    let mut cfg = cfg.clone();
    let mut sol = solve_once(&cfg, seed)?;
    if cfg.auto_grid {
        for _ in 0..MAX_REGRIDS {
            let (l, n) = (cfg.grid.length(), cfg.grid.points());
            let seed = if tail_mass(&sol.u) > TAIL_TOLERANCE * sol.mu {
                let grid = make_grid(2.0 * l, 2 * n)?;
                let seed = embed(&sol.u, &grid);
                cfg.grid = grid;
                seed
            } else if top_band_ratio(&sol.u) > RESOLUTION_TOLERANCE {
                let grid = make_grid(l, 2 * n)?;
                let seed = refine_resolution(&sol.u);
                cfg.grid = grid;
                seed
            } else {
                break;
            };
            sol = solve_once(&cfg, Some(project_mass(&seed, sol.mu)?))?;
        }
    }
    Ok(sol)
}

fn solve_once(cfg: &SolveConfig, seed: Option<Field>) -> Result<WaveSolution> {
    let sol = match cfg.method {
        Method::Descent => {
            let u0 = match seed {
                Some(u) => u,
                None => longwave_initial_guess(cfg)?,
            };
            constrained_descent(cfg, &u0)?
        }
        Method::Hybrid => {
            let u0 = match seed {
                Some(u) => u,
                None => longwave_initial_guess(cfg)?,
            };
            let mut rough = cfg.clone();
            rough.tol_residual = (cfg.tol_residual * 1e3).max(1e-7);
            let sol = constrained_descent(&rough, &u0)?;
            let out = preconditioned_refine(&sol, cfg)?;
            let mut sol = out.solution;
            sol.method = Method::Hybrid;
            sol
        }
        Method::Petviashvili => {
            let nu = cfg
                .nu
                .ok_or_else(|| Error::param("nu", "Petviashvili needs a prescribed speed"))?;
            let u0 = match seed {
                Some(u) => u,
                None => {
                    let crit = cfg.model().critical_speed();
                    speed_initial_guess(&cfg.grid, cfg.s(), nu, crit)
                }
            };
            petviashvili(nu, cfg, &u0)?
        }
    };
    let centred = recentre(&sol.u, cfg.evenize);
    let model = cfg.model();
    Ok(WaveSolution::assemble(
        &model,
        centred.field,
        sol.nu,
        sol.mu,
        sol.iterations,
        sol.method,
        sol.status,
    ))
}

/// Trigonometric interpolation of `u` onto the grid with the same box and twice the points.
pub fn refine_resolution(u: &Field) -> Field {
    let grid = u.grid();
    let fine = make_grid(grid.length(), 2 * grid.points()).expect("doubling a valid grid");
    let values = grid.inverse_padded(&grid.pad(&u.spectrum()));
    Field::from_vec(fine, values)
}

/// Place `u` at the centre of a larger grid with the same spacing; new nodes are zero.
pub fn embed(u: &Field, grid: &Arc<Grid>) -> Field {
    let old = u.grid();
    let offset = (grid.points() - old.points()) / 2;
    let mut values = vec![0.0; grid.points()];
    values[offset..offset + old.points()].copy_from_slice(u.values());
    Field::from_vec(Arc::clone(grid), values)
}

/// Box and resolution suited to a wave of mass `mu`, from the long-wave
/// estimate `mu / s` of its spatial decay rate `kappa`: the box spans
/// `32 / kappa` and the band reaches `band * kappa` (at least `min_band`).
pub fn suggest_grid_with(s: f64, mu: f64, band: f64, min_band: f64) -> Result<Arc<Grid>> {
    let kappa = (mu / s).min(0.9);
    let length = 32.0 / kappa;
    let xi_max = (band * kappa).max(min_band);
    let points = ((length * xi_max / std::f64::consts::PI).ceil() as usize)
        .next_power_of_two()
        .max(256);
    make_grid(length, points)
}

pub fn suggest_grid(s: f64, mu: f64) -> Result<Arc<Grid>> {
    suggest_grid_with(s, mu, 25.0, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exponent_domain() {
        assert!(check_exponents(2.0, 0.0).is_ok());
        assert!(check_exponents(0.5, -0.6).is_ok());
        assert!(matches!(
            check_exponents(0.5, 0.0),
            Err(Error::Assumption { .. })
        ));
        assert!(check_exponents(0.0, -2.0).is_err());
        assert!(check_exponents(2.0, 1.0).is_err());
    }

    #[test]
    fn projection() {
        let g = make_grid(2.0 * PI, 32).unwrap();
        let u = Field::from_fn(&g, f64::cos);
        let p = project_mass(&u, PI).unwrap();
        for (a, b) in p.values().iter().zip(u.values()) {
            assert!((a - 2f64.sqrt() * b).abs() < 1e-14);
        }
        let same = project_mass(&u, mass(&u)).unwrap();
        assert!(same.sub(&u).sup_norm() < 1e-15);
        let back = project_mass(&u.scale(2.0), mass(&u)).unwrap();
        assert!(back.sub(&u).sup_norm() < 1e-15);
        assert!(matches!(
            project_mass(&Field::zeros(&g), 1.0),
            Err(Error::ZeroField)
        ));
    }

    #[test]
    fn ansatz_mass_and_peak() {
        let g = make_grid(200.0, 1024).unwrap();
        let mu = 0.4;
        let a = ansatz(&g, 1.0, mu).unwrap();
        assert!((mass(&a) - mu).abs() < 1e-14);
        let peak = mu.sqrt() * (2.0 / PI.sqrt()).sqrt();
        assert!((a.sup_norm() - peak).abs() < 1e-12);
        let wide = ansatz(&g, 0.2, mu).unwrap();
        assert!((mass(&wide) - mu).abs() < 1e-14);
        assert!(wide.sup_norm() < a.sup_norm());
        assert!(ansatz(&g, 1.5, mu).is_err());
        assert!(ansatz(&g, 0.0, mu).is_err());
    }

    #[test]
    fn config_validation() {
        let g = make_grid(100.0, 256).unwrap();
        let cfg = SolveConfig::bessel(0.5, 0.0, 0.2, g.clone());
        assert!(matches!(cfg.validate(), Err(Error::Assumption { .. })));
        let mut cfg = SolveConfig::bessel(2.0, 0.0, 0.2, g.clone());
        cfg.max_iter = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = SolveConfig::bessel(2.0, 0.0, 0.2, g.clone());
        cfg.tol_residual = 0.0;
        assert!(cfg.validate().is_err());
        let bad = Symbol::general("jb(xi)^1", 2.0, Some(2.0)).unwrap();
        let cfg = SolveConfig::new(0.2, bad, Symbol::bessel(0.0), g);
        assert!(matches!(cfg.validate(), Err(Error::Symbol(_))));
    }
}
