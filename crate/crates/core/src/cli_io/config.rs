use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::{check_exponents, Method, SolveConfig, DEFAULT_LENGTH, DEFAULT_POINTS};
use crate::spectral::{make_grid, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Solve,
    Sweep,
    Evolve,
    Probe,
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "solve" => Ok(Command::Solve),
            "sweep" => Ok(Command::Sweep),
            "evolve" => Ok(Command::Evolve),
            "probe" => Ok(Command::Probe),
            other => Err(Error::Config(format!("unknown command `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub s: f64,
    pub r: f64,
    #[serde(default = "default_mu")]
    pub mu: f64,
    /// Expression in `xi` replacing `jb(xi)^s` (order `s` at high frequency).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disp_symbol: Option<String>,
    /// Order of `m(xi) - m(0)` near the origin for `disp_symbol`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disp_low_order: Option<f64>,
    /// Expression in `xi` replacing `jb(xi)^r`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nl_symbol: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "L", default = "default_length")]
    pub length: f64,
    #[serde(rename = "N", default = "default_points")]
    pub points: usize,
    /// Enlarge or refine the grid while the tail mass or top band is too large.
    #[serde(default = "yes")]
    pub auto: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            length: DEFAULT_LENGTH,
            points: DEFAULT_POINTS,
            auto: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_method")]
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta0: Option<f64>,
    #[serde(default = "default_tol_residual")]
    pub tol_residual: f64,
    #[serde(default = "default_tol_step")]
    pub tol_step: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub continuation: Vec<f64>,
    /// Speed for the Petviashvili iteration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(default)]
    pub evenize: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            method: default_method(),
            theta0: None,
            tol_residual: default_tol_residual(),
            tol_step: default_tol_step(),
            max_iter: default_max_iter(),
            continuation: Vec::new(),
            nu: None,
            evenize: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolveSection {
    /// Defaults to a tenth of the stability ceiling of the initial profile.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Defaults to `10 / (1 - nu)`.
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub t_final: Option<f64>,
    #[serde(default = "default_record_every")]
    pub record_every: usize,
}

impl Default for EvolveSection {
    fn default() -> Self {
        EvolveSection {
            dt: None,
            t_final: None,
            record_every: default_record_every(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    NonlinearBound,
    GammaUpper,
    Infimum,
    Subadditivity,
    Commutator,
    Scaling,
    Smoothness,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    #[serde(default = "default_probe")]
    pub kind: ProbeKind,
    #[serde(default = "default_ensemble")]
    pub ensemble_size: usize,
    /// Ansatz scales; empty means a log-spaced default set.
    #[serde(default)]
    pub thetas: Vec<f64>,
    #[serde(default = "default_splits")]
    pub splits: Vec<f64>,
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    /// Scale constant in `theta = c3 mu` for the ansatz infimum sweep.
    #[serde(default = "default_c3")]
    pub c3: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            kind: default_probe(),
            ensemble_size: default_ensemble(),
            thetas: Vec::new(),
            splits: default_splits(),
            radii: default_radii(),
            c3: default_c3(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    pub problem: ProblemConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub evolve: EvolveSection,
    #[serde(default)]
    pub probe: ProbeConfig,
}

fn default_mu() -> f64 {
    0.4
}
fn default_length() -> f64 {
    DEFAULT_LENGTH
}
fn default_points() -> usize {
    DEFAULT_POINTS
}
fn yes() -> bool {
    true
}
fn default_method() -> Method {
    Method::Descent
}
fn default_tol_residual() -> f64 {
    1e-10
}
fn default_tol_step() -> f64 {
    1e-12
}
fn default_max_iter() -> usize {
    20_000
}
fn default_record_every() -> usize {
    100
}
fn default_probe() -> ProbeKind {
    ProbeKind::Scaling
}
fn default_ensemble() -> usize {
    1000
}
fn default_splits() -> Vec<f64> {
    vec![0.1, 0.2, 0.3]
}
fn default_radii() -> Vec<f64> {
    vec![5.0, 10.0, 20.0, 40.0]
}
fn default_c3() -> f64 {
    0.4
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}

/// Parse and validate a TOML run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let p = &self.problem;
        check_exponents(p.s, p.r).map_err(|_| {
            Error::Config(format!(
                "problem.s = {}, problem.r = {}: the model requires s > 0 and r < s - 1",
                p.s, p.r
            ))
        })?;
        if !(p.mu > 0.0 && p.mu.is_finite()) {
            return Err(Error::Config(format!(
                "problem.mu = {} must be positive",
                p.mu
            )));
        }
        make_grid(self.grid.length, self.grid.points)
            .map_err(|e| Error::Config(format!("grid: {e}")))?;
        self.solve_config()
            .and_then(|c| c.validate())
            .map_err(|e| match e {
                Error::Config(m) => Error::Config(m),
                other => Error::Config(format!("solver: {other}")),
            })?;
        let c = &self.solver.continuation;
        if c.iter().any(|m| !(*m > 0.0)) || c.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "solver.continuation must be positive and strictly ascending".into(),
            ));
        }
        if let Some(dt) = self.evolve.dt {
            if !(dt > 0.0) {
                return Err(Error::Config("evolve.dt must be positive".into()));
            }
        }
        if let Some(t) = self.evolve.t_final {
            if !(t >= 0.0) {
                return Err(Error::Config("evolve.T must be nonnegative".into()));
            }
        }
        if self.evolve.record_every < 1 {
            return Err(Error::Config(
                "evolve.record_every must be at least 1".into(),
            ));
        }
        if self.probe.thetas.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
            return Err(Error::Config("probe.thetas must lie in (0, 1)".into()));
        }
        Ok(())
    }

    pub fn dispersion_symbol(&self) -> Result<Symbol> {
        match &self.problem.disp_symbol {
            None => Ok(Symbol::bessel(self.problem.s)),
            Some(src) => Symbol::general(
                src,
                self.problem.s,
                Some(self.problem.disp_low_order.unwrap_or(2.0)),
            ),
        }
    }

    pub fn nonlinear_symbol(&self) -> Result<Symbol> {
        match &self.problem.nl_symbol {
            None => Ok(Symbol::bessel(self.problem.r)),
            Some(src) => Symbol::general(src, self.problem.r, None),
        }
    }

    pub fn solve_config(&self) -> Result<SolveConfig> {
        let grid = make_grid(self.grid.length, self.grid.points)?;
        let mut c = SolveConfig::new(
            self.problem.mu,
            self.dispersion_symbol()?,
            self.nonlinear_symbol()?,
            grid,
        );
        c.method = self.solver.method;
        c.theta0 = self.solver.theta0;
        c.tol_residual = self.solver.tol_residual;
        c.tol_step = self.solver.tol_step;
        c.max_iter = self.solver.max_iter;
        c.continuation = self.solver.continuation.clone();
        c.nu = self.solver.nu;
        c.evenize = self.solver.evenize;
        c.auto_grid = self.grid.auto;
        Ok(c)
    }

    /// Full configuration, defaults included, as TOML.
    pub fn echo(&self) -> String {
        toml::to_string(self).expect("run configuration serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = parse_config("[problem]\ns = 2\nr = 0\nmu = 0.4\n").unwrap();
        assert_eq!(cfg.grid.points, 4096);
        assert!((cfg.grid.length - 200.0 * std::f64::consts::PI).abs() < 1e-12);
        assert_eq!(cfg.solver.method, Method::Descent);
        let echo = cfg.echo();
        assert!(echo.contains("tol_residual"));
        assert_eq!(parse_config(&echo).unwrap(), cfg);
    }

    #[test]
    fn assumption_enforced() {
        let err = parse_config("[problem]\ns = 0.5\nr = 0\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("r < s - 1"), "{err}");
        assert!(parse_config("[problem]\ns = 0.5\nr = -0.6\n").is_ok());
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = parse_config("[problem]\ns = 2\nr = 0\nmuu = 0.4\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("muu"), "{err}");
        let err = parse_config("[problem]\ns = 2\nr = 0\n[grid]\nN = \"many\"\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("N"), "{err}");
    }
}
