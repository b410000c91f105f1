//! Pseudo-spectral time integration of `u_t + (Lambda^s u - u Lambda^r u^2)_x = 0`
//! with a fourth-order exponential time-differencing Runge-Kutta scheme.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::functionals::Model;
use crate::spectral::{shift, Field, Grid, Symbol};

#[derive(Debug, Clone)]
pub struct EvolveConfig {
    pub dt: f64,
    pub t_final: f64,
    pub disp: Symbol,
    pub nl: Symbol,
    /// Keep every `record_every`-th step; the first and last states are always kept.
    pub record_every: usize,
}

impl EvolveConfig {
    /// Time step set to a tenth of [`stability_ceiling`] for `u0`.
    pub fn for_field(u0: &Field, disp: Symbol, nl: Symbol, t_final: f64) -> Self {
        let dt = 0.1 * stability_ceiling(u0, &nl);
        EvolveConfig {
            dt,
            t_final,
            disp,
            nl,
            record_every: 100,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::param(
                "dt",
                format!("must be positive, got {}", self.dt),
            ));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::param(
                "T",
                format!("must be nonnegative, got {}", self.t_final),
            ));
        }
        if self.record_every < 1 {
            return Err(Error::param("record_every", "must be at least 1"));
        }
        Ok(())
    }
}

/// Explicit-part step scale `1 / (|u0|_inf^2 max|n(xi)| max|xi|)`; infinite
/// for the zero field.
pub fn stability_ceiling(u0: &Field, nl: &Symbol) -> f64 {
    let grid = u0.grid();
    let n_max = nl.weights(grid).iter().fold(0.0f64, |m, w| m.max(w.abs()));
    let a = u0.sup_norm();
    1.0 / (a * a * n_max * grid.max_wavenumber())
}

/// Per-mode factors `exp(-i xi m(xi) dt)` (FFT order).
pub fn linear_propagator(dt: f64, disp: &Symbol, grid: &Grid) -> Result<Vec<Complex64>> {
    if !(dt > 0.0) {
        return Err(Error::param("dt", "must be positive"));
    }
    Ok(grid
        .wavenumbers()
        .into_iter()
        .map(|xi| Complex64::from_polar(1.0, -xi * disp.eval(xi) * dt))
        .collect())
}

/// `(phi_1, phi_2, phi_3)(z)` with `phi_k(z) = sum_j z^j / (j + k)!`.
fn phi123(z: Complex64) -> (Complex64, Complex64, Complex64) {
    if z.norm() < 1.0 {
        let (mut p1, mut p2, mut p3) = (
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        );
        let mut zj = Complex64::new(1.0, 0.0);
        let mut fact = 1.0; // (j+1)!
        for j in 0..30 {
            fact *= (j + 1) as f64;
            let f2 = fact * (j + 2) as f64;
            let f3 = f2 * (j + 3) as f64;
            p1 += zj / fact;
            p2 += zj / f2;
            p3 += zj / f3;
            zj *= z;
        }
        (p1, p2, p3)
    } else {
        let p1 = (z.exp() - 1.0) / z;
        let p2 = (p1 - 1.0) / z;
        let p3 = (p2 - 0.5) / z;
        (p1, p2, p3)
    }
}

/// ETDRK4 coefficients for one grid and step.
#[derive(Debug, Clone)]
struct Etdrk4 {
    xi: Vec<f64>,
    e: Vec<Complex64>,
    e2: Vec<Complex64>,
    q: Vec<Complex64>,
    f1: Vec<Complex64>,
    f2: Vec<Complex64>,
    f3: Vec<Complex64>,
    nyquist: usize,
}

impl Etdrk4 {
    fn new(grid: &Grid, disp: &Symbol, dt: f64) -> Self {
        let xi = grid.wavenumbers();
        let nyquist = grid.nyquist();
        let n = xi.len();
        let mut s = Etdrk4 {
            xi: xi.clone(),
            e: Vec::with_capacity(n),
            e2: Vec::with_capacity(n),
            q: Vec::with_capacity(n),
            f1: Vec::with_capacity(n),
            f2: Vec::with_capacity(n),
            f3: Vec::with_capacity(n),
            nyquist,
        };
        for (k, &x) in xi.iter().enumerate() {
            let l = if k == nyquist {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, -x * disp.eval(x))
            };
            let z = l * dt;
            let (a1, _, _) = phi123(0.5 * z);
            let (p1, p2, p3) = phi123(z);
            s.e.push(z.exp());
            s.e2.push((0.5 * z).exp());
            s.q.push(0.5 * dt * a1);
            s.f1.push(dt * (p1 - 3.0 * p2 + 4.0 * p3));
            s.f2.push(dt * (p2 - 2.0 * p3));
            s.f3.push(dt * (4.0 * p3 - p2));
        }
        s
    }

    /// `i xi F[u Lambda^r u^2]`, Nyquist dropped.
    fn nonlinear(&self, model: &Model, c: &[Complex64]) -> Vec<Complex64> {
        let (mut cub, _) = model.cubic_spectrum(c);
        for (ck, x) in cub.iter_mut().zip(&self.xi) {
            *ck *= Complex64::new(0.0, *x);
        }
        cub[self.nyquist] = Complex64::new(0.0, 0.0);
        cub
    }

    fn step(&self, model: &Model, c: &[Complex64]) -> Vec<Complex64> {
        let nu = self.nonlinear(model, c);
        let a: Vec<Complex64> = (0..c.len())
            .map(|k| self.e2[k] * c[k] + self.q[k] * nu[k])
            .collect();
        let na = self.nonlinear(model, &a);
        let b: Vec<Complex64> = (0..c.len())
            .map(|k| self.e2[k] * c[k] + self.q[k] * na[k])
            .collect();
        let nb = self.nonlinear(model, &b);
        let cc: Vec<Complex64> = (0..c.len())
            .map(|k| self.e2[k] * a[k] + self.q[k] * (2.0 * nb[k] - nu[k]))
            .collect();
        let nc = self.nonlinear(model, &cc);
        let mut out: Vec<Complex64> = (0..c.len())
            .map(|k| {
                self.e[k] * c[k]
                    + self.f1[k] * nu[k]
                    + 2.0 * self.f2[k] * (na[k] + nb[k])
                    + self.f3[k] * nc[k]
            })
            .collect();
        out[self.nyquist] = Complex64::new(0.0, 0.0);
        out
    }
}

/// Advance `u` by one step of size `cfg.dt`.
pub fn step(u: &Field, cfg: &EvolveConfig) -> Result<Field> {
    cfg.validate()?;
    u.ensure_finite()?;
    let grid = u.grid();
    let model = Model::new(grid, &cfg.disp, &cfg.nl);
    let scheme = Etdrk4::new(grid, &cfg.disp, cfg.dt);
    let next = Field::from_spectrum(grid, &scheme.step(&model, &u.spectrum()));
    if !next.is_finite() {
        return Err(Error::BlowUp {
            time: cfg.dt,
            last_good: Box::new(u.clone()),
        });
    }
    Ok(next)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Conservation {
    pub time: f64,
    #[serde(rename = "Q")]
    pub mass: f64,
    #[serde(rename = "E")]
    pub energy: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<(f64, Field)>,
    pub conservation: Vec<Conservation>,
    /// Step actually used: `T / ceil(T / cfg.dt)`.
    pub dt: f64,
    pub steps: usize,
}

impl Trajectory {
    pub fn final_state(&self) -> &Field {
        &self
            .snapshots
            .last()
            .expect("trajectory has a first snapshot")
            .1
    }

    /// Largest `|Q(t) - Q(0)| / Q(0)` over the snapshots (0 for zero data).
    pub fn mass_drift(&self) -> f64 {
        relative_drift(self.conservation.iter().map(|c| c.mass))
    }

    pub fn energy_drift(&self) -> f64 {
        relative_drift(self.conservation.iter().map(|c| c.energy))
    }

    /// One `x,u` CSV per snapshot plus `manifest.json` with the series and `config`.
    pub fn write(&self, dir: &Path, config: serde_json::Value) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut files = Vec::with_capacity(self.snapshots.len());
        for (i, (_, u)) in self.snapshots.iter().enumerate() {
            let name = format!("snapshot_{i:05}.csv");
            u.write_csv(BufWriter::new(File::create(dir.join(&name))?))?;
            files.push(name);
        }
        let manifest = serde_json::json!({
            "times": self.snapshots.iter().map(|s| s.0).collect::<Vec<_>>(),
            "files": files,
            "conservation_times": self.conservation.iter().map(|c| c.time).collect::<Vec<_>>(),
            "Q_series": self.conservation.iter().map(|c| c.mass).collect::<Vec<_>>(),
            "E_series": self.conservation.iter().map(|c| c.energy).collect::<Vec<_>>(),
            "dt": self.dt,
            "steps": self.steps,
            "config": config,
        });
        let f = BufWriter::new(File::create(dir.join("manifest.json"))?);
        serde_json::to_writer_pretty(f, &manifest).map_err(std::io::Error::from)?;
        Ok(())
    }
}

fn relative_drift(series: impl Iterator<Item = f64>) -> f64 {
    let mut it = series;
    let Some(first) = it.next() else { return 0.0 };
    let worst = it.fold(0.0f64, |m, v| m.max((v - first).abs()));
    if first == 0.0 {
        worst
    } else {
        worst / first.abs()
    }
}

/// Integrate from `u0` to `cfg.t_final`. On blow-up the error carries the
/// last finite state.
pub fn evolve(u0: &Field, cfg: &EvolveConfig) -> Result<Trajectory> {
    cfg.validate()?;
    u0.ensure_finite()?;
    let grid: &Arc<Grid> = u0.grid();
    let model = Model::new(grid, &cfg.disp, &cfg.nl);
    let steps = (cfg.t_final / cfg.dt).ceil() as usize;
    let dt = if steps == 0 {
        cfg.dt
    } else {
        cfg.t_final / steps as f64
    };
    let scheme = Etdrk4::new(grid, &cfg.disp, dt);

    let record = |t: f64, u: &Field| {
        let v = model.values(u);
        Conservation {
            time: t,
            mass: v.mass,
            energy: v.energy,
        }
    };
    let mut snapshots = vec![(0.0, u0.clone())];
    let mut conservation = vec![record(0.0, u0)];
    let mut c = u0.spectrum();
    for n in 1..=steps {
        let next = scheme.step(&model, &c);
        let t = n as f64 * dt;
        if next.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::BlowUp {
                time: t,
                last_good: Box::new(Field::from_spectrum(grid, &c)),
            });
        }
        c = next;
        if n % cfg.record_every == 0 || n == steps {
            let u = Field::from_spectrum(grid, &c);
            conservation.push(record(t, &u));
            snapshots.push((t, u));
        }
    }
    Ok(Trajectory {
        snapshots,
        conservation,
        dt,
        steps,
    })
}

/// Evolve to `t_final`, undo a translation by `nu t_final`, and return the
/// relative L2 distance to `u0`.
pub fn traveling_frame_error(u0: &Field, nu: f64, t_final: f64, cfg: &EvolveConfig) -> Result<f64> {
    let norm = u0.l2_norm();
    if norm == 0.0 {
        return Err(Error::ZeroField);
    }
    if t_final == 0.0 {
        return Ok(0.0);
    }
    let cfg = EvolveConfig {
        t_final,
        record_every: usize::MAX,
        ..cfg.clone()
    };
    let traj = evolve(u0, &cfg)?;
    let back = shift(traj.final_state(), -nu * t_final);
    Ok(back.sub(u0).l2_norm() / norm)
}
