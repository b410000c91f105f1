use std::collections::VecDeque;

use num_complex::Complex64;

use super::{project_mass, Method, SolveConfig, Status, WaveSolution};
use crate::error::{Error, Result};
use crate::functionals::{Evaluation, Model};
use crate::spectral::Field;

const ARMIJO: f64 = 1e-4;
const WINDOW: usize = 10;
const TAU_MIN: f64 = 1e-6;
const TAU_MAX: f64 = 1e3;
const MAX_BACKTRACK: usize = 40;
const NOISE_BAND: f64 = 100.0;

/// Diagonal spectral metric `m(xi) - m_min + 2 * gap`, where `gap` tracks the
/// current distance of the speed below the dispersion minimum.
struct Metric {
    weights: Vec<f64>,
}

impl Metric {
    fn new(model: &Model, nu: f64) -> Self {
        let m_min = model.critical_speed();
        let gap = if nu < m_min {
            (m_min - nu).clamp(1e-12, 0.5 * m_min)
        } else {
            0.5 * m_min
        };
        let weights = model
            .dispersion_weights()
            .iter()
            .map(|m| m - m_min + 2.0 * gap)
            .collect();
        Metric { weights }
    }

    /// Apply the inverse metric (the preconditioner).
    fn precondition(&self, f: &Field) -> Field {
        let mut c = f.spectrum();
        for (ck, w) in c.iter_mut().zip(&self.weights) {
            *ck /= *w;
        }
        c[f.grid().nyquist()] = Complex64::new(0.0, 0.0);
        Field::from_spectrum(f.grid(), &c)
    }

    fn apply(&self, f: &Field) -> Field {
        let mut c = f.spectrum();
        for (ck, w) in c.iter_mut().zip(&self.weights) {
            *ck *= *w;
        }
        Field::from_spectrum(f.grid(), &c)
    }
}

struct Point {
    u: Field,
    eval: Evaluation,
    /// L2 gradient projected onto the tangent space of the mass sphere.
    tangent: Field,
}

impl Point {
    fn new(model: &Model, u: Field) -> Self {
        let eval = model.evaluate(&u);
        let lambda = eval.gradient.inner(&u) / u.inner(&u);
        let tangent = eval.gradient.axpy(-lambda, &u);
        Point { u, eval, tangent }
    }

    fn energy(&self) -> f64 {
        self.eval.values.energy
    }

    /// Roundoff scale of the energy.
    fn energy_noise(&self) -> f64 {
        1e-14 * (self.eval.values.dispersion.abs() + self.eval.values.nonlinear.abs())
    }

    fn residual(&self) -> f64 {
        self.tangent.l2_norm()
    }
}

/// Preconditioned projected-gradient descent of the energy on `Q = mu`.
///
/// The search direction is the gradient in the spectral metric of [`Metric`],
/// corrected to be tangent to the sphere; steps are Barzilai-Borwein lengths
/// with a nonmonotone Armijo backtracking over the last few energies.
pub fn constrained_descent(cfg: &SolveConfig, u0: &Field) -> Result<WaveSolution> {
    cfg.validate()?;
    u0.ensure_finite()?;
    u0.ensure_same_grid(&Field::zeros(&cfg.grid))?;
    let (lo, hi) = u0
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    if hi - lo <= 1e-14 * u0.sup_norm() || u0.sup_norm() == 0.0 {
        return Err(Error::ZeroField);
    }
    let model = cfg.model();
    let mu = cfg.mu;
    let mut point = Point::new(&model, project_mass(u0, mu)?);
    let mut history: VecDeque<f64> = VecDeque::with_capacity(WINDOW);
    let mut tau: f64 = 1.0;
    let mut status = Status::MaxIterations;
    let mut iterations = 0;

    for k in 0..cfg.max_iter {
        iterations = k;
        let nu = point.eval.rayleigh_speed()?;
        if point.residual() <= cfg.tol_residual {
            status = Status::Converged;
            break;
        }
        let metric = Metric::new(&model, nu);
        let direction = tangent_direction(&metric, &point);
        let slope = point.tangent.inner(&direction);
        if !(slope > 0.0) {
            status = Status::LineSearchFailed;
            break;
        }

        if history.len() == WINDOW {
            history.pop_front();
        }
        history.push_back(point.energy());
        let reference = history.iter().copied().fold(f64::NEG_INFINITY, f64::max);

        let mut step = tau.clamp(TAU_MIN, TAU_MAX);
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACK {
            let trial = project_mass(&point.u.axpy(-step, &direction), mu)?;
            let candidate = Point::new(&model, trial);
            let e = candidate.energy();
            let armijo = e <= reference - ARMIJO * step * slope + point.energy_noise();
            // once energy changes sink below roundoff, require a smaller residual instead
            let flat = e <= reference + NOISE_BAND * point.energy_noise()
                && candidate.residual() < point.residual();
            if e.is_finite() && (armijo || flat) {
                accepted = Some(candidate);
                break;
            }
            step *= 0.5;
        }
        let Some(next) = accepted else {
            status = Status::LineSearchFailed;
            break;
        };

        let s = next.u.sub(&point.u);
        let s_norm = s.l2_norm();
        let y = next.tangent.sub(&point.tangent);
        let sy = s.inner(&y);
        tau = if sy > 0.0 {
            // BB1 in the metric: <s, W s> / <s, y>
            metric.apply(&s).inner(&s) / sy
        } else {
            TAU_MAX
        };
        point = next;
        iterations = k + 1;
        if s_norm <= cfg.tol_step {
            status = Status::StepTolerance;
            break;
        }
    }

    let nu = point.eval.rayleigh_speed()?;
    let residual = point.eval.residual(&point.u, nu).l2_norm();
    if status != Status::Converged && residual <= cfg.tol_residual {
        status = Status::Converged;
    }
    Ok(WaveSolution::assemble(
        &model,
        point.u,
        nu,
        mu,
        iterations,
        Method::Descent,
        status,
    ))
}

/// `P (g - lambda u)` with `lambda` chosen so the result is L2-orthogonal to `u`.
fn tangent_direction(metric: &Metric, point: &Point) -> Field {
    let pg = metric.precondition(&point.eval.gradient);
    let pu = metric.precondition(&point.u);
    let lambda = pg.inner(&point.u) / pu.inner(&point.u);
    pg.axpy(-lambda, &pu)
}
