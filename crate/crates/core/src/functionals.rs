//! Mass, dispersion, nonlocal quartic and energy functionals, their
//! gradients, the Euler-Lagrange residual and the Rayleigh wave speed.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{cubic_term, Field, Grid, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalValues {
    /// `1/2 int u^2`
    pub mass: f64,
    /// `1/2 int u Lambda^s u`
    pub dispersion: f64,
    /// `1/4 int u^2 Lambda^r u^2`
    pub nonlinear: f64,
    /// `dispersion - nonlinear`
    pub energy: f64,
}

impl FunctionalValues {
    fn new(mass: f64, dispersion: f64, nonlinear: f64) -> Self {
        FunctionalValues {
            mass,
            dispersion,
            nonlinear,
            energy: dispersion - nonlinear,
        }
    }

    /// `(int u Lambda^s u - int u^2 Lambda^r u^2) / int u^2`
    pub fn rayleigh_speed(&self) -> Result<f64> {
        if self.mass <= 0.0 {
            return Err(Error::ZeroField);
        }
        Ok((2.0 * self.dispersion - 4.0 * self.nonlinear) / (2.0 * self.mass))
    }
}

/// Dispersion and nonlinear symbols tabulated on one grid.
#[derive(Debug, Clone)]
pub struct Model {
    grid: Arc<Grid>,
    disp: Symbol,
    nl: Symbol,
    disp_weights: Vec<f64>,
    nl_padded: Option<Vec<f64>>,
}

/// Everything one functional evaluation produces.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub values: FunctionalValues,
    /// `Lambda^s u`
    pub linear: Field,
    /// `u Lambda^r u^2`
    pub cubic: Field,
    /// `Lambda^s u - u Lambda^r u^2`
    pub gradient: Field,
}

impl Evaluation {
    pub fn rayleigh_speed(&self) -> Result<f64> {
        self.values.rayleigh_speed()
    }

    /// `-nu u + gradient`
    pub fn residual(&self, u: &Field, nu: f64) -> Field {
        self.gradient.axpy(-nu, u)
    }
}

impl Model {
    pub fn new(grid: &Arc<Grid>, disp: &Symbol, nl: &Symbol) -> Self {
        let nl_padded = (!nl.is_identity()).then(|| nl.padded_weights(grid));
        Model {
            grid: Arc::clone(grid),
            disp: disp.clone(),
            nl: nl.clone(),
            disp_weights: disp.weights(grid),
            nl_padded,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn dispersion_symbol(&self) -> &Symbol {
        &self.disp
    }

    pub fn nonlinear_symbol(&self) -> &Symbol {
        &self.nl
    }

    /// Dispersion symbol values on the grid (FFT order).
    pub fn dispersion_weights(&self) -> &[f64] {
        &self.disp_weights
    }

    /// Smallest dispersion symbol value on the grid; speeds must stay below it.
    pub fn critical_speed(&self) -> f64 {
        self.disp_weights
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Spectrum of `u Lambda^r u^2` and the quartic value, from coefficients.
    pub(crate) fn cubic_spectrum(&self, coeffs: &[Complex64]) -> (Vec<Complex64>, f64) {
        let c = cubic_term(&self.grid, coeffs, self.nl_padded.as_deref());
        (c.coeffs, c.quartic)
    }

    pub fn evaluate(&self, u: &Field) -> Evaluation {
        let grid = &self.grid;
        let coeffs = u.spectrum();
        let l = grid.length();
        let mut lin = coeffs.clone();
        let mut disp = 0.0;
        for (c, w) in lin.iter_mut().zip(&self.disp_weights) {
            disp += w * c.norm_sqr();
            *c *= *w;
        }
        let (cubic_c, quartic) = self.cubic_spectrum(&coeffs);
        let linear = Field::from_spectrum(grid, &lin);
        let cubic = Field::from_spectrum(grid, &cubic_c);
        let gradient = linear.sub(&cubic);
        let mass = 0.5 * u.inner(u);
        Evaluation {
            values: FunctionalValues::new(mass, 0.5 * disp * l, quartic),
            linear,
            cubic,
            gradient,
        }
    }

    pub fn values(&self, u: &Field) -> FunctionalValues {
        let coeffs = u.spectrum();
        let disp: f64 = coeffs
            .iter()
            .zip(&self.disp_weights)
            .map(|(c, w)| w * c.norm_sqr())
            .sum();
        let (_, quartic) = self.cubic_spectrum(&coeffs);
        FunctionalValues::new(0.5 * u.inner(u), 0.5 * disp * self.grid.length(), quartic)
    }
}

pub fn mass(u: &Field) -> f64 {
    0.5 * u.inner(u)
}

pub fn dispersion(u: &Field, disp: &Symbol) -> f64 {
    let c = u.spectrum();
    let sum: f64 = c
        .iter()
        .zip(u.grid().wavenumbers())
        .map(|(ck, xi)| disp.eval(xi) * ck.norm_sqr())
        .sum();
    0.5 * sum * u.grid().length()
}

pub fn nonlocal_quartic(u: &Field, nl: &Symbol) -> f64 {
    let grid = u.grid();
    let w = (!nl.is_identity()).then(|| nl.padded_weights(grid));
    cubic_term(grid, &u.spectrum(), w.as_deref()).quartic
}

pub fn energy(u: &Field, disp: &Symbol, nl: &Symbol) -> FunctionalValues {
    FunctionalValues::new(mass(u), dispersion(u, disp), nonlocal_quartic(u, nl))
}

/// Frechet derivative of the energy, `Lambda^s u - u Lambda^r u^2`.
pub fn gradient_energy(u: &Field, disp: &Symbol, nl: &Symbol) -> Result<Field> {
    u.ensure_finite()?;
    Ok(Model::new(u.grid(), disp, nl).evaluate(u).gradient)
}

/// `-nu u + Lambda^s u - u Lambda^r u^2`
pub fn el_residual(u: &Field, nu: f64, disp: &Symbol, nl: &Symbol) -> Result<Field> {
    Ok(gradient_energy(u, disp, nl)?.axpy(-nu, u))
}

/// Wave speed that makes the residual orthogonal to `u`.
pub fn wave_speed_rayleigh(u: &Field, disp: &Symbol, nl: &Symbol) -> Result<f64> {
    energy(u, disp, nl).rayleigh_speed()
}
