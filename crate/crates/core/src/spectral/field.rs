use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};

/// Real-valued samples on a [`Grid`]. The spectrum is computed on demand.
#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.points() {
            return Err(Error::param(
                "values",
                format!("expected {} samples, got {}", grid.points(), values.len()),
            ));
        }
        Ok(Field { grid, values })
    }

    pub(crate) fn from_vec(grid: Arc<Grid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.points());
        Field { grid, values }
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.points()).map(|j| f(grid.node(j))).collect();
        Field {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Field {
            grid: Arc::clone(grid),
            values: vec![0.0; grid.points()],
        }
    }

    pub fn from_spectrum(grid: &Arc<Grid>, coeffs: &[Complex64]) -> Self {
        Field {
            grid: Arc::clone(grid),
            values: grid.inverse(coeffs),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn spectrum(&self) -> Vec<Complex64> {
        self.grid.forward(&self.values)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub(crate) fn ensure_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite)
        }
    }

    pub(crate) fn ensure_same_grid(&self, other: &Field) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch(
                self.grid.length(),
                self.grid.points(),
                other.grid.length(),
                other.grid.points(),
            ))
        }
    }

    /// Box quadrature `int u v dx`.
    pub fn inner(&self, other: &Field) -> f64 {
        dot(&self.values, &other.values) * self.grid.spacing()
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, c: f64) -> Field {
        self.map(|v| c * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `self + c * other`
    pub fn axpy(&self, c: f64, other: &Field) -> Field {
        Field {
            grid: Arc::clone(&self.grid),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + c * b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Field) -> Field {
        self.axpy(-1.0, other)
    }

    /// CSV dump with header `x,u`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,u")?;
        for (j, v) in self.values.iter().enumerate() {
            writeln!(out, "{:.16e},{:.16e}", self.grid.node(j), v)?;
        }
        Ok(())
    }

    /// CSV dump of the spectrum, header `k,xi,re,im`, ordered `k = -N/2 .. N/2-1`.
    pub fn write_spectrum_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let c = self.spectrum();
        let n = self.grid.points();
        let dk = self.grid.base_wavenumber();
        writeln!(out, "k,xi,re,im")?;
        for k in -(n as i64 / 2)..(n as i64 / 2) {
            let i = k.rem_euclid(n as i64) as usize;
            writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e}",
                k,
                dk * k as f64,
                c[i].re,
                c[i].im
            )?;
        }
        Ok(())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
