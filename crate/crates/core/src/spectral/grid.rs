use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Periodic collocation grid on `[-L/2, L/2)`.
///
/// Spectral coefficients are stored in FFT order (index `i` carries
/// wavenumber index `k = i` for `i < N/2` and `k = i - N` otherwise) and are
/// normalized as Fourier-series coefficients,
/// `c_k = (1/N) sum_j u_j exp(-i xi_k x_j)`, so that the box inner product is
/// `int u v dx = L * sum_k conj(c_k) d_k`.
pub struct Grid {
    length: f64,
    points: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    forward_padded: Arc<dyn Fft<f64>>,
    inverse_padded: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("length", &self.length)
            .field("points", &self.points)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points && self.length == other.length
    }
}

/// Build a grid of `points` nodes on a box of length `length`.
pub fn make_grid(length: f64, points: usize) -> Result<Arc<Grid>> {
    Grid::new(length, points).map(Arc::new)
}

impl Grid {
    pub fn new(length: f64, points: usize) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::BadLength(length));
        }
        if !points.is_multiple_of(2) || points < 8 {
            return Err(Error::OddOrSmallGrid(points));
        }
        let mut planner = FftPlanner::new();
        Ok(Grid {
            length,
            points,
            forward: planner.plan_fft_forward(points),
            inverse: planner.plan_fft_inverse(points),
            forward_padded: planner.plan_fft_forward(2 * points),
            inverse_padded: planner.plan_fft_inverse(2 * points),
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.node(j)).collect()
    }

    /// Signed mode number of FFT slot `i` on a grid of `n` points.
    pub(crate) fn mode_of(i: usize, n: usize) -> i64 {
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    pub fn mode(&self, i: usize) -> i64 {
        Self::mode_of(i, self.points)
    }

    pub fn base_wavenumber(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.length
    }

    /// Wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let dk = self.base_wavenumber();
        (0..self.points).map(|i| dk * self.mode(i) as f64).collect()
    }

    /// Wavenumbers of the 2N padded grid, FFT order.
    pub fn padded_wavenumbers(&self) -> Vec<f64> {
        let dk = self.base_wavenumber();
        let n2 = 2 * self.points;
        (0..n2).map(|i| dk * Self::mode_of(i, n2) as f64).collect()
    }

    pub fn max_wavenumber(&self) -> f64 {
        self.base_wavenumber() * (self.points / 2) as f64
    }

    /// FFT slot of the unpaired mode `k = -N/2`.
    pub fn nyquist(&self) -> usize {
        self.points / 2
    }

    fn phase(k: i64) -> f64 {
        // exp(i xi_k L / 2) = (-1)^k because the first node sits at -L/2
        if k.rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Physical samples to normalized coefficients.
    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(values.len(), self.points);
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        let n = self.points;
        let scale = 1.0 / n as f64;
        for (i, c) in buf.iter_mut().enumerate() {
            *c *= scale * Self::phase(Self::mode_of(i, n));
        }
        buf
    }

    /// Normalized coefficients to physical samples (real part).
    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<f64> {
        debug_assert_eq!(coeffs.len(), self.points);
        let n = self.points;
        let mut buf: Vec<Complex64> = coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| c * Self::phase(Self::mode_of(i, n)))
            .collect();
        self.inverse.process(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Embed N-grid coefficients into the 2N grid. The Nyquist coefficient
    /// is split evenly between `+N/2` and `-N/2` so the padded field stays real.
    pub fn pad(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let n = self.points;
        let half = n / 2;
        let mut out = vec![Complex64::new(0.0, 0.0); 2 * n];
        out[..half].copy_from_slice(&coeffs[..half]);
        out[2 * n - half + 1..].copy_from_slice(&coeffs[half + 1..]);
        let nyq = 0.5 * coeffs[half];
        out[half] = nyq;
        out[2 * n - half] = nyq;
        out
    }

    /// Restrict 2N-grid coefficients to the N band; the `+N/2` and `-N/2`
    /// modes fold into the Nyquist slot (sampling at the N nodes).
    pub fn truncate(&self, padded: &[Complex64]) -> Vec<Complex64> {
        let n = self.points;
        let half = n / 2;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        out[..half].copy_from_slice(&padded[..half]);
        out[half + 1..].copy_from_slice(&padded[2 * n - half + 1..]);
        out[half] = padded[half] + padded[2 * n - half];
        out
    }

    /// Padded coefficients to samples on the 2N nodes.
    pub fn inverse_padded(&self, padded: &[Complex64]) -> Vec<f64> {
        let n2 = 2 * self.points;
        let mut buf: Vec<Complex64> = padded
            .iter()
            .enumerate()
            .map(|(i, &c)| c * Self::phase(Self::mode_of(i, n2)))
            .collect();
        self.inverse_padded.process(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Samples on the 2N nodes to padded coefficients.
    pub fn forward_padded(&self, values: &[f64]) -> Vec<Complex64> {
        let n2 = 2 * self.points;
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward_padded.process(&mut buf);
        let scale = 1.0 / n2 as f64;
        for (i, c) in buf.iter_mut().enumerate() {
            *c *= scale * Self::phase(Self::mode_of(i, n2));
        }
        buf
    }
}
