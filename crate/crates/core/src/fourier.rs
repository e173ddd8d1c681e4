//! Periodic grid, FFT plans and the spectral calculus shared by the profile
//! builder and the solver.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Uniform grid `x_j = j L / N` on a periodic domain of length `L`.
#[derive(Clone)]
pub struct PeriodicGrid {
    n: usize,
    length: f64,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for PeriodicGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicGrid")
            .field("n", &self.n)
            .field("length", &self.length)
            .finish()
    }
}

impl PeriodicGrid {
    /// Panics if `n` is zero or `length` is not a positive finite number;
    /// callers validate user input before building a grid.
    pub fn new(n: usize, length: f64) -> Self {
        assert!(n > 0, "grid needs at least one point");
        assert!(length.is_finite() && length > 0.0, "domain length must be positive");
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let wavenumbers = (0..n).map(|i| 2.0 * PI * mode_index(i, n) as f64 / length).collect();
        Self {
            n,
            length,
            wavenumbers,
            forward,
            inverse,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Angular wavenumbers `2πj/L` in FFT order (Nyquist carries `-N/2`).
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Signed integer mode of FFT slot `i`.
    pub fn mode(&self, i: usize) -> i64 {
        mode_index(i, self.n)
    }

    pub fn is_nyquist(&self, i: usize) -> bool {
        self.n.is_multiple_of(2) && i == self.n / 2
    }

    /// Unnormalized forward transform of real samples.
    pub fn forward(&self, samples: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    /// Inverse transform including the `1/N` factor; imaginary parts are dropped.
    pub fn inverse_real(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let mut buf = coeffs.to_vec();
        self.inverse_in_place(&mut buf);
        buf.iter().map(|c| c.re).collect()
    }

    /// Inverse transform including the `1/N` factor.
    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
        let scale = 1.0 / self.n as f64;
        for c in buf.iter_mut() {
            *c *= scale;
        }
    }

    /// Spectral derivative of real periodic samples. The Nyquist mode is dropped.
    pub fn derivative(&self, samples: &[f64]) -> Vec<f64> {
        let mut coeffs = self.forward(samples);
        self.differentiate_coeffs(&mut coeffs);
        self.inverse_real(&coeffs)
    }

    pub fn differentiate_coeffs(&self, coeffs: &mut [Complex64]) {
        for (i, c) in coeffs.iter_mut().enumerate() {
            if self.is_nyquist(i) {
                *c = Complex64::new(0.0, 0.0);
            } else {
                *c *= Complex64::new(0.0, self.wavenumbers[i]);
            }
        }
    }

    /// Mean-free antiderivative of real periodic samples. The mean of the input
    /// and its Nyquist component are discarded; the result is shifted so that
    /// its value at `x = 0` is zero.
    pub fn antiderivative(&self, samples: &[f64]) -> Vec<f64> {
        let mut coeffs = self.forward(samples);
        for (i, c) in coeffs.iter_mut().enumerate() {
            let k = self.wavenumbers[i];
            if i == 0 || self.is_nyquist(i) {
                *c = Complex64::new(0.0, 0.0);
            } else {
                *c /= Complex64::new(0.0, k);
            }
        }
        let mut out = self.inverse_real(&coeffs);
        let origin = out[0];
        for v in out.iter_mut() {
            *v -= origin;
        }
        out
    }
}

fn mode_index(i: usize, n: usize) -> i64 {
    if i < n.div_ceil(2) {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// A grid extremum refined by the parabola through the extremal sample and its
/// two periodic neighbours.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub value: f64,
    /// Position in `[0, L)`.
    pub position: f64,
}

/// Refined (minimum, maximum) of periodic samples on `grid`.
pub fn refined_extrema(samples: &[f64], grid: &PeriodicGrid) -> (Extremum, Extremum) {
    let n = samples.len();
    let (mut imin, mut imax) = (0, 0);
    for (i, &v) in samples.iter().enumerate() {
        if v < samples[imin] {
            imin = i;
        }
        if v > samples[imax] {
            imax = i;
        }
    }
    let refine = |i: usize| -> Extremum {
        let left = samples[(i + n - 1) % n];
        let mid = samples[i];
        let right = samples[(i + 1) % n];
        let curvature = left - 2.0 * mid + right;
        let (offset, value) = if n < 3 || curvature == 0.0 {
            (0.0, mid)
        } else {
            let d = 0.5 * (left - right) / curvature;
            (d, mid - 0.25 * (left - right) * d)
        };
        let pos = (i as f64 + offset) * grid.spacing();
        Extremum {
            value,
            position: pos.rem_euclid(grid.length()),
        }
    };
    (refine(imin), refine(imax))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_of_sine() {
        let grid = PeriodicGrid::new(64, 2.0 * PI);
        let u: Vec<f64> = grid.points().iter().map(|x| (3.0 * x).sin()).collect();
        let du = grid.derivative(&u);
        for (x, d) in grid.points().iter().zip(&du) {
            assert!((d - 3.0 * (3.0 * x).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn antiderivative_pins_origin() {
        let grid = PeriodicGrid::new(32, 10.0);
        let k = 2.0 * PI / 10.0;
        let du: Vec<f64> = grid.points().iter().map(|x| (k * x).cos()).collect();
        let u = grid.antiderivative(&du);
        assert_eq!(u[0], 0.0);
        for (x, v) in grid.points().iter().zip(&u) {
            assert!((v - (k * x).sin() / k).abs() < 1e-12);
        }
    }

    #[test]
    fn parabolic_refinement_recovers_offgrid_vertex() {
        let grid = PeriodicGrid::new(100, 1.0);
        // (x - 0.503)^2 sampled at spacing 0.01 has its vertex between samples.
        let f: Vec<f64> = grid.points().iter().map(|x| (x - 0.503).powi(2) - 1.0).collect();
        let (min, _) = refined_extrema(&f, &grid);
        assert!((min.value + 1.0).abs() < 1e-14);
        assert!((min.position - 0.503).abs() < 1e-12);
    }

    #[test]
    fn mode_ordering() {
        let grid = PeriodicGrid::new(8, 2.0 * PI);
        let modes: Vec<i64> = (0..8).map(|i| grid.mode(i)).collect();
        assert_eq!(modes, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert!(grid.is_nyquist(4));
    }
}
