use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Periodic cube `[-L/2, L/2)^3` sampled with `n` points per axis.
///
/// Physical index `i` sits at `-L/2 + i*h`; frequency index `k` follows the
/// usual FFT ordering, so wavenumber `2*pi*k/L` with `k` in `-n/2..n/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid3 {
    n: usize,
    box_length: f64,
}

impl Grid3 {
    pub fn new(n: usize, box_length: f64) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be even and >= 8, got {n}"
            )));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive, got {box_length}"
            )));
        }
        Ok(Self { n, box_length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    pub fn spacing(&self) -> f64 {
        self.box_length / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    /// Total number of samples, `n^3`.
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Same sample count on a box scaled by `factor`: sample `i` of the new
    /// grid sits at `factor` times the position of sample `i` here.
    pub fn dilated(&self, factor: f64) -> Result<Self> {
        Self::new(self.n, self.box_length * factor)
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        -0.5 * self.box_length + i as f64 * self.spacing()
    }

    #[inline]
    pub fn split(&self, idx: usize) -> [usize; 3] {
        let n = self.n;
        [idx / (n * n), (idx / n) % n, idx % n]
    }

    #[inline]
    pub fn index(&self, i: [usize; 3]) -> usize {
        (i[0] * self.n + i[1]) * self.n + i[2]
    }

    pub fn position(&self, idx: usize) -> [f64; 3] {
        let [i, j, k] = self.split(idx);
        [self.coord(i), self.coord(j), self.coord(k)]
    }

    /// Signed integer wavenumber of frequency index `i`.
    #[inline]
    pub fn wave_index(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    #[inline]
    pub fn wavenumber(&self, i: usize) -> f64 {
        2.0 * PI * self.wave_index(i) as f64 / self.box_length
    }

    pub fn frequency(&self, idx: usize) -> [f64; 3] {
        let [i, j, k] = self.split(idx);
        [self.wavenumber(i), self.wavenumber(j), self.wavenumber(k)]
    }

    /// `|k|^2` as an integer for frequency index `idx`; `|xi|^2 = (2pi/L)^2 |k|^2`.
    #[inline]
    pub fn shell(&self, idx: usize) -> usize {
        let [i, j, k] = self.split(idx);
        let (a, b, c) = (self.wave_index(i), self.wave_index(j), self.wave_index(k));
        (a * a + b * b + c * c) as usize
    }

    /// `|xi|^2` per unit shell index.
    pub fn shell_unit(&self) -> f64 {
        (2.0 * PI / self.box_length).powi(2)
    }

    /// Largest shell index on the lattice, `3 (n/2)^2`.
    pub fn max_shell(&self) -> usize {
        3 * (self.n / 2) * (self.n / 2)
    }

    /// `|xi|^2` for every lattice point, in frequency storage order.
    pub fn frequency_squares(&self) -> Vec<f64> {
        let unit = self.shell_unit();
        (0..self.len()).map(|i| unit * self.shell(i) as f64).collect()
    }

    /// Shell index for every lattice point.
    pub fn shells(&self) -> Vec<usize> {
        (0..self.len()).map(|i| self.shell(i)).collect()
    }

    /// Largest wavenumber magnitude along one axis, `pi n / L`.
    pub fn nyquist(&self) -> f64 {
        PI * self.n as f64 / self.box_length
    }
}
