use std::f64::consts::PI;
use std::sync::Arc;

use super::fft::{self, Fft2};
use crate::error::{Error, Result};

/// Uniform periodic grid on `[0, L)²` with `n` points per axis.
///
/// Fields are stored row-major: entry `row * n + col` sits at
/// `x1 = col * L / n`, `x2 = row * L / n`, and the matching Fourier
/// coefficient carries wavenumber `(k1, k2) = (wn[col], wn[row])`.
#[derive(Clone)]
pub struct Grid2D {
    n: usize,
    length: f64,
    wavenumbers: Arc<[f64]>,
    fft: Arc<Fft2>,
}

impl std::fmt::Debug for Grid2D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Grid2D")
            .field("n", &self.n)
            .field("length", &self.length)
            .finish()
    }
}

impl PartialEq for Grid2D {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.length.to_bits() == other.length.to_bits()
    }
}

/// Smallest supported grid.
pub const MIN_POINTS: usize = 16;

pub fn make_grid(n: usize, length: f64) -> Result<Grid2D> {
    Grid2D::new(n, length)
}

impl Grid2D {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if !n.is_power_of_two() || n < MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "n = {n} must be a power of two and at least {MIN_POINTS}"
            )));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "length = {length} must be positive"
            )));
        }
        let scale = 2.0 * PI / length;
        let wavenumbers: Arc<[f64]> = (0..n)
            .map(|i| signed_frequency(i, n) as f64 * scale)
            .collect();
        Ok(Self {
            n,
            length,
            wavenumbers,
            fft: fft::plan(n),
        })
    }

    /// The standard torus `[0, 2π)²`.
    pub fn periodic(n: usize) -> Result<Self> {
        Self::new(n, 2.0 * PI)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Quadrature weight `(L/n)²` of a single grid cell.
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dx()
    }

    /// Per-axis wavenumbers in FFT order `{0, 1, …, n/2−1, −n/2, …, −1}·2π/L`.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Wavenumber vector of the coefficient stored at flat index `idx`.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> (f64, f64) {
        (
            self.wavenumbers[idx % self.n],
            self.wavenumbers[idx / self.n],
        )
    }

    #[inline]
    pub fn wavenumber_magnitude(&self, idx: usize) -> f64 {
        let (k1, k2) = self.wavevector(idx);
        k1.hypot(k2)
    }

    /// True when either axis index of `idx` is the Nyquist index `n/2`.
    #[inline]
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let h = self.n / 2;
        idx % self.n == h || idx / self.n == h
    }

    /// Per-axis Nyquist wavenumber `(n/2)·2π/L`.
    pub fn nyquist_wavenumber(&self) -> f64 {
        (self.n / 2) as f64 * 2.0 * PI / self.length
    }

    /// Largest wavenumber magnitude present on the grid (the corner mode).
    pub fn max_wavenumber(&self) -> f64 {
        self.nyquist_wavenumber() * 2f64.sqrt()
    }

    /// Physical coordinate of axis index `i`.
    #[inline]
    pub fn coordinate(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    pub(crate) fn fft(&self) -> &Fft2 {
        &self.fft
    }
}

/// Signed frequency of FFT index `i` for transform size `n`.
#[inline]
pub(crate) fn signed_frequency(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}
