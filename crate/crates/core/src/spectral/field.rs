use num_complex::Complex64;

use super::grid::Grid2D;
use crate::error::{Error, Result};

/// Relative tolerance under which a field counts as mean-zero.
pub const MEAN_ZERO_TOL: f64 = 1e-12;

/// Real samples on a [`Grid2D`], row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    grid: Grid2D,
    values: Vec<f64>,
}

/// Unnormalized Fourier coefficients of a field on a [`Grid2D`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid2D,
    coeffs: Vec<Complex64>,
}

impl RealField {
    pub fn zeros(grid: &Grid2D) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: &Grid2D, c: f64) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![c; grid.len()],
        }
    }

    /// Samples `f(x1, x2)` at every grid point.
    pub fn from_fn(grid: &Grid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.n();
        let mut values = Vec::with_capacity(grid.len());
        for row in 0..n {
            let x2 = grid.coordinate(row);
            for col in 0..n {
                values.push(f(grid.coordinate(col), x2));
            }
        }
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub fn from_values(grid: &Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for a {}x{} grid",
                values.len(),
                grid.n(),
                grid.n()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("sample {i} is {}", values[i])));
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    pub(crate) fn from_raw(grid: &Grid2D, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn is_mean_zero(&self) -> bool {
        self.mean().abs() <= MEAN_ZERO_TOL * self.max_abs().max(f64::MIN_POSITIVE)
    }

    /// Copy with the mean subtracted.
    pub fn without_mean(&self) -> Self {
        let m = self.mean();
        self.map(|v| v - m)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_with(&self, other: &RealField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        ensure_same_grid(&self.grid, &other.grid)?;
        Ok(Self {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &RealField) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &RealField) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product on the grid itself (aliased).
    pub fn mul(&self, other: &RealField) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn max_abs_diff(&self, other: &RealField) -> Result<f64> {
        ensure_same_grid(&self.grid, &other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn to_spectral(&self) -> SpectralField {
        let mut coeffs: Vec<Complex64> = self
            .values
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        self.grid.fft().forward(&mut coeffs);
        SpectralField {
            grid: self.grid.clone(),
            coeffs,
        }
    }
}

impl SpectralField {
    pub fn zeros(grid: &Grid2D) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn from_coeffs(grid: &Grid2D, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} coefficients for a {}x{} grid",
                coeffs.len(),
                grid.n(),
                grid.n()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            coeffs,
        })
    }

    pub(crate) fn from_raw(grid: &Grid2D, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        Self {
            grid: grid.clone(),
            coeffs,
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Inverse transform scaled by `1/n²`; the imaginary residue is dropped.
    pub fn to_real(&self) -> RealField {
        let mut buf = self.coeffs.clone();
        self.grid.fft().inverse(&mut buf);
        let scale = 1.0 / self.grid.len() as f64;
        RealField {
            grid: self.grid.clone(),
            values: buf.iter().map(|c| c.re * scale).collect(),
        }
    }

    /// `max |c(−k) − conj(c(k))| / max |c|`, zero for an exactly real field.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n();
        let scale = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.norm()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for row in 0..n {
            for col in 0..n {
                let mirror = ((n - row) % n) * n + (n - col) % n;
                let d = (self.coeffs[mirror] - self.coeffs[row * n + col].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst / scale
    }

    /// `Σ |c(k)|²` over all modes (no normalization).
    pub fn energy_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Fraction of `Σ|c|²` carried by modes with `|k| > radius`.
    pub fn tail_fraction(&self, radius: f64) -> f64 {
        let total = self.energy_sum();
        if total == 0.0 {
            return 0.0;
        }
        let tail: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(i, _)| self.grid.wavenumber_magnitude(*i) > radius)
            .map(|(_, c)| c.norm_sqr())
            .sum();
        tail / total
    }
}

pub fn fft_forward(f: &RealField) -> SpectralField {
    f.to_spectral()
}

pub fn fft_inverse(f: &SpectralField) -> RealField {
    f.to_real()
}

pub(crate) fn ensure_same_grid(a: &Grid2D, b: &Grid2D) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch(format!(
            "{}x{} (L = {}) vs {}x{} (L = {})",
            a.n(),
            a.n(),
            a.length(),
            b.n(),
            b.n(),
            b.length()
        )))
    }
}
