//! Named initial-data and test-field profiles on the periodic grid.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{Grid2D, RealField, SpectralField};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(tag = "profile", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// `a (cos x₁ + cos 2x₂)` in units of the base wavenumber `2π/L`.
    TwoMode { amplitude: f64 },
    /// `a cos(k₁x₁ + k₂x₂)`; a steady state of the transport equation.
    SingleMode { k1: i64, k2: i64, amplitude: f64 },
    /// Random mean-zero field supported on `0 < |k| ≤ kmax`, RMS equal to `amplitude`.
    RandomBandlimited {
        seed: u64,
        kmax: f64,
        amplitude: f64,
    },
    /// Opposite-signed periodized Gaussians separated along `x₁`, mean removed.
    GaussianVortexPair {
        sigma: f64,
        separation: f64,
        amplitude: f64,
    },
}

impl InitialData {
    pub fn sample(&self, grid: &Grid2D) -> Result<RealField> {
        match *self {
            InitialData::TwoMode { amplitude } => Ok(two_mode(grid, amplitude)),
            InitialData::SingleMode { k1, k2, amplitude } => {
                Ok(single_mode(grid, k1, k2, amplitude))
            }
            InitialData::RandomBandlimited {
                seed,
                kmax,
                amplitude,
            } => random_bandlimited(grid, seed, kmax, amplitude),
            InitialData::GaussianVortexPair {
                sigma,
                separation,
                amplitude,
            } => gaussian_vortex_pair(grid, sigma, separation, amplitude),
        }
    }
}

pub fn two_mode(grid: &Grid2D, amplitude: f64) -> RealField {
    let k = 2.0 * PI / grid.length();
    RealField::from_fn(grid, |x1, x2| {
        amplitude * ((k * x1).cos() + (2.0 * k * x2).cos())
    })
}

pub fn single_mode(grid: &Grid2D, k1: i64, k2: i64, amplitude: f64) -> RealField {
    let k = 2.0 * PI / grid.length();
    let (a, b) = (k * k1 as f64, k * k2 as f64);
    RealField::from_fn(grid, |x1, x2| amplitude * (a * x1 + b * x2).cos())
}

/// Mean-zero random field with Gaussian coefficients on `0 < |k| ≤ kmax`
/// (integer mode units), scaled to RMS `amplitude`. Deterministic in `seed`.
pub fn random_bandlimited(
    grid: &Grid2D,
    seed: u64,
    kmax: f64,
    amplitude: f64,
) -> Result<RealField> {
    let n = grid.n();
    if !(kmax >= 1.0 && kmax < (n / 2) as f64) {
        return Err(Error::out_of_range("kmax", kmax, "1 <= kmax < n/2"));
    }
    let unit = 2.0 * PI / grid.length();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = vec![Complex64::default(); grid.len()];
    for (idx, c) in coeffs.iter_mut().enumerate() {
        let k = grid.wavenumber_magnitude(idx) / unit;
        // Draw for every mode so the stream does not depend on kmax.
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        if idx != 0 && k <= kmax && !grid.is_nyquist(idx) {
            *c = Complex64::new(re, im);
        }
    }
    let f = SpectralField::from_raw(grid, coeffs)
        .to_real()
        .without_mean();
    let rms = (f.values().iter().map(|v| v * v).sum::<f64>() / grid.len() as f64).sqrt();
    if rms == 0.0 {
        return Err(Error::Config("random field degenerated to zero".into()));
    }
    Ok(f.scaled(amplitude / rms))
}

pub fn gaussian_vortex_pair(
    grid: &Grid2D,
    sigma: f64,
    separation: f64,
    amplitude: f64,
) -> Result<RealField> {
    let l = grid.length();
    if !(sigma > 0.0 && sigma < l / 4.0) {
        return Err(Error::out_of_range("sigma", sigma, "0 < sigma < L/4"));
    }
    let c = 0.5 * l;
    let h = 0.5 * separation;
    let g = |x: f64, y: f64, cx: f64| -> f64 {
        let mut s = 0.0;
        for i in -1..=1 {
            for j in -1..=1 {
                let dx = x - cx + i as f64 * l;
                let dy = y - c + j as f64 * l;
                s += (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp();
            }
        }
        s
    };
    Ok(
        RealField::from_fn(grid, |x, y| amplitude * (g(x, y, c - h) - g(x, y, c + h)))
            .without_mean(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_field_is_bandlimited_and_reproducible() {
        let g = Grid2D::periodic(32).unwrap();
        let a = random_bandlimited(&g, 7, 5.0, 1.0).unwrap();
        let b = random_bandlimited(&g, 7, 5.0, 1.0).unwrap();
        assert_eq!(a, b);
        assert!(a.is_mean_zero());
        let hat = a.to_spectral();
        assert!(hat.tail_fraction(5.0 + 1e-9) < 1e-28);
        assert!(hat.hermitian_defect() < 1e-12);
        let c = random_bandlimited(&g, 8, 5.0, 1.0).unwrap();
        assert!(a.max_abs_diff(&c).unwrap() > 1e-3);
    }

    #[test]
    fn initial_data_parses_from_json() {
        let d: InitialData =
            serde_json::from_str(r#"{"profile":"two_mode","amplitude":1.0}"#).unwrap();
        assert_eq!(d, InitialData::TwoMode { amplitude: 1.0 });
        let bad = serde_json::from_str::<InitialData>(r#"{"profile":"two_mode","amp":1.0}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn vortex_pair_is_mean_zero() {
        let g = Grid2D::periodic(64).unwrap();
        let f = gaussian_vortex_pair(&g, 0.4, 1.5, 1.0).unwrap();
        assert!(f.is_mean_zero());
        assert!(f.max_abs() > 0.9);
    }
}
