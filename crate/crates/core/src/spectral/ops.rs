//! Fourier-multiplier operators and norms on the periodic grid.

use num_complex::Complex64;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

use super::field::{ensure_same_grid, RealField, SpectralField};
use super::grid::{signed_frequency, Grid2D};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Whether a symbol is odd in ξ. Odd symbols have their Nyquist coefficients
/// zeroed so the output stays real.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// A Fourier multiplier `ξ ↦ m(ξ)` with an explicit value at `ξ = 0`.
pub struct MultiplierSpec<'a> {
    symbol: Box<dyn Fn(f64, f64) -> Complex64 + Send + Sync + 'a>,
    zero_mode: Complex64,
    parity: Parity,
}

impl<'a> MultiplierSpec<'a> {
    pub fn new(
        symbol: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'a,
        zero_mode: Complex64,
        parity: Parity,
    ) -> Self {
        Self {
            symbol: Box::new(symbol),
            zero_mode,
            parity,
        }
    }

    /// Real radial symbol `m(|ξ|)`.
    pub fn radial(m: impl Fn(f64) -> f64 + Send + Sync + 'a, zero_mode: f64) -> Self {
        Self::new(
            move |k1, k2| Complex64::new(m(k1.hypot(k2)), 0.0),
            Complex64::new(zero_mode, 0.0),
            Parity::Even,
        )
    }

    pub fn identity() -> Self {
        Self::radial(|_| 1.0, 1.0)
    }

    pub fn eval(&self, k1: f64, k2: f64) -> Complex64 {
        if k1 == 0.0 && k2 == 0.0 {
            self.zero_mode
        } else {
            (self.symbol)(k1, k2)
        }
    }
}

pub fn apply_multiplier(f: &SpectralField, m: &MultiplierSpec<'_>) -> Result<SpectralField> {
    if !(m.zero_mode.re.is_finite() && m.zero_mode.im.is_finite()) {
        return Err(Error::NonFinite("multiplier zero mode".into()));
    }
    let grid = f.grid();
    let mut out = Vec::with_capacity(grid.len());
    for (idx, c) in f.coeffs().iter().enumerate() {
        if m.parity == Parity::Odd && grid.is_nyquist(idx) {
            out.push(Complex64::default());
            continue;
        }
        let (k1, k2) = grid.wavevector(idx);
        let v = m.eval(k1, k2);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NonFinite(format!(
                "multiplier symbol at wavenumber ({k1}, {k2})"
            )));
        }
        out.push(v * c);
    }
    Ok(SpectralField::from_raw(grid, out))
}

fn apply_real(f: &RealField, m: &MultiplierSpec<'_>) -> Result<RealField> {
    Ok(apply_multiplier(&f.to_spectral(), m)?.to_real())
}

fn require_mean_zero(f: &RealField, what: &str) -> Result<()> {
    if f.is_mean_zero() {
        Ok(())
    } else {
        Err(Error::ZeroModeSingularity(format!(
            "{what} requires a mean-zero field (mean = {:.3e})",
            f.mean()
        )))
    }
}

/// `Λ^s = (−Δ)^{s/2}`, symbol `|ξ|^s`. Negative orders annihilate the zero mode
/// and require mean-zero input.
pub fn fractional_laplacian(f: &RealField, s: f64) -> Result<RealField> {
    if s < 0.0 {
        require_mean_zero(f, "negative-order fractional Laplacian")?;
    }
    let zero = if s == 0.0 { 1.0 } else { 0.0 };
    apply_real(f, &MultiplierSpec::radial(move |k| k.powf(s), zero))
}

/// `J^s = (I − Δ)^{s/2}`, symbol `(1 + |ξ|²)^{s/2}`.
pub fn bessel_potential(f: &RealField, s: f64) -> Result<RealField> {
    apply_real(
        f,
        &MultiplierSpec::radial(move |k| (1.0 + k * k).powf(0.5 * s), 1.0),
    )
}

/// Order and kernel normalization of the Riesz potential `I_σ = (−Δ)^{−σ/2}`.
///
/// `gamma` is the constant multiplying `|x|^{σ−d}` in the convolution kernel,
/// `Γ(d/2 − σ/2) / (π^{d/2} 2^σ Γ(σ/2))`; in the plane `gamma(1) = 1/(2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RieszParams {
    pub sigma: f64,
    pub gamma: f64,
    pub dimension: u32,
}

impl RieszParams {
    pub fn new(sigma: f64) -> Result<Self> {
        Self::with_dimension(sigma, 2)
    }

    pub fn with_dimension(sigma: f64, dimension: u32) -> Result<Self> {
        let d = dimension as f64;
        if !(sigma > 0.0 && sigma < d) {
            return Err(Error::out_of_range("sigma", sigma, "0 < sigma < dimension"));
        }
        let gamma =
            gamma(0.5 * (d - sigma)) / (PI.powf(0.5 * d) * 2f64.powf(sigma) * gamma(0.5 * sigma));
        Ok(Self {
            sigma,
            gamma,
            dimension,
        })
    }

    /// Kernel value `gamma · |x|^{σ−d}` at distance `r`.
    pub fn kernel(&self, r: f64) -> f64 {
        self.gamma * r.powf(self.sigma - self.dimension as f64)
    }
}

pub fn riesz_potential(f: &RealField, p: &RieszParams) -> Result<RealField> {
    if p.dimension != 2 || !(p.sigma > 0.0 && p.sigma < 2.0) {
        return Err(Error::out_of_range(
            "sigma",
            p.sigma,
            "0 < sigma < 2 in the plane",
        ));
    }
    require_mean_zero(f, "Riesz potential")?;
    fractional_laplacian(f, -p.sigma)
}

/// Velocity `u = ∇^⊥(−Δ)^{−1+α}ω`, symbol `i k^⊥ |k|^{−2+2α}` with `k^⊥ = (−k₂, k₁)`.
pub fn biot_savart(omega: &RealField, alpha: f64) -> Result<(RealField, RealField)> {
    check_alpha(alpha)?;
    require_mean_zero(omega, "Biot-Savart law")?;
    let hat = omega.to_spectral();
    let (u1, u2) = biot_savart_spectral(&hat, alpha);
    Ok((u1.to_real(), u2.to_real()))
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=0.5).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::out_of_range("alpha", alpha, "0 <= alpha <= 1/2"))
    }
}

/// Spectral velocity of a spectral scalar; zero mode and Nyquist lines are zero.
pub(crate) fn biot_savart_spectral(
    hat: &SpectralField,
    alpha: f64,
) -> (SpectralField, SpectralField) {
    let grid = hat.grid();
    let mut u1 = vec![Complex64::default(); grid.len()];
    let mut u2 = vec![Complex64::default(); grid.len()];
    for (idx, c) in hat.coeffs().iter().enumerate() {
        if idx == 0 || grid.is_nyquist(idx) {
            continue;
        }
        let (k1, k2) = grid.wavevector(idx);
        let w = (k1 * k1 + k2 * k2).powf(alpha - 1.0);
        u1[idx] = -I * k2 * w * c;
        u2[idx] = I * k1 * w * c;
    }
    (
        SpectralField::from_raw(grid, u1),
        SpectralField::from_raw(grid, u2),
    )
}

/// Spectral partial derivatives `(∂₁f, ∂₂f)`.
pub fn gradient(f: &RealField) -> (RealField, RealField) {
    let (a, b) = gradient_spectral(&f.to_spectral());
    (a.to_real(), b.to_real())
}

pub(crate) fn gradient_spectral(hat: &SpectralField) -> (SpectralField, SpectralField) {
    let grid = hat.grid();
    let mut d1 = vec![Complex64::default(); grid.len()];
    let mut d2 = vec![Complex64::default(); grid.len()];
    for (idx, c) in hat.coeffs().iter().enumerate() {
        if grid.is_nyquist(idx) {
            continue;
        }
        let (k1, k2) = grid.wavevector(idx);
        d1[idx] = I * k1 * c;
        d2[idx] = I * k2 * c;
    }
    (
        SpectralField::from_raw(grid, d1),
        SpectralField::from_raw(grid, d2),
    )
}

pub fn divergence(u1: &RealField, u2: &RealField) -> Result<RealField> {
    ensure_same_grid(u1.grid(), u2.grid())?;
    let (d1, _) = gradient_spectral(&u1.to_spectral());
    let (_, d2) = gradient_spectral(&u2.to_spectral());
    let sum = d1
        .coeffs()
        .iter()
        .zip(d2.coeffs())
        .map(|(a, b)| a + b)
        .collect();
    Ok(SpectralField::from_raw(u1.grid(), sum).to_real())
}

/// `‖f‖_{L^p}` by the periodic trapezoid rule, `p = ∞` gives the max norm.
pub fn lp_norm(f: &RealField, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::out_of_range("p", p, "p >= 1"));
    }
    Ok(lp_norm_slice(f.values(), f.grid().cell_area(), p))
}

pub(crate) fn lp_norm_slice(values: &[f64], cell: f64, p: f64) -> f64 {
    if p.is_infinite() {
        return values.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    if p == 2.0 {
        return (values.iter().map(|v| v * v).sum::<f64>() * cell).sqrt();
    }
    if p == 1.0 {
        return values.iter().map(|v| v.abs()).sum::<f64>() * cell;
    }
    (values.iter().map(|v| v.abs().powf(p)).sum::<f64>() * cell).powf(1.0 / p)
}

/// `‖f‖_{H^s}² = Σ (1+|k|²)^s |f̂(k)|²` with the Plancherel weight `L²/n⁴`.
pub fn sobolev_norm(f: &RealField, s: f64) -> f64 {
    spectral_sobolev_norm(&f.to_spectral(), s)
}

/// `‖f‖_{Ḣ^s}² = Σ_{k≠0} |k|^{2s} |f̂(k)|²`.
pub fn homogeneous_sobolev_norm(f: &RealField, s: f64) -> Result<f64> {
    if s < 0.0 {
        require_mean_zero(f, "negative-order homogeneous Sobolev norm")?;
    }
    Ok(spectral_homogeneous_norm(&f.to_spectral(), s))
}

pub(crate) fn plancherel_weight(grid: &Grid2D) -> f64 {
    let n2 = grid.len() as f64;
    grid.length() * grid.length() / (n2 * n2)
}

pub(crate) fn spectral_sobolev_norm(hat: &SpectralField, s: f64) -> f64 {
    let grid = hat.grid();
    let sum: f64 = hat
        .coeffs()
        .iter()
        .enumerate()
        .map(|(idx, c)| {
            let k = grid.wavenumber_magnitude(idx);
            (1.0 + k * k).powf(s) * c.norm_sqr()
        })
        .sum();
    (sum * plancherel_weight(grid)).sqrt()
}

pub(crate) fn spectral_homogeneous_norm(hat: &SpectralField, s: f64) -> f64 {
    let grid = hat.grid();
    let sum: f64 = hat
        .coeffs()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(idx, c)| grid.wavenumber_magnitude(idx).powf(2.0 * s) * c.norm_sqr())
        .sum();
    (sum * plancherel_weight(grid)).sqrt()
}

/// Product `uv` projected onto the grid's modes, free of aliasing: both factors
/// are zero-padded to a `3n/2` grid, multiplied there, and truncated back.
/// Nyquist coefficients of the inputs are dropped.
pub fn dealiased_product(u: &RealField, v: &RealField) -> Result<RealField> {
    ensure_same_grid(u.grid(), v.grid())?;
    let pad = Padding::new(u.grid());
    let a = pad.to_physical(u.to_spectral().coeffs());
    let b = pad.to_physical(v.to_spectral().coeffs());
    let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    Ok(SpectralField::from_raw(u.grid(), pad.to_spectral(&prod)).to_real())
}

/// 3/2 zero-padding between a grid and its enlarged product grid.
pub(crate) struct Padding {
    n: usize,
    m: usize,
    fft: std::sync::Arc<super::fft::Fft2>,
}

impl Padding {
    pub(crate) fn new(grid: &Grid2D) -> Self {
        let n = grid.n();
        let m = 3 * n / 2;
        Self {
            n,
            m,
            fft: super::fft::plan(m),
        }
    }

    fn padded_index(&self, i: usize) -> Option<usize> {
        let k = signed_frequency(i, self.n);
        if k == -(self.n as i64 / 2) {
            None
        } else if k >= 0 {
            Some(k as usize)
        } else {
            Some((self.m as i64 + k) as usize)
        }
    }

    /// Physical samples on the padded grid of the field with coefficients `coeffs`.
    pub(crate) fn to_physical(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let (n, m) = (self.n, self.m);
        let mut buf = vec![Complex64::default(); m * m];
        let scale = 1.0 / (n * n) as f64;
        for row in 0..n {
            let Some(pr) = self.padded_index(row) else {
                continue;
            };
            for col in 0..n {
                let Some(pc) = self.padded_index(col) else {
                    continue;
                };
                buf[pr * m + pc] = coeffs[row * n + col] * scale;
            }
        }
        self.fft.inverse(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Coefficients on the original grid of padded physical samples, truncated.
    pub(crate) fn to_spectral(&self, values: &[f64]) -> Vec<Complex64> {
        let (n, m) = (self.n, self.m);
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft.forward(&mut buf);
        let scale = (n * n) as f64 / (m * m) as f64;
        let mut out = vec![Complex64::default(); n * n];
        for row in 0..n {
            let Some(pr) = self.padded_index(row) else {
                continue;
            };
            for col in 0..n {
                let Some(pc) = self.padded_index(col) else {
                    continue;
                };
                out[row * n + col] = buf[pr * m + pc] * scale;
            }
        }
        out
    }
}
