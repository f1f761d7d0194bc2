use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{check_alpha, ensure_same_grid, RealField, SpectralField};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Splitting `u^α − u^{α₀} = ū_I + ū_II` of the velocity difference.
#[derive(Debug, Clone)]
pub struct UBarParts {
    /// `∇^⊥(−Δ)^{−1+α} ω̄` with `ω̄ = ω^α − ω^{α₀}`.
    pub u_i: (RealField, RealField),
    /// `(∇^⊥(−Δ)^{−1+α} − ∇^⊥(−Δ)^{−1+α₀}) ω^{α₀}`.
    pub u_ii: (RealField, RealField),
}

/// `∇^⊥` applied with the radial symbol `w(|k|²)`; zero and Nyquist modes vanish.
pub(crate) fn perp_gradient(hat: &SpectralField, w: impl Fn(f64) -> f64) -> (RealField, RealField) {
    let grid = hat.grid();
    let mut u1 = vec![Complex64::default(); grid.len()];
    let mut u2 = vec![Complex64::default(); grid.len()];
    for (idx, c) in hat.coeffs().iter().enumerate() {
        if idx == 0 || grid.is_nyquist(idx) {
            continue;
        }
        let (k1, k2) = grid.wavevector(idx);
        let m = w(k1 * k1 + k2 * k2);
        u1[idx] = -I * k2 * m * c;
        u2[idx] = I * k1 * m * c;
    }
    let a = SpectralField::from_coeffs(grid, u1).expect("same length");
    let b = SpectralField::from_coeffs(grid, u2).expect("same length");
    (a.to_real(), b.to_real())
}

fn require_mean_zero(f: &RealField, what: &str) -> Result<()> {
    if f.is_mean_zero() {
        Ok(())
    } else {
        Err(Error::ZeroModeSingularity(format!(
            "{what} has mean {:.3e}",
            f.mean()
        )))
    }
}

/// `ū_I = ∇^⊥(−Δ)^{−1+α}ω̄`.
pub fn u_bar_i(omega_bar: &RealField, alpha: f64) -> Result<(RealField, RealField)> {
    check_alpha(alpha)?;
    require_mean_zero(omega_bar, "difference field")?;
    Ok(perp_gradient(&omega_bar.to_spectral(), |k2| {
        k2.powf(alpha - 1.0)
    }))
}

pub fn compute_u_bar_parts(
    omega_alpha0: &RealField,
    omega_alpha: &RealField,
    alpha: f64,
    alpha0: f64,
) -> Result<UBarParts> {
    check_alpha(alpha)?;
    check_alpha(alpha0)?;
    ensure_same_grid(omega_alpha0.grid(), omega_alpha.grid())?;
    require_mean_zero(omega_alpha0, "reference field")?;
    require_mean_zero(omega_alpha, "perturbed field")?;
    let bar = omega_alpha.sub(omega_alpha0)?;
    let u_i = perp_gradient(&bar.to_spectral(), |k2| k2.powf(alpha - 1.0));
    let u_ii = perp_gradient(&omega_alpha0.to_spectral(), |k2| {
        k2.powf(alpha - 1.0) - k2.powf(alpha0 - 1.0)
    });
    Ok(UBarParts { u_i, u_ii })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::samples::{random_bandlimited, single_mode};
    use crate::spectral::{biot_savart, Grid2D};

    #[test]
    fn parts_sum_to_velocity_difference() {
        let g = Grid2D::periodic(64).unwrap();
        let w0 = random_bandlimited(&g, 1, 8.0, 1.0).unwrap();
        let w = w0
            .add(&random_bandlimited(&g, 2, 8.0, 0.1).unwrap())
            .unwrap();
        let p = compute_u_bar_parts(&w0, &w, 0.3, 0.45).unwrap();
        let (a1, a2) = biot_savart(&w, 0.3).unwrap();
        let (b1, b2) = biot_savart(&w0, 0.45).unwrap();
        let d1 = a1.sub(&b1).unwrap();
        let d2 = a2.sub(&b2).unwrap();
        let s1 = p.u_i.0.add(&p.u_ii.0).unwrap();
        let s2 = p.u_i.1.add(&p.u_ii.1).unwrap();
        let scale = d1.max_abs().max(d2.max_abs());
        assert!(s1.max_abs_diff(&d1).unwrap() < 1e-11 * scale);
        assert!(s2.max_abs_diff(&d2).unwrap() < 1e-11 * scale);
    }

    #[test]
    fn degenerate_cases() {
        let g = Grid2D::periodic(32).unwrap();
        let w0 = random_bandlimited(&g, 3, 6.0, 1.0).unwrap();
        let p = compute_u_bar_parts(&w0, &w0, 0.2, 0.4).unwrap();
        assert_eq!(p.u_i.0.max_abs(), 0.0);
        assert!(p.u_ii.0.max_abs() > 0.0);
        let p = compute_u_bar_parts(&w0, &w0, 0.4, 0.4).unwrap();
        assert_eq!(p.u_ii.0.max_abs(), 0.0);
        // |k| = 1 modes do not feel α.
        let unit = single_mode(&g, 1, 0, 1.0)
            .add(&single_mode(&g, 0, 1, 0.5))
            .unwrap();
        let p = compute_u_bar_parts(&unit, &unit, 0.1, 0.5).unwrap();
        assert!(p.u_ii.0.max_abs() < 1e-15 && p.u_ii.1.max_abs() < 1e-15);
    }
}
