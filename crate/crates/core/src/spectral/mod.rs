//! Periodic grid, Fourier transforms, and spectral-multiplier operators.

mod fft;
mod field;
mod grid;
mod ops;
pub mod samples;

pub use field::{fft_forward, fft_inverse, RealField, SpectralField, MEAN_ZERO_TOL};
pub use grid::{make_grid, Grid2D, MIN_POINTS};
pub use ops::{
    apply_multiplier, bessel_potential, biot_savart, dealiased_product, divergence,
    fractional_laplacian, gradient, homogeneous_sobolev_norm, lp_norm, riesz_potential,
    sobolev_norm, MultiplierSpec, Parity, RieszParams,
};

pub(crate) use field::ensure_same_grid;
pub(crate) use ops::{check_alpha, lp_norm_slice, spectral_sobolev_norm, Padding};
