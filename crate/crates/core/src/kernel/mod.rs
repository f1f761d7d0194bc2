//! Planar singular integrals `Tf = K * f` with the homogeneous kernel
//! `K(x) = v(x)|x|^{β−3}` (`v(x) = x^⊥` or `x`), split by the rescaled cutoff
//! `χ_β(r) = χ(βr)` into a compactly supported near part `K₁ = Kχ_β` and a
//! smooth far part `K₂ = K(1 − χ_β)`.
//!
//! Pointwise values come from a polar graded-mesh quadrature. Operator norms
//! are evaluated on the Fourier side, where `|K̂₁|` and `|K̂₂|` are radial
//! multipliers obtained from one-dimensional Hankel integrals.

mod bounds;
mod convolve;
mod fourier;
mod mesh;
mod test_function;

pub use bounds::{
    kernel_csv, quadrature_self_consistency, t2_hs_factor, verify_k1_uniform,
    verify_split_identity, verify_t1_bound, verify_t2_hs_bound, verify_t2_l2_bound, BoundSweep,
    KernelRecord, DEFAULT_Y_GRID,
};
pub use convolve::{
    convolve, convolve_t, convolve_t1, convolve_t2, riesz_quadrature, ConvolutionSample,
};
pub use fourier::{
    data_norm, fourier_k, fourier_k1, k1_small_regime_envelope, near_profile, KernelPart,
    KernelSpectrum, RhoNodes, SpectralNorm,
};
pub use mesh::{MeshSpec, QuadratureMesh};
pub use test_function::{gaussian_family, Bump, Shape, TestFunction, DECAY_LEVEL};

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

use crate::bump::SmoothCutoff;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(rename_all = "snake_case")]
pub enum KernelVariant {
    /// `x / |x|^{3−β}`.
    Straight,
    /// `x^⊥ / |x|^{3−β}`, the velocity-type kernel.
    #[default]
    Perpendicular,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSplitParams {
    beta: f64,
    variant: KernelVariant,
    chi: SmoothCutoff,
}

impl KernelSplitParams {
    pub fn new(beta: f64, variant: KernelVariant) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::out_of_range("beta", beta, "0 < beta < 1"));
        }
        Ok(Self {
            beta,
            variant,
            chi: SmoothCutoff::new(1.0, 2.0),
        })
    }

    pub fn perpendicular(beta: f64) -> Result<Self> {
        Self::new(beta, KernelVariant::Perpendicular)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn variant(&self) -> KernelVariant {
        self.variant
    }

    /// Radius `1/β` where `χ_β` starts to drop.
    pub fn inner_radius(&self) -> f64 {
        1.0 / self.beta
    }

    /// Radius `2/β` bounding the support of `K₁`.
    pub fn outer_radius(&self) -> f64 {
        2.0 / self.beta
    }

    /// `χ_β(r) = χ(βr)`.
    pub fn chi_beta(&self, r: f64) -> f64 {
        self.chi.eval(self.beta * r)
    }

    /// `max |χ′|` of the unscaled profile.
    pub fn cutoff_max_slope(&self) -> f64 {
        self.chi.max_slope()
    }

    /// Unit direction field `v(θ)` of the kernel.
    pub fn direction(&self, cos: f64, sin: f64) -> [f64; 2] {
        match self.variant {
            KernelVariant::Perpendicular => [-sin, cos],
            KernelVariant::Straight => [cos, sin],
        }
    }

    pub fn kernel(&self, x: [f64; 2]) -> [f64; 2] {
        let r = x[0].hypot(x[1]);
        if r == 0.0 {
            return [0.0, 0.0];
        }
        let d = self.direction(x[0] / r, x[1] / r);
        let m = r.powf(self.beta - 2.0);
        [d[0] * m, d[1] * m]
    }

    pub fn kernel_near(&self, x: [f64; 2]) -> [f64; 2] {
        let c = self.chi_beta(x[0].hypot(x[1]));
        let k = self.kernel(x);
        [k[0] * c, k[1] * c]
    }

    pub fn kernel_far(&self, x: [f64; 2]) -> [f64; 2] {
        let c = 1.0 - self.chi_beta(x[0].hypot(x[1]));
        let k = self.kernel(x);
        [k[0] * c, k[1] * c]
    }
}

/// `β = 1 − 2α`, for `0 < α < 1/2`.
pub fn beta_from_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::out_of_range("alpha", alpha, "0 < alpha < 1/2"));
    }
    Ok(1.0 - 2.0 * alpha)
}

/// `D(β) = −π 2^β Γ((1+β)/2) / Γ((3−β)/2)`: the full kernel has
/// `∫ K(x) e^{−ik·x} dx = i D(β) v(k) |k|^{−1−β}` with `v(k)` the kernel's
/// direction field applied to `k`.
pub fn transform_constant(beta: f64) -> f64 {
    -PI * 2f64.powf(beta) * gamma(0.5 * (1.0 + beta)) / gamma(0.5 * (3.0 - beta))
}
