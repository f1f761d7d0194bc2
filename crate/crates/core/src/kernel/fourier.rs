use num_complex::Complex64;
use puruspe::Jn;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use super::mesh::{MeshSpec, QuadratureMesh};
use super::test_function::TestFunction;
use super::{transform_constant, KernelSplitParams, KernelVariant};
use crate::error::{Error, Result};
use crate::quadrature::{uniform_breaks, GaussLegendre};

fn direction_of(params: &KernelSplitParams, y: [f64; 2]) -> [f64; 2] {
    match params.variant() {
        KernelVariant::Perpendicular => [-y[1], y[0]],
        KernelVariant::Straight => y,
    }
}

/// Closed-form `∫ e^{2πi x·y} K(x) dx = −2πi D(β) v(y) |2πy|^{−1−β}`.
pub fn fourier_k(y: [f64; 2], params: &KernelSplitParams) -> Result<[Complex64; 2]> {
    let a = y[0].hypot(y[1]);
    if a == 0.0 {
        return Err(Error::ZeroModeSingularity(
            "the full kernel transform is unbounded at y = 0".into(),
        ));
    }
    let beta = params.beta();
    let v = direction_of(params, y);
    let c = -TAU * transform_constant(beta) * (TAU * a).powf(-1.0 - beta);
    Ok([Complex64::new(0.0, c * v[0]), Complex64::new(0.0, c * v[1])])
}

/// `∫ e^{2πi x·y} K₁(x) dx` by polar quadrature over `|x| ≤ 2/β`.
pub fn fourier_k1(
    y: [f64; 2],
    params: &KernelSplitParams,
    spec: &MeshSpec,
) -> Result<[Complex64; 2]> {
    spec.validate()?;
    let a = y[0].hypot(y[1]);
    if a == 0.0 {
        return Ok([Complex64::default(); 2]);
    }
    let beta = params.beta();
    let scale = (0.5 / a).min(0.125 / beta);
    let mesh =
        QuadratureMesh::graded(spec, params.outer_radius(), scale, &[params.inner_radius()])?;
    let mut acc = [Complex64::default(); 2];
    for &(r, w) in &mesh.radial {
        let k = w * r.powf(beta - 1.0) * params.chi_beta(r);
        if k == 0.0 {
            continue;
        }
        let n = mesh.angular_nodes(TAU * a * r)?;
        let h = TAU / n as f64;
        let mut ring = [Complex64::default(); 2];
        for j in 0..n {
            let (s, c) = (h * j as f64).sin_cos();
            let e = Complex64::from_polar(1.0, TAU * r * (y[0] * c + y[1] * s));
            let v = params.direction(c, s);
            ring[0] += e * v[0];
            ring[1] += e * v[1];
        }
        acc[0] += ring[0] * (k * h);
        acc[1] += ring[1] * (k * h);
    }
    // e^{2πi r y·e} ≈ 1 + 2πi r y·e on the discarded disk.
    let v = direction_of(params, y);
    let c = TAU * PI * mesh.r_min.powf(1.0 + beta) / (1.0 + beta);
    acc[0] += Complex64::new(0.0, c * v[0]);
    acc[1] += Complex64::new(0.0, c * v[1]);
    Ok(acc)
}

/// Hankel profile `h₁(ρ) = ∫_0^{2/β} r^{β−1} χ_β(r) J₁(ρr) dr`; the near
/// kernel has `∫ e^{−ik·x} K₁(x) dx = −2πi h₁(|k|) v(k)/|k|`.
pub fn near_profile(params: &KernelSplitParams, rho: f64, spec: &MeshSpec) -> Result<f64> {
    if rho == 0.0 {
        return Ok(0.0);
    }
    let beta = params.beta();
    let scale = (2.0 / rho).min(0.125 / beta);
    let mesh =
        QuadratureMesh::graded(spec, params.outer_radius(), scale, &[params.inner_radius()])?;
    let body: f64 = mesh
        .radial
        .iter()
        .map(|&(r, w)| w * r.powf(beta - 1.0) * params.chi_beta(r) * Jn(1, rho * r))
        .sum();
    // J₁(ρr) ≈ ρr/2 on the discarded interval.
    Ok(body + rho * mesh.r_min.powf(1.0 + beta) / (2.0 * (1.0 + beta)))
}

/// `4π²|y| (2/β)^{1+β}/(1+β)`, the bound on `|K̂₁(y)|` from
/// `|e^{2πix·y} − 1| ≤ 2π|x||y|` and the vanishing mean of `K₁`.
pub fn k1_small_regime_envelope(beta: f64, y: f64) -> f64 {
    4.0 * PI * PI * y * (2.0 / beta).powf(1.0 + beta) / (1.0 + beta)
}

/// Radial frequency nodes `ρ` with Gauss–Legendre weights on `[ρ_lo, ρ_max]`:
/// geometric panels of ratio 2 until they reach the target width, uniform
/// panels beyond.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoNodes {
    pub rho: Vec<f64>,
    pub weights: Vec<f64>,
    pub rho_lo: f64,
}

impl RhoNodes {
    pub const RHO_LO: f64 = 1e-4;

    /// Nodes for the split at `β`: `K̂₂` oscillates in `ρ` with period about
    /// `πβ`, so panels are at most `πβ/2` wide (and at most 1/2).
    pub fn new(rho_max: f64, beta: f64) -> Self {
        Self::with_resolution(rho_max, 2.0, (0.5 * std::f64::consts::PI * beta).min(0.5))
    }

    pub fn with_resolution(rho_max: f64, ratio: f64, width: f64) -> Self {
        let rho_max = rho_max.max(2.0);
        let mut breaks = vec![Self::RHO_LO];
        loop {
            let last = *breaks.last().unwrap();
            if last * (ratio - 1.0) >= width || last * ratio >= rho_max {
                break;
            }
            breaks.push(last * ratio);
        }
        let start = *breaks.last().unwrap();
        breaks.extend(
            uniform_breaks(start, rho_max, width, &[])
                .into_iter()
                .skip(1),
        );
        let (rho, weights) = GaussLegendre::new(8).composite(&breaks).into_iter().unzip();
        Self {
            rho,
            weights,
            rho_lo: Self::RHO_LO,
        }
    }

    /// `8.6/σ_min`, past which every family member's transform is below
    /// `e^{−37}` of its peak.
    pub fn family_rho_max(family: &[TestFunction]) -> f64 {
        let s = family
            .iter()
            .filter(|f| !f.is_zero())
            .map(TestFunction::sigma_min)
            .fold(f64::INFINITY, f64::min);
        if s.is_finite() {
            8.6 / s
        } else {
            2.0
        }
    }

    /// `P_f(ρ) = ∫_0^{2π} |f̂(ρ, θ)|² dθ` at every node.
    pub fn power(&self, f: &TestFunction) -> Vec<f64> {
        let spread = f.center_spread();
        self.rho
            .iter()
            .map(|&r| angular_power(f, r, spread))
            .collect()
    }

    fn power_at_zero(f: &TestFunction) -> f64 {
        TAU * f.fourier(0.0, 0.0).norm_sqr()
    }
}

fn angular_power(f: &TestFunction, rho: f64, spread: f64) -> f64 {
    let a = rho * spread;
    let n = (((a + 10.0 * a.cbrt() + 20.0).ceil() as usize).div_ceil(4)) * 4;
    let h = TAU / n as f64;
    (0..n)
        .map(|j| {
            let (s, c) = (h * j as f64).sin_cos();
            f.fourier(rho * c, rho * s).norm_sqr()
        })
        .sum::<f64>()
        * h
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "s", rename_all = "snake_case")]
pub enum SpectralNorm {
    /// Weight `(1 + ρ²)^s`.
    Sobolev(f64),
    /// Weight `ρ^{2s}`.
    Homogeneous(f64),
}

impl SpectralNorm {
    fn weight(&self, rho: f64) -> f64 {
        match *self {
            SpectralNorm::Sobolev(s) => (1.0 + rho * rho).powf(s),
            SpectralNorm::Homogeneous(s) => rho.powf(2.0 * s),
        }
    }

    fn low_order(&self) -> f64 {
        match *self {
            SpectralNorm::Sobolev(_) => 0.0,
            SpectralNorm::Homogeneous(s) => 2.0 * s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelPart {
    Full,
    Near,
    Far,
}

/// Radial multipliers `|K̂|`, `|K̂₁|`, `|K̂₂|` on a set of frequency nodes.
#[derive(Debug, Clone)]
pub struct KernelSpectrum {
    pub beta: f64,
    pub nodes: RhoNodes,
    /// `h₁(ρ)`.
    pub near: Vec<f64>,
    /// `h_∞(ρ) = −D(β) ρ^{−β}/(2π)`, the untruncated profile.
    pub full: Vec<f64>,
}

impl KernelSpectrum {
    pub fn new(params: &KernelSplitParams, nodes: &RhoNodes, spec: &MeshSpec) -> Result<Self> {
        let beta = params.beta();
        let d = transform_constant(beta);
        let near = nodes
            .rho
            .iter()
            .map(|&r| near_profile(params, r, spec))
            .collect::<Result<Vec<_>>>()?;
        let full = nodes
            .rho
            .iter()
            .map(|&r| -d * r.powf(-beta) / TAU)
            .collect();
        Ok(Self {
            beta,
            nodes: nodes.clone(),
            near,
            full,
        })
    }

    pub fn multiplier(&self, part: KernelPart, i: usize) -> f64 {
        TAU * match part {
            KernelPart::Full => self.full[i].abs(),
            KernelPart::Near => self.near[i].abs(),
            KernelPart::Far => (self.full[i] - self.near[i]).abs(),
        }
    }

    /// `‖T_part f‖` in the given norm, by Plancherel over the nodes plus the
    /// leading-order contribution of `ρ < ρ_lo`.
    pub fn operator_norm(
        &self,
        f: &TestFunction,
        power: &[f64],
        part: KernelPart,
        norm: SpectralNorm,
    ) -> f64 {
        let n = &self.nodes;
        let body: f64 = (0..n.rho.len())
            .map(|i| {
                let m = self.multiplier(part, i);
                n.weights[i] * norm.weight(n.rho[i]) * m * m * power[i] * n.rho[i]
            })
            .sum();
        let tail = match part {
            KernelPart::Near => 0.0,
            KernelPart::Full | KernelPart::Far => {
                let e = 2.0 - 2.0 * self.beta + norm.low_order();
                let d = transform_constant(self.beta);
                d * d * RhoNodes::power_at_zero(f) * n.rho_lo.powf(e) / e
            }
        };
        ((body + tail) / (TAU * TAU)).sqrt()
    }
}

/// `‖f‖` in the given norm from the same nodes.
pub fn data_norm(f: &TestFunction, nodes: &RhoNodes, power: &[f64], norm: SpectralNorm) -> f64 {
    let body: f64 = (0..nodes.rho.len())
        .map(|i| nodes.weights[i] * norm.weight(nodes.rho[i]) * power[i] * nodes.rho[i])
        .sum();
    let e = 2.0 + norm.low_order();
    let tail = RhoNodes::power_at_zero(f) * nodes.rho_lo.powf(e) / e;
    ((body + tail) / (TAU * TAU)).sqrt()
}
