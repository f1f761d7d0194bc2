use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

use super::mesh::{MeshSpec, QuadratureMesh};
use super::test_function::TestFunction;
use super::KernelSplitParams;
use crate::error::{Error, Result};
use crate::spectral::RieszParams;

/// `Tf`, `T₁f` and `T₂f` at one point, all from the same nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvolutionSample {
    pub x: [f64; 2],
    pub t: [f64; 2],
    pub t1: [f64; 2],
    pub t2: [f64; 2],
    /// Bound `2π sup|∇f| r_min^{β+1}/(β+1)` on the disk `|z| < r_min`, whose
    /// linear term is added analytically.
    pub pv_bound: f64,
}

fn truncation(f: &TestFunction, x: [f64; 2], spec: &MeshSpec) -> Result<f64> {
    let reach = f.reach_from(x);
    match spec.max_radius {
        Some(r) if r < reach => Err(Error::Config(format!(
            "mesh truncation radius {r} clips the data around ({}, {}), which needs {reach:.3}",
            x[0], x[1]
        ))),
        Some(r) => Ok(r),
        None => Ok(reach),
    }
}

/// `∮ (f(x − r e_θ) − f(x)) v(θ) dθ` by the uniform trapezoid rule.
fn ring(
    f: &TestFunction,
    params: &KernelSplitParams,
    x: [f64; 2],
    f0: f64,
    r: f64,
    n: usize,
) -> [f64; 2] {
    let h = TAU / n as f64;
    let mut acc = [0.0, 0.0];
    for j in 0..n {
        let (s, c) = (h * j as f64).sin_cos();
        let d = f.value(x[0] - r * c, x[1] - r * s) - f0;
        let v = params.direction(c, s);
        acc[0] += d * v[0];
        acc[1] += d * v[1];
    }
    [acc[0] * h, acc[1] * h]
}

fn convolve_point(
    f: &TestFunction,
    params: &KernelSplitParams,
    x: [f64; 2],
    spec: &MeshSpec,
) -> Result<ConvolutionSample> {
    let zero = ConvolutionSample {
        x,
        t: [0.0; 2],
        t1: [0.0; 2],
        t2: [0.0; 2],
        pv_bound: 0.0,
    };
    if f.is_zero() {
        return Ok(zero);
    }
    let radius = truncation(f, x, spec)?;
    let cuts = [params.inner_radius(), params.outer_radius()];
    let mesh = QuadratureMesh::graded(spec, radius, f.sigma_min(), &cuts)?;
    let beta = params.beta();
    let f0 = f.value(x[0], x[1]);
    let mut out = zero;
    for &(r, w) in &mesh.radial {
        let n = mesh.angular_nodes(f.angular_extent(x, r))?;
        let s = ring(f, params, x, f0, r, n);
        let k = w * r.powf(beta - 1.0);
        let near = k * params.chi_beta(r);
        let far = k - near;
        for d in 0..2 {
            out.t[d] += k * s[d];
            out.t1[d] += near * s[d];
            out.t2[d] += far * s[d];
        }
    }
    // f(x − z) − f(x) ≈ −z·∇f(x) on the discarded disk.
    let g = f.gradient(x[0], x[1]);
    let v = params.direction(g[0], g[1]);
    let c = -PI * mesh.r_min.powf(beta + 1.0) / (beta + 1.0);
    for d in 0..2 {
        out.t[d] += c * v[d];
        out.t1[d] += c * v[d];
    }
    out.pv_bound = TAU * f.gradient_bound() * mesh.r_min.powf(beta + 1.0) / (beta + 1.0);
    Ok(out)
}

/// Evaluates `Tf`, `T₁f`, `T₂f` at every point on a shared polar mesh
/// centered at the point.
pub fn convolve(
    f: &TestFunction,
    params: &KernelSplitParams,
    points: &[[f64; 2]],
    spec: &MeshSpec,
) -> Result<Vec<ConvolutionSample>> {
    spec.validate()?;
    points
        .par_iter()
        .map(|&x| convolve_point(f, params, x, spec))
        .collect()
}

pub fn convolve_t(
    f: &TestFunction,
    params: &KernelSplitParams,
    points: &[[f64; 2]],
    spec: &MeshSpec,
) -> Result<Vec<[f64; 2]>> {
    Ok(convolve(f, params, points, spec)?
        .into_iter()
        .map(|s| s.t)
        .collect())
}

pub fn convolve_t1(
    f: &TestFunction,
    params: &KernelSplitParams,
    points: &[[f64; 2]],
    spec: &MeshSpec,
) -> Result<Vec<[f64; 2]>> {
    Ok(convolve(f, params, points, spec)?
        .into_iter()
        .map(|s| s.t1)
        .collect())
}

pub fn convolve_t2(
    f: &TestFunction,
    params: &KernelSplitParams,
    points: &[[f64; 2]],
    spec: &MeshSpec,
) -> Result<Vec<[f64; 2]>> {
    Ok(convolve(f, params, points, spec)?
        .into_iter()
        .map(|s| s.t2)
        .collect())
}

/// `γ(σ) ∫ |z|^{σ−2} f(x − z) dz` on the plane by polar quadrature; the disk
/// `|z| < r_min` contributes `f(x)·γ 2π r_min^σ/σ`.
pub fn riesz_quadrature(
    f: &TestFunction,
    riesz: &RieszParams,
    x: [f64; 2],
    spec: &MeshSpec,
) -> Result<f64> {
    if riesz.dimension != 2 {
        return Err(Error::out_of_range(
            "dimension",
            riesz.dimension as f64,
            "planar potential",
        ));
    }
    spec.validate()?;
    if f.is_zero() {
        return Ok(0.0);
    }
    let radius = truncation(f, x, spec)?;
    let mesh = QuadratureMesh::graded(spec, radius, f.sigma_min(), &[])?;
    let mut total = 0.0;
    for &(r, w) in &mesh.radial {
        let n = mesh.angular_nodes(f.angular_extent(x, r))?;
        let h = TAU / n as f64;
        let ring: f64 = (0..n)
            .map(|j| {
                let (s, c) = (h * j as f64).sin_cos();
                f.value(x[0] - r * c, x[1] - r * s)
            })
            .sum::<f64>()
            * h;
        total += w * riesz.kernel(r) * r * ring;
    }
    let sigma = riesz.sigma;
    total += f.value(x[0], x[1]) * riesz.gamma * 2.0 * PI * mesh.r_min.powf(sigma) / sigma;
    Ok(total)
}
