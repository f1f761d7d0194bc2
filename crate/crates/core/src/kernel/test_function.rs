use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{uniform_breaks, GaussLegendre};

/// Value below which a test function counts as vanished.
pub const DECAY_LEVEL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// `a·e^{−|y|²/2σ²}`.
    Gaussian,
    /// `a·y₁·e^{−|y|²/2σ²}`.
    LinearX1,
}

/// One translated building block, `y = x − center`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bump {
    pub shape: Shape,
    pub amplitude: f64,
    pub sigma: f64,
    pub center: [f64; 2],
}

impl Bump {
    pub fn gaussian(amplitude: f64, sigma: f64, center: [f64; 2]) -> Self {
        Self {
            shape: Shape::Gaussian,
            amplitude,
            sigma,
            center,
        }
    }

    pub fn linear_x1(amplitude: f64, sigma: f64, center: [f64; 2]) -> Self {
        Self {
            shape: Shape::LinearX1,
            amplitude,
            sigma,
            center,
        }
    }

    fn envelope(&self, dx: f64, dy: f64) -> f64 {
        self.amplitude * (-(dx * dx + dy * dy) / (2.0 * self.sigma * self.sigma)).exp()
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        let (dx, dy) = (x - self.center[0], y - self.center[1]);
        let e = self.envelope(dx, dy);
        match self.shape {
            Shape::Gaussian => e,
            Shape::LinearX1 => dx * e,
        }
    }

    pub fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        let (dx, dy) = (x - self.center[0], y - self.center[1]);
        let s2 = self.sigma * self.sigma;
        let e = self.envelope(dx, dy);
        match self.shape {
            Shape::Gaussian => [-dx / s2 * e, -dy / s2 * e],
            Shape::LinearX1 => [(1.0 - dx * dx / s2) * e, -dx * dy / s2 * e],
        }
    }

    /// `∫ f(x) e^{−ik·x} dx`.
    pub fn fourier(&self, k1: f64, k2: f64) -> Complex64 {
        let s2 = self.sigma * self.sigma;
        let radial = self.amplitude * 2.0 * PI * s2 * (-0.5 * s2 * (k1 * k1 + k2 * k2)).exp();
        let phase = Complex64::from_polar(1.0, -(k1 * self.center[0] + k2 * self.center[1]));
        match self.shape {
            Shape::Gaussian => phase * radial,
            Shape::LinearX1 => phase * Complex64::new(0.0, -s2 * k1) * radial,
        }
    }

    /// Distance from the center beyond which `|f| < DECAY_LEVEL`.
    pub fn decay_radius(&self) -> f64 {
        let a = self.amplitude.abs();
        let s = self.sigma;
        match self.shape {
            Shape::Gaussian if a <= DECAY_LEVEL => 0.0,
            Shape::Gaussian => s * (2.0 * (a / DECAY_LEVEL).ln()).sqrt(),
            Shape::LinearX1 => {
                let mut r = s;
                for _ in 0..30 {
                    r = s * (2.0 * (a * r / DECAY_LEVEL).ln().max(0.0)).sqrt();
                    r = r.max(s);
                }
                r
            }
        }
    }

    /// Upper bound on `sup |∇f|`.
    pub fn gradient_bound(&self) -> f64 {
        let a = self.amplitude.abs();
        match self.shape {
            Shape::Gaussian => a * (-0.5f64).exp() / self.sigma,
            Shape::LinearX1 => a,
        }
    }

    pub fn l1_exact(&self) -> f64 {
        let a = self.amplitude.abs();
        let s = self.sigma;
        match self.shape {
            Shape::Gaussian => a * 2.0 * PI * s * s,
            Shape::LinearX1 => a * 2.0 * s.powi(3) * (2.0 * PI).sqrt(),
        }
    }

    pub fn l2_exact(&self) -> f64 {
        let a = self.amplitude;
        let s = self.sigma;
        match self.shape {
            Shape::Gaussian => (a * a * PI * s * s).sqrt(),
            Shape::LinearX1 => (a * a * PI * s.powi(4) / 2.0).sqrt(),
        }
    }
}

/// Finite sum of Gaussian-type bumps on ℝ².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestFunction {
    pub id: String,
    pub bumps: Vec<Bump>,
}

impl TestFunction {
    pub fn new(id: impl Into<String>, bumps: Vec<Bump>) -> Result<Self> {
        for b in &bumps {
            if !(b.sigma > 0.0 && b.sigma.is_finite()) {
                return Err(Error::out_of_range("sigma", b.sigma, "sigma > 0"));
            }
            if !(b.amplitude.is_finite() && b.center.iter().all(|c| c.is_finite())) {
                return Err(Error::NonFinite(format!("test function `{}`", b.amplitude)));
            }
        }
        Ok(Self {
            id: id.into(),
            bumps,
        })
    }

    /// Centered Gaussian `e^{−|x|²/2σ²}`.
    pub fn gaussian(sigma: f64) -> Self {
        Self {
            id: format!("g{sigma}"),
            bumps: vec![Bump::gaussian(1.0, sigma, [0.0, 0.0])],
        }
    }

    pub fn zero() -> Self {
        Self {
            id: "zero".into(),
            bumps: Vec::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.bumps.iter().all(|b| b.amplitude == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for b in &mut out.bumps {
            b.amplitude *= c;
        }
        out
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        self.bumps.iter().map(|b| b.value(x, y)).sum()
    }

    pub fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        self.bumps.iter().fold([0.0, 0.0], |acc, b| {
            let g = b.gradient(x, y);
            [acc[0] + g[0], acc[1] + g[1]]
        })
    }

    pub fn fourier(&self, k1: f64, k2: f64) -> Complex64 {
        self.bumps.iter().map(|b| b.fourier(k1, k2)).sum()
    }

    pub fn sigma_min(&self) -> f64 {
        self.bumps
            .iter()
            .map(|b| b.sigma)
            .fold(f64::INFINITY, f64::min)
    }

    /// Radius about `x` outside of which `f` has vanished.
    pub fn reach_from(&self, x: [f64; 2]) -> f64 {
        self.bumps
            .iter()
            .map(|b| (x[0] - b.center[0]).hypot(x[1] - b.center[1]) + b.decay_radius())
            .fold(0.0, f64::max)
    }

    pub fn gradient_bound(&self) -> f64 {
        self.bumps.iter().map(Bump::gradient_bound).sum()
    }

    /// Largest angular frequency parameter of `θ ↦ f(x − r e_θ)`.
    pub(crate) fn angular_extent(&self, x: [f64; 2], r: f64) -> f64 {
        self.bumps
            .iter()
            .map(|b| r * (x[0] - b.center[0]).hypot(x[1] - b.center[1]) / (b.sigma * b.sigma))
            .fold(0.0, f64::max)
    }

    /// Largest distance between two centers.
    pub(crate) fn center_spread(&self) -> f64 {
        let mut d: f64 = 0.0;
        for a in &self.bumps {
            for b in &self.bumps {
                d = d.max((a.center[0] - b.center[0]).hypot(a.center[1] - b.center[1]));
            }
        }
        d
    }

    /// Closed-form `‖f‖_{L¹}` when `f` is a single bump.
    pub fn l1_exact(&self) -> Option<f64> {
        match self.bumps.as_slice() {
            [] => Some(0.0),
            [b] => Some(b.l1_exact()),
            _ => None,
        }
    }

    /// Closed-form `‖f‖_{L²}` when `f` is a single bump.
    pub fn l2_exact(&self) -> Option<f64> {
        match self.bumps.as_slice() {
            [] => Some(0.0),
            [b] => Some(b.l2_exact()),
            _ => None,
        }
    }

    /// `‖f‖_{L¹}` by tensor Gauss–Legendre quadrature over the decay box, with
    /// panel breaks on the zero lines `y₁ = 0` of the odd bumps.
    pub fn l1_norm(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for b in &self.bumps {
            let r = b.decay_radius();
            for d in 0..2 {
                lo[d] = lo[d].min(b.center[d] - r);
                hi[d] = hi[d].max(b.center[d] + r);
            }
        }
        let width = 0.5 * self.sigma_min();
        let cuts: Vec<f64> = self
            .bumps
            .iter()
            .filter(|b| b.shape == Shape::LinearX1)
            .map(|b| b.center[0])
            .collect();
        let gl = GaussLegendre::new(8);
        let xs = gl.composite(&uniform_breaks(lo[0], hi[0], width, &cuts));
        let ys = gl.composite(&uniform_breaks(lo[1], hi[1], width, &[]));
        xs.iter()
            .map(|&(x, wx)| {
                wx * ys
                    .iter()
                    .map(|&(y, wy)| wy * self.value(x, y).abs())
                    .sum::<f64>()
            })
            .sum()
    }
}

/// Gaussians of widths 0.75, 1 and 1.5, an asymmetric Gaussian pair and a
/// first-moment bump `x₁·g`.
pub fn gaussian_family() -> Vec<TestFunction> {
    vec![
        TestFunction::gaussian(0.75),
        TestFunction::gaussian(1.0),
        TestFunction::gaussian(1.5),
        TestFunction {
            id: "pair".into(),
            bumps: vec![
                Bump::gaussian(1.0, 1.0, [1.5, 0.0]),
                Bump::gaussian(0.5, 1.0, [-1.5, 0.5]),
            ],
        },
        TestFunction {
            id: "x1g".into(),
            bumps: vec![Bump::linear_x1(1.0, 1.0, [0.5, -0.3])],
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_norms_match_closed_forms() {
        for f in gaussian_family() {
            if let Some(exact) = f.l1_exact() {
                let q = f.l1_norm();
                assert!((q - exact).abs() < 1e-6 * exact, "{}: {q} vs {exact}", f.id);
            }
        }
        let pair = &gaussian_family()[3];
        // positive bumps: L¹ equals the integral
        let total = pair.fourier(0.0, 0.0).re;
        assert!((pair.l1_norm() - total).abs() < 1e-9 * total);
    }

    #[test]
    fn decay_certificate() {
        for f in gaussian_family() {
            for b in &f.bumps {
                let r = b.decay_radius();
                for i in 0..64 {
                    let t = i as f64 * std::f64::consts::TAU / 64.0;
                    for s in [1.0, 1.5, 3.0] {
                        let v =
                            b.value(b.center[0] + s * r * t.cos(), b.center[1] + s * r * t.sin());
                        assert!(v.abs() <= DECAY_LEVEL * 1.0001);
                    }
                }
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let f = &gaussian_family()[4];
        let (x, y, h) = (0.3, 0.8, 1e-5);
        let g = f.gradient(x, y);
        let fd1 = (f.value(x + h, y) - f.value(x - h, y)) / (2.0 * h);
        let fd2 = (f.value(x, y + h) - f.value(x, y - h)) / (2.0 * h);
        assert!((g[0] - fd1).abs() < 1e-9 && (g[1] - fd2).abs() < 1e-9);
    }
}
