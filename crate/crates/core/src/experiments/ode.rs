//! Comparison lemma for `y′ ≤ νF(t) + G y^{1+m}`, `y(0) = 0`, checked on the
//! maximal solution of the equality system.

use ode_solvers::{Dopri5, System, Vector1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::report::InequalityReport;

pub const ODE_RTOL: f64 = 1e-10;
pub const ODE_ATOL: f64 = 1e-14;
/// Dense-output points on `[0, T]`.
pub const ODE_SAMPLES: usize = 2000;

/// Nonnegative continuous forcing with a closed-form integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(tag = "profile", rename_all = "snake_case", deny_unknown_fields)]
pub enum Forcing {
    Constant {
        value: f64,
    },
    /// `a + b t`.
    Linear {
        a: f64,
        b: f64,
    },
    /// `mean + amplitude·sin(2π freq t)` with `amplitude ≤ mean`.
    Oscillating {
        mean: f64,
        amplitude: f64,
        freq: f64,
    },
    /// `height · exp(−(t − center)²/(2 width²))`.
    Pulse {
        height: f64,
        center: f64,
        width: f64,
    },
}

impl Forcing {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Forcing::Constant { value } => value,
            Forcing::Linear { a, b } => a + b * t,
            Forcing::Oscillating {
                mean,
                amplitude,
                freq,
            } => mean + amplitude * (2.0 * PI * freq * t).sin(),
            Forcing::Pulse {
                height,
                center,
                width,
            } => height * (-(t - center).powi(2) / (2.0 * width * width)).exp(),
        }
    }

    /// `∫₀^T F dt`.
    pub fn integral(&self, t_end: f64) -> f64 {
        match *self {
            Forcing::Constant { value } => value * t_end,
            Forcing::Linear { a, b } => a * t_end + 0.5 * b * t_end * t_end,
            Forcing::Oscillating {
                mean,
                amplitude,
                freq,
            } => {
                let w = 2.0 * PI * freq;
                let osc = if w == 0.0 {
                    0.0
                } else {
                    amplitude * (1.0 - (w * t_end).cos()) / w
                };
                mean * t_end + osc
            }
            Forcing::Pulse {
                height,
                center,
                width,
            } => {
                let s = width * std::f64::consts::SQRT_2;
                height * width * (PI / 2.0).sqrt() * (erf((t_end - center) / s) + erf(center / s))
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(format!("forcing {self:?}: {what}")));
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match *self {
            Forcing::Constant { value } if !(value >= 0.0) || !value.is_finite() => {
                bad("value must be >= 0")
            }
            Forcing::Linear { a, b } if !(a >= 0.0 && b >= 0.0) || !finite(&[a, b]) => {
                bad("coefficients must be >= 0")
            }
            Forcing::Oscillating {
                mean,
                amplitude,
                freq,
            } if !(amplitude >= 0.0 && amplitude <= mean) || !finite(&[mean, amplitude, freq]) => {
                bad("need 0 <= amplitude <= mean")
            }
            Forcing::Pulse {
                height,
                width,
                center,
            } if !(height >= 0.0 && width > 0.0) || !finite(&[height, width, center]) => {
                bad("need height >= 0 and width > 0")
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(deny_unknown_fields)]
pub struct OdeComparisonSpec {
    pub m: f64,
    pub t_end: f64,
    pub g: f64,
    pub forcing: Forcing,
    /// Defaults to `ν₀`.
    pub nu: Option<f64>,
}

impl OdeComparisonSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("m", self.m), ("t_end", self.t_end), ("g", self.g)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::out_of_range(name, v, "positive and finite"));
            }
        }
        if let Some(nu) = self.nu {
            if !(nu >= 0.0 && nu.is_finite()) {
                return Err(Error::out_of_range("nu", nu, "nu >= 0"));
            }
        }
        self.forcing.validate()
    }

    /// `ν₀ = 1/(4m (2mTG)^{1/m} ∫₀^T F)`, infinite when `F ≡ 0`.
    pub fn nu0(&self) -> f64 {
        let i = self.forcing.integral(self.t_end);
        1.0 / (4.0 * self.m * (2.0 * self.m * self.t_end * self.g).powf(1.0 / self.m) * i)
    }

    pub fn nu(&self) -> f64 {
        self.nu.unwrap_or_else(|| self.nu0())
    }

    /// `min{(4^{1/m} − 1)/(2mTG)^{1/m}, 4m(4^{1/m} − 1)ν∫₀^T F}`.
    pub fn bound(&self) -> f64 {
        let c = 4f64.powf(1.0 / self.m) - 1.0;
        let a = c / (2.0 * self.m * self.t_end * self.g).powf(1.0 / self.m);
        let b = 4.0 * self.m * c * self.nu() * self.forcing.integral(self.t_end);
        a.min(b)
    }
}

struct Comparison {
    m: f64,
    g: f64,
    nu: f64,
    forcing: Forcing,
    cap: f64,
}

impl System<f64, Vector1<f64>> for Comparison {
    fn system(&self, t: f64, y: &Vector1<f64>, dy: &mut Vector1<f64>) {
        dy[0] = self.nu * self.forcing.eval(t) + self.g * y[0].max(0.0).powf(1.0 + self.m);
    }

    fn solout(&mut self, _t: f64, y: &Vector1<f64>, _dy: &Vector1<f64>) -> bool {
        !(y[0] < self.cap)
    }
}

/// Dense samples `(t, y)` of `y′ = νF + G y^{1+m}`, `y(0) = 0` on `[0, T]`.
/// Stops early once `y` exceeds `cap` or the solution blows up.
pub fn integrate_comparison(spec: &OdeComparisonSpec, cap: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    spec.validate()?;
    let sys = Comparison {
        m: spec.m,
        g: spec.g,
        nu: spec.nu(),
        forcing: spec.forcing,
        cap,
    };
    let dx = spec.t_end / ODE_SAMPLES as f64;
    let mut solver = Dopri5::new(
        sys,
        0.0,
        spec.t_end,
        dx,
        Vector1::new(0.0),
        ODE_RTOL,
        ODE_ATOL,
    );
    // Blow-up ends in step size underflow; the samples up to that point are kept.
    if let Err(e) = solver.integrate() {
        if solver.x_out().len() < 2 {
            return Err(Error::Config(format!("comparison integration failed: {e}")));
        }
    }
    let ts = solver.x_out().clone();
    let ys = solver.y_out().iter().map(|v| v[0]).collect();
    Ok((ts, ys))
}

/// Checks the bound at every dense-output point of the maximal solution.
/// With `ν > ν₀` the hypothesis is unmet, nothing is asserted and the report
/// does not pass.
pub fn verify_ode_comparison(spec: &OdeComparisonSpec) -> Result<InequalityReport> {
    spec.validate()?;
    let (nu, nu0, bound) = (spec.nu(), spec.nu0(), spec.bound());
    let mut r = InequalityReport::new("ode_comparison")
        .with_param("m", spec.m)
        .with_param("t_end", spec.t_end)
        .with_param("g", spec.g)
        .with_param("nu", nu)
        .with_param("nu0", nu0);
    let hypothesis = nu <= nu0 * (1.0 + 1e-12);
    let cap = if hypothesis {
        f64::INFINITY
    } else {
        1e6 * bound.max(1.0)
    };
    let (ts, ys) = integrate_comparison(spec, cap)?;
    let worst = ys.iter().copied().fold(0.0, f64::max);
    r.push("max_y_over_bound", worst, bound);
    if !hypothesis {
        r.note("hypothesis unmet: nu > nu0, bound not asserted");
        return Ok(r.finish(false));
    }
    let covered = ts
        .last()
        .is_some_and(|&t| (t - spec.t_end).abs() <= 1e-9 * spec.t_end);
    if !covered {
        r.note("integration stopped before t_end");
    }
    let ok = covered
        && ys
            .iter()
            .all(|&y| y.is_finite() && y >= -ODE_ATOL && y <= bound);
    Ok(r.finish(ok))
}

/// `count` random specs drawn with `ν = ν₀` and `m ∈ [0.5, 3]`.
pub fn random_ode_specs(seed: u64, count: usize) -> Vec<OdeComparisonSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let m = rng.random_range(0.5..=3.0);
            let t_end = rng.random_range(0.2..=4.0);
            let g = 10f64.powf(rng.random_range(-1.0..=1.0));
            let forcing = match rng.random_range(0..4) {
                0 => Forcing::Constant {
                    value: rng.random_range(0.1..=5.0),
                },
                1 => Forcing::Linear {
                    a: rng.random_range(0.0..=2.0),
                    b: rng.random_range(0.1..=2.0),
                },
                2 => {
                    let mean = rng.random_range(0.5..=3.0);
                    Forcing::Oscillating {
                        mean,
                        amplitude: mean * rng.random_range(0.0..=1.0),
                        freq: rng.random_range(0.2..=5.0),
                    }
                }
                _ => Forcing::Pulse {
                    height: rng.random_range(0.5..=5.0),
                    center: rng.random_range(0.0..=t_end),
                    width: rng.random_range(0.05..=1.0) * t_end,
                },
            };
            OdeComparisonSpec {
                m,
                t_end,
                g,
                forcing,
                nu: None,
            }
        })
        .collect()
}

/// The comparison bound on every spec of a random battery at `ν = ν₀`.
pub fn ode_battery(seed: u64, count: usize) -> Result<InequalityReport> {
    let mut r = InequalityReport::new("ode_battery")
        .with_param("seed", seed as f64)
        .with_param("count", count as f64);
    let mut ok = true;
    for (i, spec) in random_ode_specs(seed, count).iter().enumerate() {
        let rep = verify_ode_comparison(spec)?;
        r.push(format!("spec_{i}"), rep.lhs, rep.rhs);
        ok &= rep.passed;
    }
    Ok(r.finish(ok))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> OdeComparisonSpec {
        OdeComparisonSpec {
            m: 1.0,
            t_end: 1.0,
            g: 1.0,
            forcing: Forcing::Constant { value: 1.0 },
            nu: None,
        }
    }

    #[test]
    fn tan_closed_form() {
        let s = unit();
        assert!((s.nu0() - 0.125).abs() < 1e-15);
        assert!((s.bound() - 1.5).abs() < 1e-14);
        let (ts, ys) = integrate_comparison(&s, f64::INFINITY).unwrap();
        let r = 0.125f64.sqrt();
        let err = ts
            .iter()
            .zip(&ys)
            .map(|(t, y)| (y - r * (r * t).tan()).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "{err:e}");
        assert!((ys.last().unwrap() - 0.130483).abs() < 1e-6);
        assert!(verify_ode_comparison(&s).unwrap().passed);
    }

    #[test]
    fn zero_forcing_or_rate() {
        let s = OdeComparisonSpec {
            nu: Some(0.0),
            ..unit()
        };
        let (_, ys) = integrate_comparison(&s, f64::INFINITY).unwrap();
        assert!(ys.iter().all(|&y| y == 0.0));
        let s = OdeComparisonSpec {
            forcing: Forcing::Constant { value: 0.0 },
            ..unit()
        };
        assert!(s.nu0().is_infinite());
        let s = OdeComparisonSpec { nu: Some(0.3), ..s };
        let (_, ys) = integrate_comparison(&s, f64::INFINITY).unwrap();
        assert!(ys.iter().all(|&y| y == 0.0));
    }

    #[test]
    fn unmet_hypothesis_is_flagged() {
        let s = OdeComparisonSpec {
            nu: Some(5.0),
            ..unit()
        };
        let r = verify_ode_comparison(&s).unwrap();
        assert!(!r.passed);
        assert!(r.notes[0].contains("hypothesis unmet"));
    }

    #[test]
    fn forcing_integrals() {
        let cases = [
            Forcing::Linear { a: 0.5, b: 2.0 },
            Forcing::Oscillating {
                mean: 1.0,
                amplitude: 0.7,
                freq: 1.3,
            },
            Forcing::Pulse {
                height: 2.0,
                center: 0.4,
                width: 0.3,
            },
        ];
        let gl = crate::quadrature::GaussLegendre::new(40);
        for f in cases {
            let num: f64 = gl
                .composite(&[0.0, 0.5, 1.0, 1.5, 2.0])
                .iter()
                .map(|&(t, w)| w * f.eval(t))
                .sum();
            assert!((num - f.integral(2.0)).abs() < 1e-10, "{f:?}");
        }
    }
}
