//! C^∞ transition profiles built from the normalized integral of the bump
//! `exp(−1/(1−t²))`. Shared by the dyadic partition and the kernel cutoff.

use std::sync::OnceLock;

use crate::quadrature::GaussLegendre;

const INTERVALS: usize = 256;
const GL_ORDER: usize = 16;

struct Table {
    cumulative: Vec<f64>,
    total: f64,
    rule: GaussLegendre,
}

fn bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        let rule = GaussLegendre::new(GL_ORDER);
        let h = 2.0 / INTERVALS as f64;
        let mut cumulative = Vec::with_capacity(INTERVALS + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for i in 0..INTERVALS {
            let a = -1.0 + i as f64 * h;
            acc += rule.integrate(a, a + h, bump);
            cumulative.push(acc);
        }
        Table {
            total: acc,
            cumulative,
            rule,
        }
    })
}

/// Smooth monotone step: 0 for `x ≤ 0`, 1 for `x ≥ 1`, C^∞ in between.
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let tab = table();
    let t = 2.0 * x - 1.0;
    let h = 2.0 / INTERVALS as f64;
    let i = (((t + 1.0) / h) as usize).min(INTERVALS - 1);
    let a = -1.0 + i as f64 * h;
    let partial = tab.cumulative[i] + tab.rule.integrate(a, t, bump);
    (partial / tab.total).clamp(0.0, 1.0)
}

/// Derivative of [`smooth_step`].
pub fn smooth_step_derivative(x: f64) -> f64 {
    2.0 * bump(2.0 * x - 1.0) / table().total
}

/// Radial low-pass profile: 1 on `[0, inner]`, 0 beyond `outer`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothCutoff {
    pub inner: f64,
    pub outer: f64,
}

impl SmoothCutoff {
    pub fn new(inner: f64, outer: f64) -> Self {
        assert!(
            0.0 < inner && inner < outer,
            "cutoff needs 0 < inner < outer"
        );
        Self { inner, outer }
    }

    pub fn eval(&self, r: f64) -> f64 {
        1.0 - smooth_step((r - self.inner) / (self.outer - self.inner))
    }

    pub fn derivative(&self, r: f64) -> f64 {
        let w = self.outer - self.inner;
        -smooth_step_derivative((r - self.inner) / w) / w
    }

    /// Largest `|d/dr|` of the profile.
    pub fn max_slope(&self) -> f64 {
        smooth_step_derivative(0.5) / (self.outer - self.inner)
    }
}
