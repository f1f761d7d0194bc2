use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{geometric_breaks, uniform_breaks, GaussLegendre};

/// Resolution knobs of the polar quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshSpec {
    /// Ratio of consecutive geometric panels toward the origin, in `(1, 1.2]`.
    pub grading_ratio: f64,
    /// Innermost radius as a fraction of the truncation radius.
    pub inner_fraction: f64,
    /// Gauss–Legendre order per radial panel.
    pub order: usize,
    /// Width of the uniform radial panels relative to the resolved length scale.
    pub panel_fraction: f64,
    /// Multiplier on the angular node count.
    pub angular_oversampling: f64,
    /// Refuse rings that would need more angular nodes than this.
    pub max_angular_nodes: usize,
    /// Fixed truncation radius; by default it follows the data.
    pub max_radius: Option<f64>,
}

impl Default for MeshSpec {
    fn default() -> Self {
        Self {
            grading_ratio: 1.2,
            inner_fraction: 1e-7,
            order: 8,
            panel_fraction: 0.5,
            angular_oversampling: 1.0,
            max_angular_nodes: 1 << 15,
            max_radius: None,
        }
    }
}

impl MeshSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.grading_ratio > 1.0 && self.grading_ratio <= 1.2) {
            return Err(Error::out_of_range(
                "grading_ratio",
                self.grading_ratio,
                "1 < ratio <= 1.2",
            ));
        }
        if !(self.inner_fraction > 0.0 && self.inner_fraction <= 1e-6) {
            return Err(Error::out_of_range(
                "inner_fraction",
                self.inner_fraction,
                "0 < fraction <= 1e-6",
            ));
        }
        if self.order < 2 {
            return Err(Error::out_of_range(
                "order",
                self.order as f64,
                "order >= 2",
            ));
        }
        if !(self.panel_fraction > 0.0 && self.panel_fraction <= 1.0) {
            return Err(Error::out_of_range(
                "panel_fraction",
                self.panel_fraction,
                "0 < fraction <= 1",
            ));
        }
        if !(self.angular_oversampling >= 1.0) {
            return Err(Error::out_of_range(
                "angular_oversampling",
                self.angular_oversampling,
                "oversampling >= 1",
            ));
        }
        Ok(())
    }

    /// Halved grading excess, halved panels and 50% more angular nodes.
    pub fn refined(&self) -> Self {
        Self {
            grading_ratio: 1.0 + 0.5 * (self.grading_ratio - 1.0),
            panel_fraction: 0.5 * self.panel_fraction,
            angular_oversampling: 1.5 * self.angular_oversampling,
            max_angular_nodes: 2 * self.max_angular_nodes,
            ..*self
        }
    }
}

/// Radial Gauss–Legendre nodes on `[r_min, R]`, geometric near the origin and
/// uniform beyond, together with the angular node rule.
#[derive(Debug, Clone)]
pub struct QuadratureMesh {
    pub r_min: f64,
    pub radius: f64,
    /// `(r, w)` pairs.
    pub radial: Vec<(f64, f64)>,
    oversampling: f64,
    max_angular: usize,
}

impl QuadratureMesh {
    /// `scale` is the smallest length the integrand varies on; `cuts` are
    /// radii that must be panel boundaries.
    pub fn graded(spec: &MeshSpec, radius: f64, scale: f64, cuts: &[f64]) -> Result<Self> {
        spec.validate()?;
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::out_of_range("radius", radius, "0 < R < inf"));
        }
        let width = spec.panel_fraction * scale;
        let r_min = spec.inner_fraction * radius;
        let mut breaks = geometric_breaks(r_min, radius, spec.grading_ratio, width);
        let start = *breaks.last().unwrap();
        breaks.extend(
            uniform_breaks(start, radius, width, cuts)
                .into_iter()
                .skip(1),
        );
        let radial = GaussLegendre::new(spec.order).composite(&breaks);
        Ok(Self {
            r_min,
            radius,
            radial,
            oversampling: spec.angular_oversampling,
            max_angular: spec.max_angular_nodes,
        })
    }

    /// Uniform angular node count for a ring whose integrand behaves like
    /// `e^{i a cos θ}`: `a + 10 a^{1/3} + 20` scaled by the oversampling and
    /// rounded up to a multiple of 4.
    pub fn angular_nodes(&self, extent: f64) -> Result<usize> {
        let a = extent.abs();
        let want = (self.oversampling * (a + 10.0 * a.cbrt() + 20.0)).ceil() as usize;
        let n = want.div_ceil(4) * 4;
        if n > self.max_angular {
            Err(Error::InsufficientAngularResolution {
                nodes: self.max_angular,
                extent: a,
            })
        } else {
            Ok(n)
        }
    }
}
