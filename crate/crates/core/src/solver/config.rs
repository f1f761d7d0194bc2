use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{check_alpha, Grid2D};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(rename_all = "snake_case")]
pub enum Dealias {
    /// Zero every mode with `|m₁|` or `|m₂| ≥ n/3`.
    #[default]
    TwoThirds,
    None,
}

/// Exponential damping `exp(−strength (|k|/k_N)^order)` applied after each step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(deny_unknown_fields)]
pub struct SpectralFilter {
    pub strength: f64,
    pub order: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub alpha: f64,
    pub n: usize,
    pub length: f64,
    pub t_end: f64,
    pub cfl: f64,
    pub dealias: Dealias,
    pub filter: Option<SpectralFilter>,
    /// Snapshot interval; `None` keeps only the final state.
    pub snapshot_every: Option<f64>,
    /// Orders `s` of the recorded `‖ω‖_{H^s}`.
    pub sobolev: Vec<f64>,
    /// Overrides the CFL step, e.g. to share one time grid across a sweep.
    pub fixed_dt: Option<f64>,
    pub max_steps: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            alpha: 0.25,
            n: 128,
            length: std::f64::consts::TAU,
            t_end: 1.0,
            cfl: 0.4,
            dealias: Dealias::TwoThirds,
            filter: None,
            snapshot_every: None,
            sobolev: vec![1.0, 2.0],
            fixed_dt: None,
            max_steps: 1_000_000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        self.grid()?;
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::out_of_range("t_end", self.t_end, "0 < t_end < inf"));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return Err(Error::out_of_range("cfl", self.cfl, "0 < cfl <= 1"));
        }
        if let Some(f) = &self.filter {
            if !(f.strength >= 0.0 && f.strength.is_finite()) {
                return Err(Error::out_of_range(
                    "filter.strength",
                    f.strength,
                    "strength >= 0",
                ));
            }
            if f.order == 0 {
                return Err(Error::out_of_range("filter.order", 0.0, "order >= 1"));
            }
        }
        if let Some(s) = self.snapshot_every {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::out_of_range("snapshot_every", s, "interval > 0"));
            }
        }
        if let Some(dt) = self.fixed_dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::out_of_range("fixed_dt", dt, "dt > 0"));
            }
        }
        if let Some(&s) = self.sobolev.iter().find(|s| !s.is_finite()) {
            return Err(Error::out_of_range("sobolev", s, "finite orders"));
        }
        if self.max_steps == 0 {
            return Err(Error::out_of_range("max_steps", 0.0, "max_steps >= 1"));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid2D> {
        Grid2D::new(self.n, self.length)
    }
}
