use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed-form shapes `M(ε)` for `‖ω^α − ω^{α₀}‖` as a function of `ε = |α − α₀|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum BoundModel {
    /// `ε^p`.
    PurePower { exponent: f64 },
    /// `ε^p |log ε|`.
    PowerLog { exponent: f64 },
    /// `ε log² ε`.
    PowerLog2,
    /// `ε^{1−2α₀} + ε|log ε|`, the bound for `0 ≤ α₀ < 1/2`.
    Holder { alpha0: f64 },
    /// `ε + ε log² ε`, the bound at `α₀ = 1/2`.
    Endpoint,
}

impl BoundModel {
    /// The bound model matching the reference exponent.
    pub fn for_reference(alpha0: f64) -> Self {
        if alpha0 >= 0.5 {
            BoundModel::Endpoint
        } else {
            BoundModel::Holder { alpha0 }
        }
    }

    pub fn eval(&self, eps: f64) -> f64 {
        let l = eps.ln();
        match *self {
            BoundModel::PurePower { exponent } => eps.powf(exponent),
            BoundModel::PowerLog { exponent } => eps.powf(exponent) * l.abs(),
            BoundModel::PowerLog2 => eps * l * l,
            BoundModel::Holder { alpha0 } => eps.powf(1.0 - 2.0 * alpha0) + eps * l.abs(),
            BoundModel::Endpoint => eps + eps * l * l,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `norm / M(ε)` per input point.
    pub model_ratio: Vec<f64>,
}

impl RateFit {
    /// `max / min` of the model ratios.
    pub fn ratio_spread(&self) -> f64 {
        let (lo, hi) = self
            .model_ratio
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &r| {
                (lo.min(r), hi.max(r))
            });
        hi / lo
    }
}

/// Least squares of `log norm` against `log ε`, plus the ratios to `model`.
pub fn fit_rate(eps: &[f64], norms: &[f64], model: BoundModel) -> Result<RateFit> {
    if eps.len() != norms.len() {
        return Err(Error::Config(format!(
            "{} eps values for {} norms",
            eps.len(),
            norms.len()
        )));
    }
    if eps.len() < 3 {
        return Err(Error::Config(format!(
            "rate fit needs at least 3 points, got {}",
            eps.len()
        )));
    }
    if let Some(&bad) = eps
        .iter()
        .chain(norms)
        .find(|v| !(**v > 0.0 && v.is_finite()))
    {
        return Err(Error::out_of_range(
            "rate fit input",
            bad,
            "positive finite values",
        ));
    }
    let x: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let y: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Config("rate fit needs distinct eps values".into()));
    }
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(&y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let ss_tot: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    let model_ratio = eps
        .iter()
        .zip(norms)
        .map(|(&e, &v)| v / model.eval(e))
        .collect();
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        model_ratio,
    })
}
