//! Measured inequality reports shared by every verifier.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Factor of the finite-sweep uniformity test: `max ≤ 3 × median`.
pub const UNIFORMITY_FACTOR: f64 = 3.0;

/// One measured `lhs ≤ C · rhs` instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub parameters: BTreeMap<String, f64>,
    /// The sample with the largest ratio.
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub passed: bool,
    pub max_ratio: f64,
    pub median_ratio: f64,
    pub samples: Vec<Sample>,
    pub notes: Vec<String>,
}

/// `lhs / rhs`, with `0/0 = 0` and `x/0 = ∞` for `x > 0`.
pub fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else if rhs > 0.0 {
        lhs / rhs
    } else {
        f64::INFINITY
    }
}

/// Median (mean of the central pair for even lengths). NaN for empty input.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

pub fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// `(max, median, max ≤ UNIFORMITY_FACTOR · median)` over a parameter sweep.
pub fn uniformity_proxy(values: &[f64]) -> (f64, f64, bool) {
    let max = max_of(values);
    let med = median(values);
    let ok = max.is_finite() && max <= UNIFORMITY_FACTOR * med;
    (max, med, ok)
}

impl InequalityReport {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            parameters: BTreeMap::new(),
            lhs: 0.0,
            rhs: 0.0,
            ratio: 0.0,
            passed: false,
            max_ratio: 0.0,
            median_ratio: 0.0,
            samples: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }

    pub fn push(&mut self, label: impl Into<String>, lhs: f64, rhs: f64) {
        self.samples.push(Sample {
            label: label.into(),
            lhs,
            rhs,
            ratio: ratio(lhs, rhs),
        });
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.ratio).collect()
    }

    /// Fills the summary statistics from the samples and sets the pass flag.
    pub fn finish(mut self, passed: bool) -> Self {
        let ratios = self.ratios();
        if let Some(worst) = self
            .samples
            .iter()
            .max_by(|a, b| a.ratio.total_cmp(&b.ratio))
        {
            self.lhs = worst.lhs;
            self.rhs = worst.rhs;
            self.ratio = worst.ratio;
        }
        self.max_ratio = if ratios.is_empty() {
            0.0
        } else {
            max_of(&ratios)
        };
        self.median_ratio = if ratios.is_empty() {
            0.0
        } else {
            median(&ratios)
        };
        self.passed = passed;
        self
    }

    /// Every sample has a finite ratio.
    pub fn all_finite(&self) -> bool {
        self.samples.iter().all(|s| s.ratio.is_finite())
    }

    /// CSV with columns `label,lhs,rhs,ratio`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("label,lhs,rhs,ratio\n");
        for s in &self.samples {
            let _ = writeln!(out, "{},{:e},{:e},{:e}", s.label, s.lhs, s.rhs, s.ratio);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_conventions() {
        assert_eq!(ratio(0.0, 0.0), 0.0);
        assert_eq!(ratio(1.0, 0.0), f64::INFINITY);
        assert_eq!(ratio(1.0, 4.0), 0.25);
    }

    #[test]
    fn median_and_proxy() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        let (max, med, ok) = uniformity_proxy(&[1.0, 1.1, 0.9, 2.9]);
        assert_eq!(max, 2.9);
        assert!((med - 1.05).abs() < 1e-15);
        assert!(ok);
        assert!(!uniformity_proxy(&[1.0, 1.0, 1.0, 10.0]).2);
    }

    #[test]
    fn finish_tracks_worst_sample() {
        let mut r = InequalityReport::new("demo").with_param("s", 1.0);
        r.push("a", 1.0, 2.0);
        r.push("b", 3.0, 2.0);
        let r = r.finish(true);
        assert_eq!(r.ratio, 1.5);
        assert_eq!(r.lhs, 3.0);
        assert_eq!(r.median_ratio, 1.0);
        assert!(r.to_csv().starts_with("label,lhs,rhs,ratio\na,"));
    }
}
