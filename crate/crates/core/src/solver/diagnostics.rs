use num_complex::Complex64;
use serde::Serialize;
use std::fmt::Write as _;

use super::{Operator, I};
use crate::spectral::{lp_norm_slice, spectral_sobolev_norm, SpectralField};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticRecord {
    pub t: f64,
    pub l1: f64,
    pub l2: f64,
    pub l4: f64,
    /// `‖ω‖_{H^s}` in the order of the configured indices.
    pub hs: Vec<f64>,
    pub umax: f64,
    pub divmax: f64,
}

impl DiagnosticRecord {
    pub(super) fn measure(t: f64, hat: &SpectralField, op: &Operator, sobolev: &[f64]) -> Self {
        let c = hat.coeffs();
        let mut buf: Vec<Complex64> = c
            .iter()
            .enumerate()
            .map(|(i, c)| c - I * c * (op.k1[i] * op.a1[i] + op.k2[i] * op.a2[i]))
            .collect();
        op.inverse(&mut buf);
        let omega: Vec<f64> = buf.iter().map(|z| z.re).collect();
        let divmax = buf.iter().fold(0.0, |m: f64, z| m.max(z.im.abs()));
        let (u1, u2) = op.velocity(c);
        let umax = u1
            .iter()
            .zip(&u2)
            .fold(0.0, |m: f64, (a, b)| m.max(a.hypot(*b)));
        let cell = op.grid.cell_area();
        Self {
            t,
            l1: lp_norm_slice(&omega, cell, 1.0),
            l2: lp_norm_slice(&omega, cell, 2.0),
            l4: lp_norm_slice(&omega, cell, 4.0),
            hs: sobolev
                .iter()
                .map(|&s| spectral_sobolev_norm(hat, s))
                .collect(),
            umax,
            divmax,
        }
    }

    pub fn is_finite(&self) -> bool {
        [self.t, self.l1, self.l2, self.l4, self.umax, self.divmax]
            .iter()
            .chain(&self.hs)
            .all(|v| v.is_finite())
    }
}

/// Time series of [`DiagnosticRecord`]s sharing one list of Sobolev orders.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    sobolev: Vec<f64>,
    records: Vec<DiagnosticRecord>,
}

impl Diagnostics {
    pub fn new(sobolev: &[f64]) -> Self {
        Self {
            sobolev: sobolev.to_vec(),
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, r: DiagnosticRecord) {
        debug_assert_eq!(r.hs.len(), self.sobolev.len());
        self.records.push(r);
    }

    pub fn records(&self) -> &[DiagnosticRecord] {
        &self.records
    }

    pub fn sobolev(&self) -> &[f64] {
        &self.sobolev
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&DiagnosticRecord> {
        self.records.last()
    }

    /// `max_t |q(t) − q(0)| / |q(0)|` for a recorded quantity.
    pub fn relative_drift(&self, q: impl Fn(&DiagnosticRecord) -> f64) -> f64 {
        let Some(first) = self.records.first() else {
            return 0.0;
        };
        let q0 = q(first);
        let scale = if q0 == 0.0 { 1.0 } else { q0.abs() };
        self.records
            .iter()
            .fold(0.0, |m, r| m.max((q(r) - q0).abs() / scale))
    }

    pub fn max_divergence(&self) -> f64 {
        self.records.iter().fold(0.0, |m, r| m.max(r.divmax))
    }

    /// Columns `t, l1, l2, l4, hs_<s>…, umax, divmax`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,l1,l2,l4");
        for s in &self.sobolev {
            let _ = write!(out, ",hs_{s}");
        }
        out.push_str(",umax,divmax\n");
        for r in &self.records {
            let _ = write!(
                out,
                "{:.17e},{:.17e},{:.17e},{:.17e}",
                r.t, r.l1, r.l2, r.l4
            );
            for h in &r.hs {
                let _ = write!(out, ",{h:.17e}");
            }
            let _ = writeln!(out, ",{:.17e},{:.17e}", r.umax, r.divmax);
        }
        out
    }
}
