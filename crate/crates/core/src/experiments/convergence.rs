use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use super::rates::{fit_rate, BoundModel, RateFit};
use crate::error::{Error, Result};
use crate::report::ratio;
use crate::solver::{Dealias, Simulation, SolverConfig};
use crate::spectral::samples::InitialData;
use crate::spectral::{check_alpha, sobolev_norm, Grid2D, RealField};

/// Factor by which a smaller `ε` may exceed the next larger one.
pub const MONOTONE_SLACK: f64 = 1.1;
/// Largest accepted `max/min` of the model ratios over the sweep.
pub const RATIO_SPREAD_LIMIT: f64 = 10.0;
/// Bound on `‖ω̄‖` for a control member with `α = α₀`.
pub const CONTROL_LIMIT: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub alpha0: f64,
    pub alphas: Vec<f64>,
    /// Order of the difference norm, `s > 2`.
    pub s: f64,
    pub initial: InitialData,
    pub t_end: f64,
    pub n: usize,
    pub length: f64,
    /// Measurement times in `(0, t_end]`.
    pub times: Vec<f64>,
    pub cfl: f64,
    /// Shared step = `dt_safety · min_α` of the initial CFL step.
    pub dt_safety: f64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            alpha0: 0.5,
            alphas: vec![0.48, 0.46, 0.44, 0.40, 0.5],
            s: 3.0,
            initial: InitialData::TwoMode { amplitude: 1.0 },
            t_end: 1.0,
            n: 256,
            length: std::f64::consts::TAU,
            times: vec![0.25, 0.5, 1.0],
            cfl: 0.4,
            dt_safety: 0.5,
        }
    }
}

impl ConvergenceConfig {
    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha0)?;
        for &a in &self.alphas {
            check_alpha(a)?;
        }
        if self.alphas.iter().all(|&a| a == self.alpha0) {
            return Err(Error::Config(
                "alphas must contain a value other than alpha0".into(),
            ));
        }
        if !(self.s > 2.0) {
            return Err(Error::out_of_range("s", self.s, "s > 2"));
        }
        if !(self.dt_safety > 0.0 && self.dt_safety <= 1.0) {
            return Err(Error::out_of_range(
                "dt_safety",
                self.dt_safety,
                "0 < dt_safety <= 1",
            ));
        }
        if self.times.is_empty() {
            return Err(Error::Config("times must not be empty".into()));
        }
        if let Some(&t) = self.times.iter().find(|&&t| !(t > 0.0 && t <= self.t_end)) {
            return Err(Error::out_of_range("times", t, "0 < t <= t_end"));
        }
        if self.times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("times must be strictly increasing".into()));
        }
        self.solver(self.alpha0, None).validate()
    }

    fn solver(&self, alpha: f64, dt: Option<f64>) -> SolverConfig {
        SolverConfig {
            alpha,
            n: self.n,
            length: self.length,
            t_end: self.t_end,
            cfl: self.cfl,
            dealias: Dealias::TwoThirds,
            filter: None,
            snapshot_every: None,
            sobolev: vec![],
            fixed_dt: dt,
            ..SolverConfig::default()
        }
    }

    pub fn model(&self) -> BoundModel {
        BoundModel::for_reference(self.alpha0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub alpha: f64,
    pub eps: f64,
    pub t: f64,
    pub hs_diff: f64,
    pub model_bound: f64,
    pub model_ratio: f64,
}

/// Checks at one measurement time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeCheck {
    pub t: f64,
    pub fit: Option<RateFit>,
    pub monotone: bool,
    pub ratio_spread: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemberFailure {
    pub alpha: f64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub dt: f64,
    pub steps: u64,
    pub rows: Vec<ConvergenceRow>,
    pub checks: Vec<TimeCheck>,
    pub control_max: Option<f64>,
    /// `‖ω̄(t_last)‖ ≥ ½ max_t ‖ω̄(t)‖` for every member.
    pub growth_ok: bool,
    /// Largest energy fraction in the outer half of the retained band.
    pub max_tail: f64,
    pub failures: Vec<MemberFailure>,
    pub passed: bool,
}

impl ConvergenceStudy {
    /// Columns `alpha, eps, t, hs_diff, model_bound, model_ratio`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("alpha,eps,t,hs_diff,model_bound,model_ratio\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{:e},{},{:e},{:e},{:e}",
                r.alpha, r.eps, r.t, r.hs_diff, r.model_bound, r.model_ratio
            );
        }
        out
    }
}

struct Member {
    states: Vec<RealField>,
    steps: u64,
    tail: f64,
}

fn run_member(cfg: &SolverConfig, omega0: &RealField, times: &[f64]) -> Result<Member> {
    let mut sim = Simulation::new(cfg, omega0)?;
    let mut states = Vec::with_capacity(times.len());
    let mut tail: f64 = 0.0;
    for &t in times {
        sim.advance_to(t)?;
        tail = tail.max(sim.tail_fraction());
        states.push(sim.state().omega);
    }
    Ok(Member {
        states,
        steps: sim.steps(),
        tail,
    })
}

/// Runs `ω^{α₀}` and every `ω^α` from the same data on one time grid and
/// measures `‖ω^α(t) − ω^{α₀}(t)‖_{H^s}` at the configured times.
pub fn convergence_study(cfg: &ConvergenceConfig) -> Result<ConvergenceStudy> {
    cfg.validate()?;
    let grid = Grid2D::new(cfg.n, cfg.length)?;
    let omega0 = cfg.initial.sample(&grid)?;
    let mut members: Vec<f64> = vec![cfg.alpha0];
    members.extend(cfg.alphas.iter().copied());
    let mut dt = f64::INFINITY;
    for &a in &members {
        dt = dt.min(Simulation::new(&cfg.solver(a, None), &omega0)?.cfl_dt());
    }
    let dt = dt * cfg.dt_safety;

    let results: Vec<Result<Member>> = members
        .par_iter()
        .map(|&a| run_member(&cfg.solver(a, Some(dt)), &omega0, &cfg.times))
        .collect();
    let mut results = members.iter().copied().zip(results);
    let (_, reference) = results.next().unwrap();
    let reference = reference?;
    let model = cfg.model();

    let mut failures = Vec::new();
    let mut rows = Vec::new();
    let mut max_tail = reference.tail;
    let mut growth_ok = true;
    let mut done: Vec<(f64, Vec<f64>)> = Vec::new();
    for (alpha, res) in results {
        match res {
            Err(e) => failures.push(MemberFailure {
                alpha,
                error: e.to_string(),
            }),
            Ok(m) => {
                max_tail = max_tail.max(m.tail);
                let norms: Vec<f64> = m
                    .states
                    .iter()
                    .zip(&reference.states)
                    .map(|(a, b)| sobolev_norm(&a.sub(b).expect("shared grid"), cfg.s))
                    .collect();
                let peak = norms.iter().copied().fold(0.0, f64::max);
                if alpha != cfg.alpha0 {
                    growth_ok &= *norms.last().unwrap() >= 0.5 * peak;
                }
                done.push((alpha, norms));
            }
        }
    }
    // Controls are separate runs with α = α₀.
    let control_max = done
        .iter()
        .filter(|(a, _)| *a == cfg.alpha0)
        .flat_map(|(_, n)| n.iter().copied())
        .reduce(f64::max);

    for (alpha, norms) in &done {
        let eps = (alpha - cfg.alpha0).abs();
        for (&t, &h) in cfg.times.iter().zip(norms) {
            let bound = if eps > 0.0 { model.eval(eps) } else { 0.0 };
            rows.push(ConvergenceRow {
                alpha: *alpha,
                eps,
                t,
                hs_diff: h,
                model_bound: bound,
                model_ratio: ratio(h, bound),
            });
        }
    }

    let mut checks = Vec::new();
    for (i, &t) in cfg.times.iter().enumerate() {
        let mut pts: Vec<(f64, f64)> = done
            .iter()
            .filter(|(a, _)| *a != cfg.alpha0)
            .map(|(a, n)| ((a - cfg.alpha0).abs(), n[i]))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let monotone = pts.windows(2).all(|w| w[0].1 <= MONOTONE_SLACK * w[1].1)
            && pts.iter().all(|p| p.1 > 0.0);
        let eps: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let norms: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let fit = fit_rate(&eps, &norms, model).ok();
        let spread = match &fit {
            Some(f) => f.ratio_spread(),
            None => f64::NAN,
        };
        let passed = fit.is_some() && monotone && spread < RATIO_SPREAD_LIMIT;
        checks.push(TimeCheck {
            t,
            fit,
            monotone,
            ratio_spread: spread,
            passed,
        });
    }
    let control_ok = control_max.is_none_or(|c| c < CONTROL_LIMIT);
    let passed = failures.is_empty()
        && checks.iter().all(|c| c.passed)
        && control_ok
        && growth_ok
        && max_tail < crate::solver::RESOLUTION_LIMIT;
    Ok(ConvergenceStudy {
        dt,
        steps: reference.steps,
        rows,
        checks,
        control_max,
        growth_ok,
        max_tail,
        failures,
        passed,
    })
}
