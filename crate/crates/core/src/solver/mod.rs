//! Pseudo-spectral integration of `ω_t + u·∇ω = 0` on the periodic square.
//!
//! The state lives in Fourier space. Each right-hand side costs three FFTs:
//! two packed inverse transforms (`û₁ + i∂̂₁ω`, `û₂ + i∂̂₂ω`) and one forward
//! transform of the product. Time stepping is classical RK4 with a CFL step.

mod config;
mod diagnostics;
mod snapshot;

pub use config::{Dealias, SolverConfig, SpectralFilter};
pub use diagnostics::{DiagnosticRecord, Diagnostics};
pub use snapshot::{load_snapshot, read_gsf1, save_snapshot, write_gsf1, GSF1_MAGIC};

use num_complex::Complex64;
use std::fmt;

use crate::error::{Error, Result};
use crate::spectral::{ensure_same_grid, Grid2D, RealField, SpectralField};

/// Floor on `max|u|` in the CFL rule.
pub const VELOCITY_FLOOR: f64 = 1e-12;
/// Largest relative energy outside the retained modes accepted as initial data.
pub const RESOLUTION_LIMIT: f64 = 1e-8;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub t: f64,
    pub alpha: f64,
    pub omega: RealField,
    pub step_count: u64,
    pub dt_last: f64,
}

impl SolverState {
    pub fn initial(omega: RealField, alpha: f64) -> Self {
        Self {
            t: 0.0,
            alpha,
            omega,
            step_count: 0,
            dt_last: 0.0,
        }
    }
}

/// Precomputed multipliers of one configuration.
#[derive(Debug, Clone)]
struct Operator {
    grid: Grid2D,
    /// `û = i·(a₁, a₂)·ω̂` with `(a₁, a₂) = ±(−k₂, k₁)|k|^{2α−2}`.
    a1: Vec<f64>,
    a2: Vec<f64>,
    /// Wavevector with the Nyquist lines zeroed.
    k1: Vec<f64>,
    k2: Vec<f64>,
    keep: Vec<bool>,
    damping: Option<Vec<f64>>,
}

impl Operator {
    fn new(config: &SolverConfig, sign: f64) -> Result<Self> {
        config.validate()?;
        let grid = config.grid()?;
        let n = grid.n();
        let len = grid.len();
        let (mut a1, mut a2) = (vec![0.0; len], vec![0.0; len]);
        let (mut k1v, mut k2v) = (vec![0.0; len], vec![0.0; len]);
        let mut keep = vec![true; len];
        let k_nyq = grid.nyquist_wavenumber();
        let mut damping = config.filter.map(|_| vec![1.0; len]);
        for idx in 0..len {
            if let Dealias::TwoThirds = config.dealias {
                let (m1, m2) = (signed(idx % n, n), signed(idx / n, n));
                keep[idx] = 3 * m1.unsigned_abs() < n as u64 && 3 * m2.unsigned_abs() < n as u64;
            }
            if grid.is_nyquist(idx) {
                keep[idx] = false;
                continue;
            }
            let (k1, k2) = grid.wavevector(idx);
            k1v[idx] = k1;
            k2v[idx] = k2;
            if idx != 0 {
                let w = sign * (k1 * k1 + k2 * k2).powf(config.alpha - 1.0);
                a1[idx] = -k2 * w;
                a2[idx] = k1 * w;
            }
            if let (Some(d), Some(f)) = (damping.as_mut(), config.filter) {
                let r = grid.wavenumber_magnitude(idx) / k_nyq;
                d[idx] = (-f.strength * r.powi(f.order as i32)).exp();
            }
        }
        Ok(Self {
            grid,
            a1,
            a2,
            k1: k1v,
            k2: k2v,
            keep,
            damping,
        })
    }

    fn inverse(&self, buf: &mut [Complex64]) {
        self.grid.fft().inverse(buf);
        let s = 1.0 / self.grid.len() as f64;
        buf.iter_mut().for_each(|c| *c *= s);
    }

    /// Physical `(u₁, u₂)`.
    fn velocity(&self, hat: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let mut buf: Vec<Complex64> = hat
            .iter()
            .enumerate()
            .map(|(i, c)| I * c * self.a1[i] - c * self.a2[i])
            .collect();
        self.inverse(&mut buf);
        buf.into_iter().map(|c| (c.re, c.im)).unzip()
    }

    /// `−P(u·∇ω)` with `P` the dealiasing projection.
    fn rhs(&self, hat: &[Complex64]) -> std::result::Result<Vec<Complex64>, ()> {
        let pack = |a: &[f64], k: &[f64]| -> Vec<Complex64> {
            let mut buf: Vec<Complex64> = hat
                .iter()
                .enumerate()
                .map(|(i, c)| I * c * a[i] - c * k[i])
                .collect();
            self.inverse(&mut buf);
            buf
        };
        let p1 = pack(&self.a1, &self.k1);
        let p2 = pack(&self.a2, &self.k2);
        let mut prod: Vec<Complex64> = p1
            .iter()
            .zip(&p2)
            .map(|(x, y)| Complex64::new(x.re * x.im + y.re * y.im, 0.0))
            .collect();
        if prod.iter().any(|c| !c.re.is_finite()) {
            return Err(());
        }
        self.grid.fft().forward(&mut prod);
        for (c, &k) in prod.iter_mut().zip(&self.keep) {
            *c = if k { -*c } else { Complex64::default() };
        }
        // Σ u·∇ω vanishes because ∇·u = 0.
        prod[0] = Complex64::default();
        Ok(prod)
    }

    fn project(&self, hat: &mut [Complex64]) {
        hat.iter_mut()
            .zip(&self.keep)
            .filter(|(_, &k)| !k)
            .for_each(|(c, _)| *c = Complex64::default());
        hat[0] = Complex64::default();
    }

    fn tail_fraction(&self, hat: &[Complex64]) -> f64 {
        let (mut tail, mut total) = (0.0, 0.0);
        for (c, &k) in hat.iter().zip(&self.keep).skip(1) {
            total += c.norm_sqr();
            if !k {
                tail += c.norm_sqr();
            }
        }
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }
}

fn signed(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Everything recorded before a run stopped early.
#[derive(Debug)]
pub struct RunFailure {
    pub error: Error,
    pub diagnostics: Diagnostics,
    pub snapshots: Vec<SolverState>,
}

impl fmt::Display for RunFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} diagnostic records kept)",
            self.error,
            self.diagnostics.len()
        )
    }
}

impl std::error::Error for RunFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

impl From<RunFailure> for Error {
    fn from(f: RunFailure) -> Self {
        f.error
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub final_state: SolverState,
    pub snapshots: Vec<SolverState>,
    pub diagnostics: Diagnostics,
}

/// A configured integrator holding the spectral state.
#[derive(Debug, Clone)]
pub struct Simulation {
    config: SolverConfig,
    op: Operator,
    hat: Vec<Complex64>,
    t: f64,
    step_count: u64,
    dt_last: f64,
    umax: f64,
}

impl Simulation {
    /// Projects `omega0` onto the retained modes. Fails on a nonzero mean or
    /// more than [`RESOLUTION_LIMIT`] of the energy in discarded modes.
    pub fn new(config: &SolverConfig, omega0: &RealField) -> Result<Self> {
        Self::with_sign(config, omega0, 1.0)
    }

    /// Same dynamics with `u` replaced by `−u`, which runs the flow backwards.
    pub fn reversed(config: &SolverConfig, omega0: &RealField) -> Result<Self> {
        Self::with_sign(config, omega0, -1.0)
    }

    fn with_sign(config: &SolverConfig, omega0: &RealField, sign: f64) -> Result<Self> {
        let op = Operator::new(config, sign)?;
        ensure_same_grid(omega0.grid(), &op.grid)?;
        if !omega0.is_finite() {
            return Err(Error::NonFinite("initial vorticity".into()));
        }
        if !omega0.is_mean_zero() {
            return Err(Error::ZeroModeSingularity(format!(
                "initial vorticity has mean {:.3e}",
                omega0.mean()
            )));
        }
        let mut hat = omega0.to_spectral().into_coeffs();
        let tail = op.tail_fraction(&hat);
        if tail > RESOLUTION_LIMIT {
            return Err(Error::Unresolved {
                tail,
                limit: RESOLUTION_LIMIT,
            });
        }
        op.project(&mut hat);
        let mut sim = Self {
            config: config.clone(),
            op,
            hat,
            t: 0.0,
            step_count: 0,
            dt_last: 0.0,
            umax: 0.0,
        };
        sim.umax = sim.max_velocity();
        Ok(sim)
    }

    /// Resumes from a saved state; the clock continues from `state.t`.
    pub fn from_state(config: &SolverConfig, state: &SolverState) -> Result<Self> {
        let mut sim = Self::new(config, &state.omega)?;
        sim.t = state.t;
        sim.step_count = state.step_count;
        sim.dt_last = state.dt_last;
        Ok(sim)
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn steps(&self) -> u64 {
        self.step_count
    }

    pub fn grid(&self) -> &Grid2D {
        &self.op.grid
    }

    pub fn spectral(&self) -> SpectralField {
        SpectralField::from_raw(&self.op.grid, self.hat.clone())
    }

    pub fn state(&self) -> SolverState {
        SolverState {
            t: self.t,
            alpha: self.config.alpha,
            omega: self.spectral().to_real(),
            step_count: self.step_count,
            dt_last: self.dt_last,
        }
    }

    /// Energy fraction in modes with `max(|m₁|, |m₂|) > n/6`, the outer half
    /// of the two-thirds band.
    pub fn tail_fraction(&self) -> f64 {
        let n = self.op.grid.n();
        let (mut tail, mut total) = (0.0, 0.0);
        for (idx, c) in self.hat.iter().enumerate().skip(1) {
            let m = signed(idx % n, n).abs().max(signed(idx / n, n).abs());
            total += c.norm_sqr();
            if 6 * m as usize > n {
                tail += c.norm_sqr();
            }
        }
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }

    fn max_velocity(&self) -> f64 {
        let (u1, u2) = self.op.velocity(&self.hat);
        u1.iter().zip(&u2).fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
    }

    /// `cfl·dx/max(‖u‖_∞, 1e−12)` (or the fixed step), capped at `t_end − t`.
    pub fn cfl_dt(&self) -> f64 {
        let dt = self
            .config
            .fixed_dt
            .unwrap_or_else(|| self.config.cfl * self.op.grid.dx() / self.umax.max(VELOCITY_FLOOR));
        dt.min(self.config.t_end - self.t).max(0.0)
    }

    fn blow_up(&self) -> Error {
        Error::BlowUp {
            t: self.t,
            step: self.step_count,
        }
    }

    /// One RK4 step of size `dt`.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        let y = &self.hat;
        let axpy = |k: &[Complex64], h: f64| -> Vec<Complex64> {
            y.iter().zip(k).map(|(a, b)| a + b * h).collect()
        };
        let err = |_| self.blow_up();
        let k1 = self.op.rhs(y).map_err(err)?;
        let k2 = self.op.rhs(&axpy(&k1, 0.5 * dt)).map_err(err)?;
        let k3 = self.op.rhs(&axpy(&k2, 0.5 * dt)).map_err(err)?;
        let k4 = self.op.rhs(&axpy(&k3, dt)).map_err(err)?;
        let h = dt / 6.0;
        let mut next: Vec<Complex64> = (0..y.len())
            .map(|i| y[i] + h * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect();
        if let Some(d) = &self.op.damping {
            next.iter_mut().zip(d).for_each(|(c, f)| *c *= f);
        }
        if next.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(self.blow_up());
        }
        self.hat = next;
        self.t += dt;
        self.step_count += 1;
        self.dt_last = dt;
        self.umax = self.max_velocity();
        if !self.umax.is_finite() {
            return Err(self.blow_up());
        }
        Ok(())
    }

    /// Steps until `t_target`, landing on it exactly.
    pub fn advance_to(&mut self, t_target: f64) -> Result<()> {
        self.advance(t_target, &mut |_| {})
    }

    fn advance(&mut self, t_target: f64, on_step: &mut dyn FnMut(&Self)) -> Result<()> {
        let eps = 1e-12 * t_target.abs().max(1.0);
        while t_target - self.t > eps {
            if self.step_count >= self.config.max_steps {
                return Err(self.blow_up());
            }
            let dt = self.cfl_dt().min(t_target - self.t);
            self.step(dt)?;
            if (t_target - self.t).abs() <= eps {
                self.t = t_target;
            }
            on_step(self);
        }
        Ok(())
    }

    pub fn record(&self) -> DiagnosticRecord {
        DiagnosticRecord::measure(self.t, &self.spectral(), &self.op, &self.config.sobolev)
    }

    /// Integrates to `t_end`, recording diagnostics after every step and
    /// snapshots every `snapshot_every`.
    pub fn run(mut self) -> std::result::Result<RunOutput, RunFailure> {
        let mut diagnostics = Diagnostics::new(&self.config.sobolev);
        let mut snapshots = Vec::new();
        diagnostics.push(self.record());
        let t_end = self.config.t_end;
        let marks: Vec<f64> = match self.config.snapshot_every {
            Some(every) => {
                let count = (t_end / every * (1.0 + 1e-12)).floor() as usize;
                (1..=count).map(|i| (i as f64 * every).min(t_end)).collect()
            }
            None => vec![],
        };
        let mut outcome = Ok(());
        for target in marks.iter().copied().chain(std::iter::once(t_end)) {
            if target <= self.t {
                continue;
            }
            outcome = self.advance(target, &mut |s| diagnostics.push(s.record()));
            if outcome.is_err() {
                break;
            }
            if marks.contains(&target) {
                snapshots.push(self.state());
            }
        }
        if let Err(error) = outcome {
            return Err(RunFailure {
                error,
                diagnostics,
                snapshots,
            });
        }
        if let Some(r) = diagnostics.records().iter().find(|r| !r.is_finite()) {
            return Err(RunFailure {
                error: Error::NonFinite(format!("diagnostics at t = {}", r.t)),
                diagnostics,
                snapshots,
            });
        }
        Ok(RunOutput {
            final_state: self.state(),
            snapshots,
            diagnostics,
        })
    }
}

/// `−P(u·∇ω)` for a physical field; the grid must match the configuration.
pub fn rhs(omega: &RealField, config: &SolverConfig) -> Result<RealField> {
    let sim = Simulation::new(config, omega)?;
    let out = sim.op.rhs(&sim.hat).map_err(|_| sim.blow_up())?;
    Ok(SpectralField::from_raw(&sim.op.grid, out).to_real())
}

pub fn cfl_dt(state: &SolverState, config: &SolverConfig) -> Result<f64> {
    Ok(Simulation::from_state(config, state)?.cfl_dt())
}

/// One CFL-limited RK4 step from `state`.
pub fn step_rk4(state: &SolverState, config: &SolverConfig) -> Result<SolverState> {
    let mut sim = Simulation::from_state(config, state)?;
    let dt = sim.cfl_dt();
    sim.step(dt)?;
    Ok(sim.state())
}

pub fn run(
    config: &SolverConfig,
    omega0: &RealField,
) -> std::result::Result<RunOutput, RunFailure> {
    match Simulation::new(config, omega0) {
        Ok(sim) => sim.run(),
        Err(error) => Err(RunFailure {
            error,
            diagnostics: Diagnostics::new(&config.sobolev),
            snapshots: vec![],
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn config(n: usize, alpha: f64) -> SolverConfig {
        SolverConfig {
            n,
            alpha,
            ..SolverConfig::default()
        }
    }

    fn field(n: usize, f: impl Fn(f64, f64) -> f64) -> RealField {
        RealField::from_fn(&Grid2D::periodic(n).unwrap(), f)
    }

    #[test]
    fn single_modes_are_steady() {
        for alpha in [0.0, 0.25, 0.5] {
            let cfg = config(32, alpha);
            for w in [
                field(32, |x, _| x.cos()),
                field(32, |_, y| y.cos()),
                field(32, |x, y| (2.0 * x + y).sin()),
            ] {
                let r = rhs(&w, &cfg).unwrap();
                assert!(r.max_abs() < 1e-13, "alpha {alpha}: {}", r.max_abs());
            }
        }
    }

    #[test]
    fn cfl_step_for_shear() {
        let cfg = SolverConfig {
            n: 64,
            alpha: 0.0,
            ..SolverConfig::default()
        };
        let st = SolverState::initial(field(64, |x, _| x.cos()), 0.0);
        let dt = cfl_dt(&st, &cfg).unwrap();
        assert!((dt - 0.4 * TAU / 64.0).abs() < 1e-12);
        let zero = SolverState::initial(field(64, |_, _| 0.0), 0.0);
        assert_eq!(cfl_dt(&zero, &cfg).unwrap(), cfg.t_end);
    }

    #[test]
    fn zero_field_stays_zero() {
        let cfg = config(32, 0.3);
        let st = SolverState::initial(field(32, |_, _| 0.0), 0.3);
        let next = step_rk4(&st, &cfg).unwrap();
        assert_eq!(next.omega.max_abs(), 0.0);
        assert_eq!(next.t, cfg.t_end);
    }

    #[test]
    fn rejects_mean_and_unresolved_data() {
        let cfg = config(32, 0.3);
        assert!(Simulation::new(&cfg, &field(32, |x, _| 1.0 + x.cos())).is_err());
        let rough = field(32, |x, _| (14.0 * x).cos());
        assert!(matches!(
            Simulation::new(&cfg, &rough),
            Err(Error::Unresolved { .. })
        ));
        let bad = SolverConfig { cfl: 1.5, ..cfg };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn snapshots_land_on_marks() {
        let cfg = SolverConfig {
            n: 32,
            t_end: 0.5,
            snapshot_every: Some(0.2),
            ..SolverConfig::default()
        };
        let w = field(32, |x, y| x.sin() * y.cos() + 0.5 * (x + y).cos());
        let out = run(&cfg, &w).unwrap();
        let times: Vec<f64> = out.snapshots.iter().map(|s| s.t).collect();
        assert_eq!(times.len(), 2);
        assert!((times[0] - 0.2).abs() < 1e-12 && (times[1] - 0.4).abs() < 1e-12);
        assert_eq!(out.final_state.t, 0.5);
        assert_eq!(out.diagnostics.len() as u64, out.final_state.step_count + 1);
    }
}
