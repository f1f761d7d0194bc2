use gsqg::experiments::{
    convergence_study, embedding_family, hls_sigma_sweep, hls_target_exponent, ode_battery,
    random_family, transport_commutator_sweep, velocity_product_sweep, verify_hls,
    verify_kpv_family, verify_ode_comparison,
};
use gsqg::kernel::{
    gaussian_family, kernel_csv, quadrature_self_consistency, verify_k1_uniform,
    verify_split_identity, verify_t1_bound, verify_t2_hs_bound, verify_t2_l2_bound, BoundSweep,
    MeshSpec,
};
use gsqg::littlewood_paley::{besov_norm, build_partition, decompose};
use gsqg::report::InequalityReport;
use gsqg::solver::{load_snapshot, run, save_snapshot, Diagnostics, SolverState};
use gsqg::spectral::{lp_norm, sobolev_norm, Grid2D, RealField};
use serde::Serialize;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::{LpConfig, RunConfig, Suite, SweepConfig, VerifyConfig};
use crate::{plot, CliError, Outcome};

/// Points where the split identity is sampled.
const SPLIT_POINTS: [[f64; 2]; 3] = [[0.3, -0.2], [1.7, 0.4], [-2.5, 1.0]];
const SPLIT_TOL: f64 = 1e-6;

pub(crate) struct Writer {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Writer {
    pub(crate) fn new(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| {
            CliError::Config(format!(
                "output directory {} is not writable: {e}",
                dir.display()
            ))
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub(crate) fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub(crate) fn text(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        let p = self.path(name);
        std::fs::write(&p, body)?;
        self.files.push(p);
        Ok(())
    }

    pub(crate) fn json(&mut self, name: &str, value: &impl Serialize) -> Result<(), CliError> {
        let mut body =
            serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
        body.push('\n');
        self.text(name, &body)
    }

    fn snapshot(&mut self, name: &str, state: &SolverState) -> Result<(), CliError> {
        let p = self.path(name);
        save_snapshot(state, &p)?;
        self.files.push(p);
        Ok(())
    }

    pub(crate) fn record(&mut self, p: PathBuf) {
        self.files.push(p);
    }

    pub(crate) fn finish(self, passed: bool, summary: Value) -> Outcome {
        Outcome {
            passed,
            files: self.files,
            summary,
        }
    }
}

fn drift_summary(d: &Diagnostics) -> Value {
    json!({
        "records": d.len(),
        "l1_drift": d.relative_drift(|r| r.l1),
        "l2_drift": d.relative_drift(|r| r.l2),
        "l4_drift": d.relative_drift(|r| r.l4),
        "max_divergence": d.max_divergence(),
    })
}

pub fn run_command(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    cfg.solver.validate()?;
    let grid = cfg.solver.grid()?;
    let omega0 = cfg.initial.sample(&grid)?;
    let mut w = Writer::new(out)?;
    w.json("run_config.json", cfg)?;
    w.snapshot(
        "initial.gsf1",
        &SolverState::initial(omega0.clone(), cfg.solver.alpha),
    )?;
    match run(&cfg.solver, &omega0) {
        Ok(res) => {
            w.text("diagnostics.csv", &res.diagnostics.to_csv())?;
            for (i, s) in res.snapshots.iter().enumerate() {
                w.snapshot(&format!("snapshot_{i:04}.gsf1"), s)?;
            }
            w.snapshot("final.gsf1", &res.final_state)?;
            let summary = json!({
                "command": "run",
                "passed": true,
                "t_final": res.final_state.t,
                "steps": res.final_state.step_count,
                "snapshots": res.snapshots.len(),
                "diagnostics": drift_summary(&res.diagnostics),
            });
            w.json("run.json", &summary)?;
            Ok(w.finish(true, summary))
        }
        Err(fail) if fail.diagnostics.is_empty() => Err(fail.error.into()),
        Err(fail) => {
            w.text("diagnostics.csv", &fail.diagnostics.to_csv())?;
            for (i, s) in fail.snapshots.iter().enumerate() {
                w.snapshot(&format!("snapshot_{i:04}.gsf1"), s)?;
            }
            let summary = json!({
                "command": "run",
                "passed": false,
                "error": fail.error.to_string(),
                "diagnostics": drift_summary(&fail.diagnostics),
            });
            w.json("run.json", &summary)?;
            Ok(w.finish(false, summary))
        }
    }
}

pub fn sweep_command(cfg: &SweepConfig, out: &Path) -> Result<Outcome, CliError> {
    let study = convergence_study(cfg)?;
    let mut w = Writer::new(out)?;
    w.json("sweep_config.json", cfg)?;
    w.text("convergence.csv", &study.to_csv())?;
    let summary = json!({
        "command": "sweep",
        "passed": study.passed,
        "model": cfg.model(),
        "dt": study.dt,
        "steps": study.steps,
        "checks": study.checks,
        "control_max": study.control_max,
        "growth_ok": study.growth_ok,
        "max_tail": study.max_tail,
        "failures": study.failures,
    });
    w.json("sweep.json", &summary)?;
    Ok(w.finish(study.passed, summary))
}

fn report_summary(r: &InequalityReport) -> Value {
    json!({
        "name": r.name,
        "passed": r.passed,
        "max_ratio": r.max_ratio,
        "median_ratio": r.median_ratio,
        "samples": r.samples.len(),
        "notes": r.notes,
    })
}

struct SuiteOutput {
    files: Vec<(String, String)>,
    reports: Vec<InequalityReport>,
}

impl SuiteOutput {
    fn new() -> Self {
        Self {
            files: Vec::new(),
            reports: Vec::new(),
        }
    }

    fn report(&mut self, file: &str, r: InequalityReport) {
        self.files.push((file.to_string(), r.to_csv()));
        self.reports.push(r);
    }

    fn sweep(&mut self, file: &str, s: BoundSweep) {
        self.files.push((file.to_string(), kernel_csv(&s.records)));
        self.reports.push(s.report);
    }
}

struct Families {
    grid: Grid2D,
    first: Vec<RealField>,
    second: Vec<RealField>,
}

impl Families {
    fn new(cfg: &VerifyConfig) -> Result<Self, CliError> {
        let grid = Grid2D::periodic(cfg.n)?;
        let first = random_family(&grid, cfg.seed, cfg.family_size, cfg.kmax)?;
        let second = random_family(&grid, cfg.seed.wrapping_add(1), cfg.family_size, cfg.kmax)?;
        Ok(Self {
            grid,
            first,
            second,
        })
    }

    fn pairs(&self) -> Vec<(RealField, RealField)> {
        self.first
            .iter()
            .cloned()
            .zip(self.second.iter().cloned())
            .collect()
    }
}

fn run_suite(
    suite: Suite,
    cfg: &VerifyConfig,
    fam: Option<&Families>,
) -> Result<SuiteOutput, CliError> {
    let mut o = SuiteOutput::new();
    let fields = || fam.expect("families are built for field suites");
    match suite {
        Suite::Kpv => o.report(
            "kpv.csv",
            verify_kpv_family(&fields().pairs(), cfg.kpv.s, cfg.kpv.exponents)?,
        ),
        Suite::Hls => {
            let h = &cfg.hls;
            let q = hls_target_exponent(h.p, h.sigma)?;
            o.report("hls.csv", verify_hls(&fields().first, h.sigma, h.p, q)?);
            o.report(
                "hls_sigma_sweep.csv",
                hls_sigma_sweep(&fields().first, &h.sweep_sigmas, h.sweep_p)?,
            );
        }
        Suite::Kernel => {
            let k = &cfg.kernel;
            let family = gaussian_family();
            o.sweep(
                "kernel_t1.csv",
                verify_t1_bound(&family, k.s, &k.betas, k.variant)?,
            );
            o.sweep(
                "kernel_t2_hs.csv",
                verify_t2_hs_bound(&family, k.s, &k.betas, k.variant)?,
            );
            o.sweep(
                "kernel_t2_l2.csv",
                verify_t2_l2_bound(&family, &k.l2_betas, k.variant)?,
            );
            o.sweep(
                "kernel_k1.csv",
                verify_k1_uniform(&k.betas, &k.ys, k.variant, &MeshSpec::default())?,
            );
            let split =
                verify_split_identity(&family, &k.betas, &SPLIT_POINTS, k.variant, SPLIT_TOL)?;
            o.report("kernel_split.csv", split);
            let q = quadrature_self_consistency(
                &family[1],
                &k.consistency_betas,
                &SPLIT_POINTS,
                &k.ys,
                k.variant,
            )?;
            o.report("kernel_quadrature.csv", q);
        }
        Suite::VelocityProduct => {
            let part = build_partition(&fields().grid)?;
            o.report(
                "velocity_product.csv",
                velocity_product_sweep(&fields().pairs(), &cfg.alphas, cfg.s, &part)?,
            );
        }
        Suite::TransportCommutator => {
            let part = build_partition(&fields().grid)?;
            o.report(
                "transport_commutator.csv",
                transport_commutator_sweep(&fields().first, &cfg.alphas, cfg.s, &part)?,
            );
        }
        Suite::Ode => {
            o.report("ode.csv", ode_battery(cfg.seed, cfg.ode.count)?);
            if !cfg.ode.cases.is_empty() {
                let mut all = InequalityReport::new("ode_cases");
                let mut ok = true;
                for (i, spec) in cfg.ode.cases.iter().enumerate() {
                    let r = verify_ode_comparison(spec)?;
                    for s in &r.samples {
                        all.push(format!("case_{i}"), s.lhs, s.rhs);
                    }
                    for n in &r.notes {
                        all.note(format!("case_{i}: {n}"));
                    }
                    ok &= r.passed;
                }
                o.report("ode_cases.csv", all.finish(ok));
            }
        }
        Suite::Embedding => {
            let part = build_partition(&fields().grid)?;
            o.report(
                "embedding.csv",
                embedding_family(&fields().first, cfg.s, cfg.embedding_alpha, &part)?,
            );
        }
    }
    Ok(o)
}

pub fn verify_command(cfg: &VerifyConfig, out: &Path) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let mut suites = cfg.suites.clone();
    suites.sort();
    suites.dedup();
    let needs_fields = suites
        .iter()
        .any(|s| !matches!(s, Suite::Kernel | Suite::Ode));
    let fam = needs_fields.then(|| Families::new(cfg)).transpose()?;
    let mut w = Writer::new(out)?;
    w.json("verify_config.json", cfg)?;
    let mut passed = true;
    let mut per_suite = serde_json::Map::new();
    for suite in suites {
        let o = run_suite(suite, cfg, fam.as_ref())?;
        for (name, body) in &o.files {
            w.text(name, body)?;
        }
        let ok = o.reports.iter().all(|r| r.passed);
        passed &= ok;
        per_suite.insert(
            suite.name().to_string(),
            json!({
                "passed": ok,
                "reports": o.reports.iter().map(report_summary).collect::<Vec<_>>(),
            }),
        );
    }
    let summary = json!({
        "command": "verify",
        "passed": passed,
        "seed": cfg.seed,
        "suites": per_suite,
    });
    w.json("verify.json", &summary)?;
    Ok(w.finish(passed, summary))
}

pub fn lp_command(cfg: &LpConfig, out: &Path) -> Result<Outcome, CliError> {
    let path = if cfg.snapshot.is_relative() && !cfg.snapshot.exists() {
        out.join(&cfg.snapshot)
    } else {
        cfg.snapshot.clone()
    };
    let state = load_snapshot(&path)
        .map_err(|e| CliError::Config(format!("snapshot {}: {e}", path.display())))?;
    let f = state.omega;
    let part = build_partition(f.grid())?;
    let blocks = decompose(&f, &part)?;
    let total = sobolev_norm(&f, 0.0).powi(2);
    let mut csv = String::from("q,l2,energy,energy_fraction\n");
    for q in -1..=part.j_max() {
        let b = blocks.block(q);
        let e = sobolev_norm(b, 0.0).powi(2);
        let frac = if total > 0.0 { e / total } else { 0.0 };
        let _ = writeln!(csv, "{q},{:e},{:e},{:e}", lp_norm(b, 2.0)?, e, frac);
    }
    let mut besov = String::from("s,p,q,norm\n");
    let mut norms = Vec::new();
    for idx in &cfg.besov {
        let v = besov_norm(&f, &part, *idx)?;
        let _ = writeln!(besov, "{},{},{},{:e}", idx.s, idx.p, idx.q, v);
        norms.push(json!({"s": idx.s, "p": idx.p, "q": idx.q, "norm": v}));
    }
    let mut w = Writer::new(out)?;
    w.text("lp_blocks.csv", &csv)?;
    w.text("besov.csv", &besov)?;
    let summary = json!({
        "command": "lp",
        "passed": true,
        "snapshot": cfg.snapshot,
        "t": state.t,
        "alpha": state.alpha,
        "n": f.grid().n(),
        "j_max": part.j_max(),
        "besov": norms,
    });
    w.json("lp.json", &summary)?;
    Ok(w.finish(true, summary))
}

pub fn report_command(dir: &Path) -> Result<Outcome, CliError> {
    if !dir.is_dir() {
        return Err(CliError::Config(format!(
            "{} is not a directory",
            dir.display()
        )));
    }
    let mut csvs: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    csvs.sort();
    let mut w = Writer::new(dir)?;
    let mut files = Vec::new();
    for p in &csvs {
        let table = plot::Table::read(p)?;
        files.push(json!({
            "file": p.file_name().map(|s| s.to_string_lossy().into_owned()),
            "rows": table.rows.len(),
            "columns": table.header,
        }));
        if let Some(svg) = plot::plot_table(p, &table)? {
            w.record(svg);
        }
    }
    let mut verdicts = serde_json::Map::new();
    for name in ["run.json", "sweep.json", "verify.json", "lp.json"] {
        let p = dir.join(name);
        if let Ok(text) = std::fs::read_to_string(&p) {
            let v: Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
            if let Some(b) = v.get("passed").and_then(Value::as_bool) {
                verdicts.insert(name.trim_end_matches(".json").to_string(), Value::Bool(b));
            }
        }
    }
    let passed = verdicts.values().all(|v| v.as_bool() == Some(true));
    let summary = json!({
        "command": "report",
        "passed": passed,
        "verdicts": verdicts,
        "files": files,
    });
    w.json("summary.json", &summary)?;
    Ok(w.finish(passed, summary))
}
