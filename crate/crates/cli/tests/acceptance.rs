//! Acceptance criteria 1–9. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use gsqg::experiments::{
    convergence_study, integrate_comparison, ode_battery, ConvergenceConfig, ConvergenceStudy,
    Forcing, OdeComparisonSpec,
};
use gsqg::littlewood_paley::{
    besov_norm, bony_decompose, build_partition, decompose, lp_block, BesovIndex,
};
use gsqg::solver::{run, Simulation, SolverConfig};
use gsqg::spectral::samples::random_bandlimited;
use gsqg::spectral::{
    bessel_potential, biot_savart, dealiased_product, divergence, fractional_laplacian, lp_norm,
    sobolev_norm, Grid2D, RealField,
};
use gsqg_cli::commands::verify_command;
use gsqg_cli::config::{Suite, VerifyConfig};
use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

type Check = Result<String, String>;

/// Name, time budget in seconds, check.
type Criterion = (&'static str, u64, fn() -> Check);

/// Reports whose max/median ratio is the uniformity proxy.
const UNIFORMITY: [&str; 6] = [
    "t1_hs",
    "t2_hs",
    "t2_l2",
    "k1_uniform",
    "velocity_product_sweep",
    "transport_commutator_sweep",
];

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn spectral_identities() -> Check {
    let g = Grid2D::periodic(256).map_err(err)?;
    let f = random_bandlimited(&g, 11, 40.0, 1.0).map_err(err)?;
    let scale = f.max_abs();
    let trip = f.to_spectral().to_real().max_abs_diff(&f).map_err(err)? / scale;
    ensure(trip <= 1e-12, format!("fft round trip {trip:e}"))?;

    let direct: f64 = f.values().iter().map(|v| v * v).sum::<f64>() * g.cell_area();
    let parseval = (sobolev_norm(&f, 0.0).powi(2) - direct).abs() / direct;
    ensure(parseval <= 1e-10, format!("parseval {parseval:e}"))?;

    let mut inverse = 0.0f64;
    for s in [0.5, 1.5, 3.0] {
        let b = bessel_potential(&bessel_potential(&f, s).map_err(err)?, -s).map_err(err)?;
        let l =
            fractional_laplacian(&fractional_laplacian(&f, s).map_err(err)?, -s).map_err(err)?;
        inverse = inverse
            .max(b.max_abs_diff(&f).map_err(err)? / scale)
            .max(l.max_abs_diff(&f).map_err(err)? / scale);
    }
    ensure(inverse <= 1e-10, format!("inverse {inverse:e}"))?;

    let mut div = 0.0f64;
    for i in 0..=5 {
        let (u1, u2) = biot_savart(&f, 0.1 * i as f64).map_err(err)?;
        let d = divergence(&u1, &u2).map_err(err)?;
        div = div.max(d.max_abs() / u1.max_abs().max(u2.max_abs()));
    }
    ensure(div <= 1e-12, format!("divergence {div:e}"))?;
    Ok(format!(
        "round trip {trip:.1e}, parseval {parseval:.1e}, inverse {inverse:.1e}, div {div:.1e}"
    ))
}

fn littlewood_paley() -> Check {
    let g = Grid2D::periodic(256).map_err(err)?;
    let p = build_partition(&g).map_err(err)?;
    let mut unity = 0.0f64;
    for i in 0..g.len() {
        let mut s = 0.0;
        for q in -1..=p.j_max() {
            s += p.weights(q).map_err(err)?[i];
        }
        unity = unity.max((s - 1.0).abs());
    }
    ensure(unity <= 1e-10, format!("partition {unity:e}"))?;

    let f = random_bandlimited(&g, 5, 60.0, 1.0).map_err(err)?;
    let lp = decompose(&f, &p).map_err(err)?;
    let mut sum = lp.block(-1).clone();
    for b in lp.blocks.iter().skip(1) {
        sum = sum.add(b).map_err(err)?;
    }
    let recon = sum.max_abs_diff(&f).map_err(err)? / f.max_abs();
    ensure(recon <= 1e-10, format!("reconstruction {recon:e}"))?;
    let mut cross = 0.0f64;
    for a in -1..=p.j_max() {
        let da = lp_block(lp.block(a), &p, a).map_err(err)?;
        for b in (a + 2)..=p.j_max() {
            cross = cross.max(lp_block(&da, &p, b).map_err(err)?.max_abs() / f.max_abs());
        }
    }
    ensure(cross <= 1e-12, format!("separated blocks {cross:e}"))?;

    let mut bony = 0.0f64;
    for i in 0..50 {
        let u = random_bandlimited(&g, 1000 + 2 * i, 40.0, 1.0).map_err(err)?;
        let v = random_bandlimited(&g, 1001 + 2 * i, 40.0, 1.0).map_err(err)?;
        let parts = bony_decompose(&u, &v, &p).map_err(err)?;
        let exact = dealiased_product(&u, &v).map_err(err)?;
        bony = bony.max(parts.sum().max_abs_diff(&exact).map_err(err)? / exact.max_abs());
    }
    ensure(bony <= 1e-9, format!("bony {bony:e}"))?;

    let idx = BesovIndex::new(0.0, 2.0, 2.0).map_err(err)?;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for seed in 0..10 {
        let h = random_bandlimited(&g, seed, 60.0, 1.0).map_err(err)?;
        let r = besov_norm(&h, &p, idx).map_err(err)? / lp_norm(&h, 2.0).map_err(err)?;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    ensure(lo >= 0.5 && hi <= 2.0, format!("B0_22/L2 in [{lo}, {hi}]"))?;
    Ok(format!(
        "unity {unity:.1e}, recon {recon:.1e}, bony {bony:.1e}, B0_22/L2 in [{lo:.3}, {hi:.3}]"
    ))
}

fn two_mode(g: &Grid2D) -> RealField {
    RealField::from_fn(g, |x, y| {
        x.cos() + 0.5 * (2.0 * y).cos() + 0.3 * (x + y).sin()
    })
}

fn solver_conservation() -> Check {
    let g = Grid2D::periodic(256).map_err(err)?;
    let w = two_mode(&g);
    let (mut l1, mut l2) = (0.0f64, 0.0f64);
    for alpha in [0.0, 0.25, 0.5] {
        let cfg = SolverConfig {
            alpha,
            n: 256,
            t_end: 1.0,
            ..SolverConfig::default()
        };
        let out = run(&cfg, &w).map_err(|e| e.error.to_string())?;
        l1 = l1.max(out.diagnostics.relative_drift(|r| r.l1));
        l2 = l2.max(out.diagnostics.relative_drift(|r| r.l2));
    }
    ensure(l2 < 1e-6, format!("L2 drift {l2:e}"))?;
    ensure(l1 < 1e-4, format!("L1 drift {l1:e}"))?;

    let shear = RealField::from_fn(&g, |x, _| x.cos());
    let cfg = SolverConfig {
        alpha: 0.5,
        n: 256,
        t_end: 1e6,
        max_steps: 1000,
        ..SolverConfig::default()
    };
    let mut sim = Simulation::new(&cfg, &shear).map_err(err)?;
    for _ in 0..1000 {
        let dt = sim.cfl_dt();
        sim.step(dt).map_err(err)?;
    }
    let steady = sim.state().omega.max_abs_diff(&shear).map_err(err)?;
    ensure(steady <= 1e-10, format!("steady drift {steady:e}"))?;

    let small = Grid2D::periodic(32).map_err(err)?;
    let w = two_mode(&small);
    let at = |dt: f64| -> Result<RealField, String> {
        let c = SolverConfig {
            alpha: 0.25,
            n: 32,
            t_end: 0.5,
            fixed_dt: Some(dt),
            ..SolverConfig::default()
        };
        Ok(run(&c, &w)
            .map_err(|e| e.error.to_string())?
            .final_state
            .omega)
    };
    let reference = at(0.5 / 640.0)?;
    let mut pts = Vec::new();
    for k in [10.0, 20.0, 40.0, 80.0] {
        let dt: f64 = 0.5 / k;
        pts.push((dt.ln(), at(dt)?.max_abs_diff(&reference).map_err(err)?.ln()));
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / 4.0;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / 4.0;
    let order = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    ensure(
        (order - 4.0).abs() <= 0.3,
        format!("temporal order {order}"),
    )?;
    Ok(format!(
        "L2 drift {l2:.1e}, L1 drift {l1:.1e}, steady {steady:.1e}, order {order:.2}"
    ))
}

fn describe(study: &ConvergenceStudy) -> Check {
    let spreads: Vec<String> = study
        .checks
        .iter()
        .map(|c| {
            format!(
                "t={} spread {:.2}{}",
                c.t,
                c.ratio_spread,
                if c.monotone { "" } else { " non-monotone" }
            )
        })
        .collect();
    let control = study
        .control_max
        .map_or(String::new(), |c| format!(", control {c:.1e}"));
    let line = format!("{}{control}", spreads.join(", "));
    ensure(
        study.passed,
        format!("{line}; failures {:?}", study.failures),
    )?;
    Ok(line)
}

fn endpoint_study() -> Check {
    let cfg = ConvergenceConfig::default();
    ensure(
        cfg.alphas.contains(&0.5),
        "default sweep lacks a control member",
    )?;
    let study = convergence_study(&cfg).map_err(err)?;
    ensure(
        study.control_max.is_some_and(|c| c < 1e-12),
        format!("control {:?}", study.control_max),
    )?;
    describe(&study)
}

fn holder_study() -> Check {
    let cfg = ConvergenceConfig {
        alpha0: 0.25,
        alphas: vec![0.35, 0.30, 0.27, 0.26],
        ..ConvergenceConfig::default()
    };
    describe(&convergence_study(&cfg).map_err(err)?)
}

fn verify_suites(suites: Vec<Suite>) -> Check {
    let dir = tempfile::tempdir().map_err(err)?;
    let cfg = VerifyConfig {
        suites,
        ..VerifyConfig::default()
    };
    let out = verify_command(&cfg, dir.path()).map_err(err)?;
    let mut parts = Vec::new();
    if let Some(map) = out.summary["suites"].as_object() {
        for (name, s) in map {
            let ok = s["passed"].as_bool().unwrap_or(false);
            let reports: Vec<String> = s["reports"]
                .as_array()
                .into_iter()
                .flatten()
                .map(|r| {
                    let max = r["max_ratio"].as_f64().unwrap_or(f64::NAN);
                    let med = r["median_ratio"].as_f64().unwrap_or(f64::NAN);
                    let name = r["name"].as_str().unwrap_or("?");
                    if UNIFORMITY.contains(&name) {
                        format!("{name} max/median {:.2}", max / med)
                    } else {
                        format!("{name} max {max:.2e}")
                    }
                })
                .collect();
            parts.push(format!(
                "{name} {} [{}]",
                if ok { "ok" } else { "FAILED" },
                reports.join("; ")
            ));
        }
    }
    let line = parts.join(", ");
    ensure(out.passed, line.clone())?;
    Ok(line)
}

fn kernel_suite() -> Check {
    verify_suites(vec![Suite::Kernel])
}

fn ode_comparison() -> Check {
    let report = ode_battery(0, 100).map_err(err)?;
    ensure(
        report.passed && report.samples.len() == 100,
        format!("battery {:?}", report.notes),
    )?;
    let spec = OdeComparisonSpec {
        m: 1.0,
        t_end: 1.0,
        g: 1.0,
        forcing: Forcing::Constant { value: 1.0 },
        nu: None,
    };
    let (ts, ys) = integrate_comparison(&spec, f64::INFINITY).map_err(err)?;
    let r = spec.nu().sqrt();
    let closed = ts
        .iter()
        .zip(&ys)
        .map(|(t, y)| (y - r * (r * t).tan()).abs())
        .fold(0.0, f64::max);
    ensure(closed <= 1e-8, format!("closed form {closed:e}"))?;
    Ok(format!(
        "100 specs, max y/bound {:.3}, closed form {closed:.1e}",
        report.max_ratio
    ))
}

fn inequality_suites() -> Check {
    verify_suites(vec![
        Suite::Kpv,
        Suite::Hls,
        Suite::VelocityProduct,
        Suite::TransportCommutator,
        Suite::Embedding,
    ])
}

fn csv_bytes(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).map_err(err)? {
        let path = entry.map_err(err)?.path();
        if path.extension().is_some_and(|e| e == "csv") {
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            out.insert(name, std::fs::read(&path).map_err(err)?);
        }
    }
    Ok(out)
}

fn reproducibility() -> Check {
    let tmp = tempfile::tempdir().map_err(err)?;
    let root = tmp.path();
    let configs = [
        (
            "verify",
            r#"{"n": 64, "family_size": 6, "kmax": 10, "ode": {"count": 20}}"#,
        ),
        ("sweep", r#"{"n": 64, "t_end": 0.5, "times": [0.25, 0.5]}"#),
        (
            "run",
            r#"{"solver": {"n": 64, "alpha": 0.3, "t_end": 0.5}}"#,
        ),
    ];
    let mut compared = 0;
    for (cmd, body) in configs {
        let cfg = root.join(format!("{cmd}.json"));
        std::fs::write(&cfg, body).map_err(err)?;
        let mut outputs = Vec::new();
        for threads in ["1", "4"] {
            let dir = root.join(format!("{cmd}_{threads}"));
            let status = Command::new(env!("CARGO_BIN_EXE_gsqg"))
                .arg(cmd)
                .arg("--config")
                .arg(&cfg)
                .arg("--out")
                .arg(&dir)
                .args(["--threads", threads, "--seed", "17"])
                .output()
                .map_err(err)?
                .status;
            ensure(
                status.code() == Some(0),
                format!("{cmd} with {threads} threads: {status}"),
            )?;
            outputs.push(csv_bytes(&dir)?);
        }
        ensure(!outputs[0].is_empty(), format!("{cmd} wrote no CSV"))?;
        ensure(
            outputs[0] == outputs[1],
            format!("{cmd} CSVs differ between thread counts"),
        )?;
        compared += outputs[0].len();
    }
    Ok(format!(
        "{compared} CSV files identical with 1 and 4 threads"
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("spectral identities", 10, spectral_identities),
        ("littlewood-paley", 30, littlewood_paley),
        ("solver conservation", 300, solver_conservation),
        ("endpoint convergence", 900, endpoint_study),
        ("holder convergence", 900, holder_study),
        ("kernel uniformity", 600, kernel_suite),
        ("ode comparison", 30, ode_comparison),
        ("inequality suites", 600, inequality_suites),
        ("reproducibility", 600, reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, budget, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = result.and_then(|msg| {
            if elapsed <= Duration::from_secs(budget) {
                Ok(msg)
            } else {
                Err(format!("{msg}; over the {budget} s budget"))
            }
        });
        let (verdict, msg) = match result {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failed += 1;
                ("FAIL", m)
            }
        };
        println!(
            "criterion {} {verdict} {name} ({:.1} s): {msg}",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
