use gsqg::solver::{
    load_snapshot, rhs, run, save_snapshot, step_rk4, Dealias, Simulation, SolverConfig,
    SolverState,
};
use gsqg::spectral::{Grid2D, RealField};
use gsqg::Error;
use proptest::prelude::*;

fn grid(n: usize) -> Grid2D {
    Grid2D::periodic(n).unwrap()
}

fn two_mode(n: usize) -> RealField {
    RealField::from_fn(&grid(n), |x, y| {
        x.cos() + 0.5 * (2.0 * y).cos() + 0.3 * (x + y).sin()
    })
}

fn cfg(n: usize, alpha: f64, t_end: f64) -> SolverConfig {
    SolverConfig {
        n,
        alpha,
        t_end,
        sobolev: vec![1.0],
        ..SolverConfig::default()
    }
}

fn rel_l2(a: &RealField, b: &RealField) -> f64 {
    let d: f64 = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).powi(2))
        .sum();
    let s: f64 = b.values().iter().map(|y| y * y).sum();
    (d / s).sqrt()
}

/// Every other point of a `2n` field.
fn coarsen(f: &RealField) -> RealField {
    let m = f.grid().n();
    let g = grid(m / 2);
    let v = (0..g.len())
        .map(|i| f.values()[2 * (i / g.n()) * m + 2 * (i % g.n())])
        .collect();
    RealField::from_values(&g, v).unwrap()
}

#[test]
fn rhs_matches_finite_difference_product() {
    let n = 32;
    let w = RealField::from_fn(&grid(n), |x, y| x.cos() + (2.0 * y).cos());
    let r = rhs(&w, &cfg(n, 0.0, 1.0)).unwrap();
    // α = 0: ψ = cos x₁ + cos(2x₂)/4, u = (−∂₂ψ, ∂₁ψ).
    let omega = |x: f64, y: f64| x.cos() + (2.0 * y).cos();
    let h = 1e-4;
    let g = grid(n);
    let mut worst: f64 = 0.0;
    for (i, &got) in r.values().iter().enumerate() {
        let (x, y) = (g.coordinate(i % n), g.coordinate(i / n));
        let u = [0.5 * (2.0 * y).sin(), -x.sin()];
        let dx = (omega(x + h, y) - omega(x - h, y)) / (2.0 * h);
        let dy = (omega(x, y + h) - omega(x, y - h)) / (2.0 * h);
        worst = worst.max((got + u[0] * dx + u[1] * dy).abs());
    }
    assert!(worst < 1e-6, "max deviation {worst:e}");
}

#[test]
fn steady_shear_is_fixed_for_many_steps() {
    let w = RealField::from_fn(&grid(64), |x, _| x.cos());
    let c = SolverConfig {
        max_steps: 100,
        t_end: 1e3,
        ..cfg(64, 0.4, 1e3)
    };
    let mut sim = Simulation::new(&c, &w).unwrap();
    for _ in 0..100 {
        let dt = sim.cfl_dt();
        sim.step(dt).unwrap();
    }
    assert!(sim.state().omega.max_abs_diff(&w).unwrap() < 1e-13);
    let out = run(&cfg(64, 0.4, 1.0), &w).unwrap();
    assert!(out.final_state.omega.max_abs_diff(&w).unwrap() < 1e-10);
}

#[test]
fn rk4_is_fourth_order_in_time() {
    let n = 32;
    let w = two_mode(n);
    let at = |dt: f64| {
        let c = SolverConfig {
            fixed_dt: Some(dt),
            ..cfg(n, 0.25, 0.5)
        };
        run(&c, &w).unwrap().final_state.omega
    };
    let reference = at(0.5 / 640.0);
    let dts: [f64; 4] = [0.5 / 10.0, 0.5 / 20.0, 0.5 / 40.0, 0.5 / 80.0];
    let pts: Vec<(f64, f64)> = dts
        .iter()
        .map(|&dt| (dt.ln(), at(dt).max_abs_diff(&reference).unwrap().ln()))
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope - 4.0).abs() < 0.3, "slope {slope}");
}

#[test]
fn lp_norms_are_conserved_and_improve_with_resolution() {
    let drift = |n: usize| {
        let out = run(&cfg(n, 0.25, 1.0), &two_mode(n)).unwrap();
        let d = &out.diagnostics;
        assert!(d.max_divergence() < 1e-12);
        assert!(d.records().iter().all(|r| r.is_finite()));
        [
            d.relative_drift(|r| r.l1),
            d.relative_drift(|r| r.l2),
            d.relative_drift(|r| r.l4),
        ]
    };
    let coarse = drift(64);
    let fine = drift(256);
    assert!(fine[1] < 1e-6, "L2 drift {:e}", fine[1]);
    for p in 0..3 {
        assert!(
            fine[p] < coarse[p],
            "p index {p}: {:e} vs {:e}",
            fine[p],
            coarse[p]
        );
    }
}

#[test]
fn euler_resolution_self_convergence() {
    let at = |n: usize| {
        let c = SolverConfig {
            fixed_dt: Some(0.01),
            ..cfg(n, 0.0, 1.0)
        };
        run(&c, &two_mode(n)).unwrap().final_state.omega
    };
    let fine = coarsen(&at(256));
    let coarse = at(128);
    let d = coarse.sub(&fine).unwrap();
    let l2 = gsqg::spectral::lp_norm(&d, 2.0).unwrap();
    assert!(l2 < 1e-6, "{l2:e}");
}

#[test]
fn time_reversal_returns_initial_data() {
    let n = 256;
    let w = two_mode(n);
    let c = cfg(n, 0.3, 0.5);
    let forward = run(&c, &w).unwrap().final_state;
    let mut back = Simulation::reversed(&c, &forward.omega).unwrap();
    back.advance_to(0.5).unwrap();
    let err = rel_l2(&back.state().omega, &w);
    assert!(err < 1e-5, "{err:e}");
}

#[test]
fn snapshot_round_trip_through_files() {
    let out = run(
        &SolverConfig {
            snapshot_every: Some(0.25),
            ..cfg(32, 0.1, 0.5)
        },
        &two_mode(32),
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    for (i, s) in out.snapshots.iter().enumerate() {
        let p = dir.path().join(format!("s{i}.gsf"));
        save_snapshot(s, &p).unwrap();
        let back = load_snapshot(&p).unwrap();
        assert_eq!(back.omega, s.omega);
        assert_eq!(back.t, s.t);
    }
    std::fs::write(dir.path().join("bad"), b"PNG....").unwrap();
    assert!(matches!(
        load_snapshot(dir.path().join("bad")),
        Err(Error::NotGsf1)
    ));
}

#[test]
fn blow_up_keeps_partial_diagnostics() {
    let c = SolverConfig {
        fixed_dt: Some(5.0),
        dealias: Dealias::None,
        ..cfg(32, 0.5, 400.0)
    };
    let err = run(&c, &two_mode(32)).unwrap_err();
    assert!(matches!(err.error, Error::BlowUp { .. }), "{}", err.error);
    assert!(!err.diagnostics.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn single_wavevectors_are_steady(m1 in -5i32..=5, m2 in -5i32..=5, alpha in 0.0f64..=0.5, phase in 0.0f64..6.0) {
        prop_assume!(m1 != 0 || m2 != 0);
        let w = RealField::from_fn(&grid(32), |x, y| (m1 as f64 * x + m2 as f64 * y + phase).cos());
        let r = rhs(&w, &cfg(32, alpha, 1.0)).unwrap();
        prop_assert!(r.max_abs() < 1e-12);
    }

    #[test]
    fn steps_keep_the_mean_zero(a in -1.0f64..1.0, b in -1.0f64..1.0, alpha in 0.0f64..=0.5) {
        let w = RealField::from_fn(&grid(32), |x, y| a * x.sin() * (2.0 * y).cos() + b * (x - y).cos());
        let st = SolverState::initial(w, alpha);
        let c = cfg(32, alpha, 0.2);
        let next = step_rk4(&st, &c).unwrap();
        prop_assert!(next.omega.mean().abs() < 1e-14);
        prop_assert!(next.t > 0.0 && next.t <= 0.2);
    }
}
