use rayon::prelude::*;
use serde::Serialize;
use std::fmt::Write as _;

use super::convolve::convolve;
use super::fourier::{
    data_norm, fourier_k1, k1_small_regime_envelope, KernelPart, KernelSpectrum, RhoNodes,
    SpectralNorm,
};
use super::mesh::MeshSpec;
use super::test_function::TestFunction;
use super::{KernelSplitParams, KernelVariant};
use crate::error::{Error, Result};
use crate::report::{ratio, uniformity_proxy, InequalityReport};

/// Frequencies `|y|` that fall in every regime `|y| < β/2`, `β/2 ≤ |y| ≤ β`,
/// `|y| > β` for each `β ∈ {0.05, 0.10, …, 0.95}`.
pub const DEFAULT_Y_GRID: [f64; 8] = [0.01, 0.04, 0.1, 0.2, 0.3, 0.6, 1.0, 2.0];

/// Direction of the sampled `y` vectors.
const Y_ANGLE: f64 = 0.3;

/// One CSV row of a kernel sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelRecord {
    pub beta: f64,
    pub s: f64,
    pub family_id: String,
    pub lhs: f64,
    pub rhs_factor: f64,
    pub ratio: f64,
}

/// A β sweep: the report carries one sample per β (the family maximum), the
/// records every `(β, f)` pair.
#[derive(Debug, Clone)]
pub struct BoundSweep {
    pub report: InequalityReport,
    pub records: Vec<KernelRecord>,
}

/// CSV with columns `beta,s,family_id,lhs,rhs_factor,ratio`.
pub fn kernel_csv(records: &[KernelRecord]) -> String {
    let mut out = String::from("beta,s,family_id,lhs,rhs_factor,ratio\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{:e},{:e},{:e}",
            r.beta, r.s, r.family_id, r.lhs, r.rhs_factor, r.ratio
        );
    }
    out
}

/// `β/(1−β) + ((2^β − 1)/β) β^{−β}`.
pub fn t2_hs_factor(beta: f64) -> f64 {
    beta / (1.0 - beta) + (2f64.powf(beta) - 1.0) / beta * beta.powf(-beta)
}

fn check_betas(betas: &[f64], upper: f64) -> Result<()> {
    if betas.is_empty() {
        return Err(Error::Config("empty beta grid".into()));
    }
    for &b in betas {
        if !(b > 0.0 && b < upper) {
            return Err(Error::out_of_range("beta", b, "beta inside (0, 1)"));
        }
    }
    Ok(())
}

/// Runs `measure(β, spectrum, member index, power) -> (lhs, rhs_factor)`
/// over the grid and assembles the per-β family maxima.
fn sweep(
    name: &str,
    family: &[TestFunction],
    betas: &[f64],
    variant: KernelVariant,
    s: f64,
    measure: impl Fn(f64, &KernelSpectrum, usize, &[f64]) -> (f64, f64) + Sync,
) -> Result<BoundSweep> {
    let spec = MeshSpec::default();
    let rho_max = RhoNodes::family_rho_max(family);
    let per_beta = betas
        .par_iter()
        .map(|&beta| {
            let params = KernelSplitParams::new(beta, variant)?;
            let nodes = RhoNodes::new(rho_max, beta);
            let spectrum = KernelSpectrum::new(&params, &nodes, &spec)?;
            Ok(family
                .iter()
                .enumerate()
                .map(|(k, f)| {
                    let p = nodes.power(f);
                    let (lhs, rhs) = measure(beta, &spectrum, k, &p);
                    KernelRecord {
                        beta,
                        s,
                        family_id: f.id.clone(),
                        lhs,
                        rhs_factor: rhs,
                        ratio: ratio(lhs, rhs),
                    }
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = InequalityReport::new(name).with_param("s", s);
    for (beta, rows) in betas.iter().zip(&per_beta) {
        if let Some(worst) = rows.iter().max_by(|a, b| a.ratio.total_cmp(&b.ratio)) {
            report.push(format!("beta={beta}"), worst.lhs, worst.rhs_factor);
        } else {
            report.push(format!("beta={beta}"), 0.0, 0.0);
        }
    }
    Ok(BoundSweep {
        report,
        records: per_beta.into_iter().flatten().collect(),
    })
}

fn close_uniform(mut out: BoundSweep, extra_ok: bool) -> BoundSweep {
    let (max, med, ok) = uniformity_proxy(&out.report.ratios());
    out.report.note(format!(
        "uniformity proxy: max {max:.6e} vs 3 x median {:.6e}",
        3.0 * med
    ));
    let finite = out.report.all_finite();
    out.report = out.report.clone().finish(ok && finite && extra_ok);
    out
}

/// `‖T₁f‖_{H^s} / ‖f‖_{H^s}` across β.
pub fn verify_t1_bound(
    family: &[TestFunction],
    s: f64,
    betas: &[f64],
    variant: KernelVariant,
) -> Result<BoundSweep> {
    if !(s > 0.0) {
        return Err(Error::out_of_range("s", s, "s > 0"));
    }
    check_betas(betas, 1.0)?;
    let norm = SpectralNorm::Sobolev(s);
    let out = sweep("t1_hs", family, betas, variant, s, |_, sp, k, p| {
        let f = &family[k];
        (
            sp.operator_norm(f, p, KernelPart::Near, norm),
            data_norm(f, &sp.nodes, p, norm),
        )
    })?;
    Ok(close_uniform(out, true))
}

/// `‖T₂f‖_{L²} / (β (2 − 2β)^{−1/2} ‖f‖_{L¹})` across β, plus the trend
/// `‖T₂f‖_{L²} → 0` as `β → 0` (each step down in β may grow by at most 10%).
pub fn verify_t2_l2_bound(
    family: &[TestFunction],
    betas: &[f64],
    variant: KernelVariant,
) -> Result<BoundSweep> {
    check_betas(betas, 1.0)?;
    let l1: Vec<f64> = family.par_iter().map(TestFunction::l1_norm).collect();
    let norm = SpectralNorm::Sobolev(0.0);
    let mut out = sweep("t2_l2", family, betas, variant, 0.0, |beta, sp, k, p| {
        let factor = beta / (2.0 - 2.0 * beta).sqrt();
        (
            sp.operator_norm(&family[k], p, KernelPart::Far, norm),
            factor * l1[k],
        )
    })?;
    let mut trend_ok = true;
    let mut order: Vec<usize> = (0..betas.len()).collect();
    order.sort_by(|&a, &b| betas[a].total_cmp(&betas[b]));
    for k in 0..family.len() {
        let series: Vec<f64> = order
            .iter()
            .map(|&b| out.records[b * family.len() + k].lhs)
            .collect();
        if series.windows(2).any(|w| w[0] > 1.1 * w[1]) {
            trend_ok = false;
        }
    }
    out.report.note(format!(
        "decrease toward beta -> 0: {}",
        if trend_ok { "holds" } else { "violated" }
    ));
    Ok(close_uniform(out, trend_ok))
}

/// `‖T₂f‖_{Ḣ^s} / (factor(β) ‖f‖_{Ḣ^{s−1}})` across β.
pub fn verify_t2_hs_bound(
    family: &[TestFunction],
    s: f64,
    betas: &[f64],
    variant: KernelVariant,
) -> Result<BoundSweep> {
    if !(s >= 1.0) {
        return Err(Error::out_of_range("s", s, "s >= 1"));
    }
    check_betas(betas, 1.0)?;
    let out = sweep("t2_hs", family, betas, variant, s, |beta, sp, k, p| {
        let f = &family[k];
        let lhs = sp.operator_norm(f, p, KernelPart::Far, SpectralNorm::Homogeneous(s));
        let rhs =
            t2_hs_factor(beta) * data_norm(f, &sp.nodes, p, SpectralNorm::Homogeneous(s - 1.0));
        (lhs, rhs)
    })?;
    Ok(close_uniform(out, true))
}

/// `M(β) = max_y |K̂₁(y)|` across β, with the oddness check on the real part
/// and the linear envelope in the regime `|y| < β/2`.
pub fn verify_k1_uniform(
    betas: &[f64],
    ys: &[f64],
    variant: KernelVariant,
    spec: &MeshSpec,
) -> Result<BoundSweep> {
    check_betas(betas, 1.0)?;
    for &b in betas {
        let small = ys.iter().any(|&y| y < 0.5 * b);
        let mid = ys.iter().any(|&y| y >= 0.5 * b && y <= b);
        let large = ys.iter().any(|&y| y > b);
        if !(small && mid && large) {
            return Err(Error::Config(format!(
                "y grid does not reach all three regimes at beta = {b}"
            )));
        }
    }
    let (c, s) = (Y_ANGLE.cos(), Y_ANGLE.sin());
    let rows = betas
        .par_iter()
        .map(|&beta| {
            let params = KernelSplitParams::new(beta, variant)?;
            ys.iter()
                .map(|&y| {
                    let k = fourier_k1([y * c, y * s], &params, spec)?;
                    let abs = (k[0].norm_sqr() + k[1].norm_sqr()).sqrt();
                    let re = k[0].re.abs().max(k[1].re.abs());
                    Ok((beta, y, abs, re))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = InequalityReport::new("k1_uniform");
    let mut records = Vec::new();
    let mut odd_ok = true;
    let mut envelope_ok = true;
    for (beta, row) in betas.iter().zip(&rows) {
        let m = row.iter().map(|r| r.2).fold(0.0, f64::max);
        report.push(format!("beta={beta}"), m, 1.0);
        for &(b, y, abs, re) in row {
            odd_ok &= re < 1e-6 * abs + 1e-10;
            if y < 0.5 * b {
                envelope_ok &= abs <= k1_small_regime_envelope(b, y);
            }
            records.push(KernelRecord {
                beta: b,
                s: y,
                family_id: format!("y={y}"),
                lhs: abs,
                rhs_factor: 1.0,
                ratio: abs,
            });
        }
    }
    report.note(format!("real parts within tolerance: {odd_ok}"));
    report.note(format!("small-regime linear envelope: {envelope_ok}"));
    Ok(close_uniform(
        BoundSweep { report, records },
        odd_ok && envelope_ok,
    ))
}

/// `|T₁f + T₂f − Tf| / |Tf|` at each point, for every member and β.
/// Passes when every ratio is below `tol`.
pub fn verify_split_identity(
    family: &[TestFunction],
    betas: &[f64],
    points: &[[f64; 2]],
    variant: KernelVariant,
    tol: f64,
) -> Result<InequalityReport> {
    check_betas(betas, 1.0)?;
    let spec = MeshSpec::default();
    let per_beta = betas
        .par_iter()
        .map(|&beta| {
            let params = KernelSplitParams::new(beta, variant)?;
            family
                .iter()
                .map(|f| convolve(f, &params, points, &spec))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = InequalityReport::new("split_identity").with_param("tol", tol);
    for (beta, rows) in betas.iter().zip(&per_beta) {
        for (f, samples) in family.iter().zip(rows) {
            for s in samples {
                let defect = (s.t1[0] + s.t2[0] - s.t[0]).hypot(s.t1[1] + s.t2[1] - s.t[1]);
                let label = format!("beta={beta}:{}:({} {})", f.id, s.x[0], s.x[1]);
                report.push(label, defect, s.t[0].hypot(s.t[1]));
            }
        }
    }
    let ok = report.samples.iter().all(|s| s.ratio <= tol);
    Ok(report.finish(ok))
}

/// Relative change of every reported quantity when the mesh is refined
/// (grading excess and panels halved, 50% more angular nodes, finer
/// frequency nodes). Passes when every change is below `1e-4`.
pub fn quadrature_self_consistency(
    f: &TestFunction,
    betas: &[f64],
    points: &[[f64; 2]],
    ys: &[f64],
    variant: KernelVariant,
) -> Result<InequalityReport> {
    check_betas(betas, 1.0)?;
    let base = MeshSpec::default();
    let fine = base.refined();
    let fam = std::slice::from_ref(f);
    let rho_max = RhoNodes::family_rho_max(fam);
    let mut report = InequalityReport::new("quadrature_self_consistency");
    for &beta in betas {
        let params = KernelSplitParams::new(beta, variant)?;
        let coarse_nodes = RhoNodes::new(rho_max, beta);
        let width = (0.5 * std::f64::consts::PI * beta).min(0.5);
        let fine_nodes = RhoNodes::with_resolution(1.2 * rho_max, 2f64.sqrt(), 0.5 * width);
        let (pc, pf) = (coarse_nodes.power(f), fine_nodes.power(f));
        let a = convolve(f, &params, points, &base)?;
        let b = convolve(f, &params, points, &fine)?;
        let scale = a.iter().map(|s| s.t[0].hypot(s.t[1])).fold(0.0, f64::max);
        let diff = a
            .iter()
            .zip(&b)
            .flat_map(|(p, q)| {
                (0..2).flat_map(move |d| [p.t[d] - q.t[d], p.t1[d] - q.t1[d], p.t2[d] - q.t2[d]])
            })
            .fold(0.0f64, |m, v| m.max(v.abs()));
        report.push(format!("beta={beta}:convolution"), diff, scale);

        for &y in ys {
            let ka = fourier_k1([y, 0.0], &params, &base)?;
            let kb = fourier_k1([y, 0.0], &params, &fine)?;
            let d = ((ka[0] - kb[0]).norm_sqr() + (ka[1] - kb[1]).norm_sqr()).sqrt();
            let m = (ka[0].norm_sqr() + ka[1].norm_sqr()).sqrt();
            report.push(format!("beta={beta}:k1(y={y})"), d, m);
        }

        let sa = KernelSpectrum::new(&params, &coarse_nodes, &base)?;
        let sb = KernelSpectrum::new(&params, &fine_nodes, &fine)?;
        for (label, part, norm) in [
            ("t1_h1", KernelPart::Near, SpectralNorm::Sobolev(1.0)),
            ("t2_l2", KernelPart::Far, SpectralNorm::Sobolev(0.0)),
            ("t2_dot_h1", KernelPart::Far, SpectralNorm::Homogeneous(1.0)),
        ] {
            let x = sa.operator_norm(f, &pc, part, norm);
            let y = sb.operator_norm(f, &pf, part, norm);
            report.push(format!("beta={beta}:{label}"), (x - y).abs(), x.abs());
        }
    }
    let ok = report.samples.iter().all(|s| s.ratio < 1e-4);
    Ok(report.finish(ok))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hs_factor_limit() {
        assert!((t2_hs_factor(1e-9) - 2f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn zero_function_gives_zero_ratios() {
        let fam = vec![TestFunction::zero()];
        let out = verify_t1_bound(&fam, 1.0, &[0.3, 0.6], KernelVariant::Perpendicular).unwrap();
        assert!(out.report.ratios().iter().all(|&r| r == 0.0));
        let out = verify_t2_l2_bound(&fam, &[0.3], KernelVariant::Perpendicular).unwrap();
        assert_eq!(out.records[0].lhs, 0.0);
    }

    #[test]
    fn y_grid_must_span_regimes() {
        let r = verify_k1_uniform(
            &[0.5],
            &[1.0, 2.0],
            KernelVariant::Perpendicular,
            &MeshSpec::default(),
        );
        assert!(matches!(r, Err(Error::Config(_))));
    }
}
