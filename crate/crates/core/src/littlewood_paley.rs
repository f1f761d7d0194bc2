//! Dyadic partition of unity, Littlewood–Paley blocks, Besov norms and the
//! Bony paraproduct decomposition on the periodic grid.
//!
//! The low-pass profile `χ` equals 1 on `|ξ| ≤ 1` and vanishes for
//! `|ξ| ≥ 4/3`; the annulus profile is `φ(ξ) = χ(ξ/2) − χ(ξ)`, supported in
//! `3/4 ≤ |ξ| ≤ 8/3`. Block `Δ_{−1}` is `χ(D)` and `Δ_q = φ(2^{−q}D)` for
//! `q ≥ 0`. The top index `j_max` is the smallest one with
//! `2^{j_max+1} ≥ max |ξ|` on the grid, so the blocks sum to the identity on
//! every grid mode.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bump::SmoothCutoff;
use crate::error::{Error, Result};
use crate::report::{ratio, InequalityReport};
use crate::spectral::{
    ensure_same_grid, lp_norm_slice, spectral_sobolev_norm, Grid2D, Padding, RealField,
    SpectralField,
};

/// Relative tail energy above the resolved radius that Besov norms accept.
pub const RESOLUTION_TOL: f64 = 1e-8;

/// Relative block energy below which a block counts as empty when measuring
/// paraproduct localization.
pub const LOCALIZATION_FLOOR: f64 = 1e-20;

const CHI_INNER: f64 = 1.0;
const CHI_OUTER: f64 = 4.0 / 3.0;

#[derive(Debug, Clone)]
pub struct DyadicPartition {
    grid: Grid2D,
    j_max: i32,
    resolved_radius: f64,
    chi: SmoothCutoff,
    /// `weights[q + 1][idx]` is the block-`q` symbol at grid mode `idx`.
    weights: Vec<Vec<f64>>,
}

impl DyadicPartition {
    pub fn build(grid: &Grid2D) -> Result<Self> {
        if grid.n() < 16 {
            return Err(Error::InvalidGrid(
                "grid too small to host j_max >= 1".into(),
            ));
        }
        let chi = SmoothCutoff::new(CHI_INNER, CHI_OUTER);
        let kmax = grid.max_wavenumber();
        let mut j_max = 0i32;
        while 2f64.powi(j_max + 1) < kmax {
            j_max += 1;
        }
        if j_max < 1 {
            return Err(Error::InvalidGrid(
                "grid too small to host j_max >= 1".into(),
            ));
        }
        // Top annulus that still fits under the per-axis Nyquist wavenumber.
        let nyq = grid.nyquist_wavenumber();
        let j_safe = (nyq * 3.0 / 8.0).log2().floor();
        let resolved_radius = 2f64.powf(j_safe) * 8.0 / 3.0;

        let mags: Vec<f64> = (0..grid.len())
            .map(|i| grid.wavenumber_magnitude(i))
            .collect();
        let mut weights = Vec::with_capacity(j_max as usize + 2);
        weights.push(mags.iter().map(|&k| chi.eval(k)).collect());
        for q in 0..=j_max {
            let scale = 2f64.powi(-q);
            weights.push(
                mags.iter()
                    .map(|&k| {
                        let r = k * scale;
                        chi.eval(0.5 * r) - chi.eval(r)
                    })
                    .collect(),
            );
        }
        Ok(Self {
            grid: grid.clone(),
            j_max,
            resolved_radius,
            chi,
            weights,
        })
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    /// Radius `2^j·8/3` of the largest annulus below the Nyquist wavenumber;
    /// energy beyond it must be negligible for Besov norms to certify.
    pub fn resolved_radius(&self) -> f64 {
        self.resolved_radius
    }

    pub fn chi(&self, r: f64) -> f64 {
        self.chi.eval(r)
    }

    pub fn phi(&self, r: f64) -> f64 {
        self.chi.eval(0.5 * r) - self.chi.eval(r)
    }

    /// Symbol of `Δ_q` at radius `r`.
    pub fn block_symbol(&self, q: i32, r: f64) -> f64 {
        if q < 0 {
            self.chi(r)
        } else {
            self.phi(r * 2f64.powi(-q))
        }
    }

    /// Symbol of `Δ_q` on every grid mode.
    pub fn weights(&self, q: i32) -> Result<&[f64]> {
        self.check_index(q)?;
        Ok(&self.weights[(q + 1) as usize])
    }

    /// Closed radial support `[lo, hi]` of block `q`.
    pub fn annulus(q: i32) -> (f64, f64) {
        if q < 0 {
            (0.0, CHI_OUTER)
        } else {
            let s = 2f64.powi(q);
            (0.75 * s, 8.0 / 3.0 * s)
        }
    }

    pub fn max_cutoff_slope(&self) -> f64 {
        self.chi.max_slope()
    }

    fn check_index(&self, q: i32) -> Result<()> {
        if q < -1 || q > self.j_max {
            Err(Error::Config(format!(
                "block index {q} outside [-1, {}]",
                self.j_max
            )))
        } else {
            Ok(())
        }
    }

    fn block_coeffs(&self, hat: &SpectralField, q: i32) -> Vec<Complex64> {
        match q {
            q if q < -1 || q > self.j_max => vec![Complex64::default(); hat.coeffs().len()],
            q => hat
                .coeffs()
                .iter()
                .zip(&self.weights[(q + 1) as usize])
                .map(|(c, w)| c * w)
                .collect(),
        }
    }

    fn check_resolved(&self, hat: &SpectralField) -> Result<()> {
        let tail = hat.tail_fraction(self.resolved_radius);
        if tail > RESOLUTION_TOL {
            Err(Error::Unresolved {
                tail,
                limit: RESOLUTION_TOL,
            })
        } else {
            Ok(())
        }
    }
}

pub fn build_partition(grid: &Grid2D) -> Result<DyadicPartition> {
    DyadicPartition::build(grid)
}

/// `Δ_q f` for `−1 ≤ q ≤ j_max`.
pub fn lp_block(f: &RealField, part: &DyadicPartition, q: i32) -> Result<RealField> {
    ensure_same_grid(f.grid(), part.grid())?;
    part.check_index(q)?;
    let hat = f.to_spectral();
    Ok(SpectralField::from_raw(f.grid(), part.block_coeffs(&hat, q)).to_real())
}

/// `S_j f = Σ_{k=−1}^{j−1} Δ_k f`, equal to `χ(2^{−j}D)f` for `j ≥ 0`.
/// `S_j = 0` for `j ≤ −1`; `j` may be at most `j_max + 1` (the identity).
pub fn low_pass(f: &RealField, part: &DyadicPartition, j: i32) -> Result<RealField> {
    ensure_same_grid(f.grid(), part.grid())?;
    if j > part.j_max + 1 {
        return Err(Error::Config(format!(
            "low-pass index {j} exceeds j_max + 1 = {}",
            part.j_max + 1
        )));
    }
    if j <= -1 {
        return Ok(RealField::zeros(f.grid()));
    }
    let scale = 2f64.powi(-j);
    let hat = f.to_spectral();
    let grid = f.grid();
    let coeffs = hat
        .coeffs()
        .iter()
        .enumerate()
        .map(|(idx, c)| c * part.chi(grid.wavenumber_magnitude(idx) * scale))
        .collect();
    Ok(SpectralField::from_raw(grid, coeffs).to_real())
}

/// All blocks of a field together with its partial sums.
#[derive(Debug, Clone)]
pub struct LpBlocks {
    pub field: RealField,
    /// `blocks[q + 1] = Δ_q f` for `q = −1..=j_max`.
    pub blocks: Vec<RealField>,
    /// `partial_sums[j] = S_j f` for `j = 0..=j_max + 1`.
    pub partial_sums: Vec<RealField>,
}

impl LpBlocks {
    pub fn block(&self, q: i32) -> &RealField {
        &self.blocks[(q + 1) as usize]
    }
}

pub fn decompose(f: &RealField, part: &DyadicPartition) -> Result<LpBlocks> {
    ensure_same_grid(f.grid(), part.grid())?;
    let hat = f.to_spectral();
    let grid = f.grid();
    let mut blocks = Vec::new();
    let mut partial_sums = Vec::new();
    let mut running = vec![Complex64::default(); grid.len()];
    for q in -1..=part.j_max {
        let b = part.block_coeffs(&hat, q);
        for (acc, c) in running.iter_mut().zip(&b) {
            *acc += c;
        }
        blocks.push(SpectralField::from_raw(grid, b).to_real());
        partial_sums.push(SpectralField::from_raw(grid, running.clone()).to_real());
    }
    Ok(LpBlocks {
        field: f.clone(),
        blocks,
        partial_sums,
    })
}

/// Besov exponents `(s, p, q)` with `p, q ∈ [1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[cfg_attr(feature = "schema", derive(schemars::JsonSchema))]
pub struct BesovIndex {
    pub s: f64,
    pub p: f64,
    pub q: f64,
}

impl BesovIndex {
    pub fn new(s: f64, p: f64, q: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::out_of_range("p", p, "p >= 1"));
        }
        if !(q >= 1.0) {
            return Err(Error::out_of_range("q", q, "q >= 1"));
        }
        Ok(Self { s, p, q })
    }
}

/// `(Σ_{j≥−1} 2^{jsq} ‖Δ_j f‖^q_{L^p})^{1/q}`, or the supremum when `q = ∞`.
pub fn besov_norm(f: &RealField, part: &DyadicPartition, idx: BesovIndex) -> Result<f64> {
    let idx = BesovIndex::new(idx.s, idx.p, idx.q)?;
    ensure_same_grid(f.grid(), part.grid())?;
    let hat = f.to_spectral();
    part.check_resolved(&hat)?;
    let terms = weighted_block_norms(&hat, part, idx.s, idx.p);
    Ok(combine_lq(&terms, idx.q))
}

/// `2^{js}‖Δ_j f‖_{L^p}` for `j = −1..=j_max`.
pub(crate) fn weighted_block_norms(
    hat: &SpectralField,
    part: &DyadicPartition,
    s: f64,
    p: f64,
) -> Vec<f64> {
    let grid = hat.grid();
    (-1..=part.j_max)
        .map(|q| {
            let block = SpectralField::from_raw(grid, part.block_coeffs(hat, q)).to_real();
            2f64.powf(q as f64 * s) * lp_norm_slice(block.values(), grid.cell_area(), p)
        })
        .collect()
}

fn combine_lq(terms: &[f64], q: f64) -> f64 {
    if q.is_infinite() {
        terms.iter().copied().fold(0.0, f64::max)
    } else {
        terms.iter().map(|t| t.powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

/// `uv = T_u v + T_v u + R(u, v)` with
/// `T_u v = Σ_{j≥1} S_{j−1}u Δ_j v` and `R(u, v) = Σ_j Δ_j u (Δ_{j−1}+Δ_j+Δ_{j+1}) v`.
#[derive(Debug, Clone)]
pub struct BonyParts {
    pub t_uv: RealField,
    pub t_vu: RealField,
    pub remainder: RealField,
}

impl BonyParts {
    pub fn sum(&self) -> RealField {
        let g = self.t_uv.grid();
        let v = self
            .t_uv
            .values()
            .iter()
            .zip(self.t_vu.values())
            .zip(self.remainder.values())
            .map(|((a, b), c)| a + b + c)
            .collect();
        RealField::from_raw(g, v)
    }
}

struct PaddedBlocks {
    u: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

fn padded_blocks(
    u: &RealField,
    v: &RealField,
    part: &DyadicPartition,
    pad: &Padding,
) -> PaddedBlocks {
    let uh = u.to_spectral();
    let vh = v.to_spectral();
    let make = |hat: &SpectralField| -> Vec<Vec<f64>> {
        (-1..=part.j_max)
            .map(|q| pad.to_physical(&part.block_coeffs(hat, q)))
            .collect()
    };
    PaddedBlocks {
        u: make(&uh),
        v: make(&vh),
    }
}

fn check_pair(u: &RealField, v: &RealField, part: &DyadicPartition) -> Result<()> {
    ensure_same_grid(u.grid(), v.grid())?;
    ensure_same_grid(u.grid(), part.grid())?;
    part.check_resolved(&u.to_spectral())?;
    part.check_resolved(&v.to_spectral())
}

/// Paraproduct `Σ_{j≥1} S_{j−1}a Δ_j b` accumulated on the padded grid.
fn paraproduct_padded(a: &[Vec<f64>], b: &[Vec<f64>], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    let mut low = vec![0.0; len];
    // Block index offset: slot 0 holds Δ_{−1}.
    for j in 1..(b.len() as i32 - 1) {
        // S_{j−1} a = Σ_{k=−1}^{j−2} Δ_k a
        let k = (j - 2 + 1) as usize;
        for (l, x) in low.iter_mut().zip(&a[k]) {
            *l += x;
        }
        let bj = &b[(j + 1) as usize];
        for ((o, l), y) in out.iter_mut().zip(&low).zip(bj) {
            *o += l * y;
        }
    }
    out
}

pub fn bony_decompose(u: &RealField, v: &RealField, part: &DyadicPartition) -> Result<BonyParts> {
    check_pair(u, v, part)?;
    let grid = u.grid();
    let pad = Padding::new(grid);
    let blocks = padded_blocks(u, v, part, &pad);
    let len = blocks.u[0].len();
    let t_uv = paraproduct_padded(&blocks.u, &blocks.v, len);
    let t_vu = paraproduct_padded(&blocks.v, &blocks.u, len);
    let nb = blocks.u.len();
    let mut rem = vec![0.0; len];
    for j in 0..nb {
        for nb_j in j.saturating_sub(1)..(j + 2).min(nb) {
            for ((r, x), y) in rem.iter_mut().zip(&blocks.u[j]).zip(&blocks.v[nb_j]) {
                *r += x * y;
            }
        }
    }
    let back = |vals: &[f64]| SpectralField::from_raw(grid, pad.to_spectral(vals)).to_real();
    Ok(BonyParts {
        t_uv: back(&t_uv),
        t_vu: back(&t_vu),
        remainder: back(&rem),
    })
}

/// Largest `|q − j|` such that `Δ_q(S_{j−1}u Δ_j v)` or `Δ_q(S_{j−1}v Δ_j u)`
/// carries energy above [`LOCALIZATION_FLOOR`] relative to the term.
pub fn paraproduct_localization(
    u: &RealField,
    v: &RealField,
    part: &DyadicPartition,
) -> Result<i32> {
    check_pair(u, v, part)?;
    let grid = u.grid();
    let pad = Padding::new(grid);
    let blocks = padded_blocks(u, v, part, &pad);
    let len = blocks.u[0].len();
    let mut worst = 0i32;
    for (a, b) in [(&blocks.u, &blocks.v), (&blocks.v, &blocks.u)] {
        let mut low = vec![0.0; len];
        for j in 1..=part.j_max {
            for (l, x) in low.iter_mut().zip(&a[(j - 1) as usize]) {
                *l += x;
            }
            let term: Vec<f64> = low
                .iter()
                .zip(&b[(j + 1) as usize])
                .map(|(l, y)| l * y)
                .collect();
            let hat = SpectralField::from_raw(grid, pad.to_spectral(&term));
            let total = hat.energy_sum();
            if total == 0.0 {
                continue;
            }
            for q in -1..=part.j_max {
                let e: f64 = part
                    .block_coeffs(&hat, q)
                    .iter()
                    .map(|c| c.norm_sqr())
                    .sum();
                if e > LOCALIZATION_FLOOR * total {
                    worst = worst.max((q - j).abs());
                }
            }
        }
    }
    Ok(worst)
}

/// Bernstein-type check on a block supported in `2^q·[3/4, 8/3]` (or the
/// ball of radius 4/3 for `q = −1`).
///
/// The left side is `sup_{|β|=k} ‖∂^β f‖_{L^b}` and the reported right side is
/// the skeleton `λ^{k + 2(1/a − 1/b)} ‖f‖_{L^a}` with `λ = 2^q`. For
/// `a = b = 2`, `k = 1` the report passes iff `‖∇f‖/‖f‖ ∈ 2^q·[3/4, 8/3]`;
/// otherwise it passes when the ratio is finite.
pub fn bernstein_check(
    f_block: &RealField,
    q: i32,
    k: u32,
    a: f64,
    b: f64,
) -> Result<InequalityReport> {
    if !(a >= 1.0 && b >= a) {
        return Err(Error::ExponentMismatch(format!(
            "need 1 <= a <= b, got a = {a}, b = {b}"
        )));
    }
    let grid = f_block.grid();
    let hat = f_block.to_spectral();
    let (lo, hi) = DyadicPartition::annulus(q);
    let total = hat.energy_sum();
    let outside: f64 = hat
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            let r = grid.wavenumber_magnitude(*i);
            r < lo * (1.0 - 1e-12) || r > hi * (1.0 + 1e-12)
        })
        .map(|(_, c)| c.norm_sqr())
        .sum();
    if total > 0.0 && outside > 1e-20 * total {
        return Err(Error::SupportViolation(format!(
            "block energy fraction {:.3e} outside the annulus of index {q}",
            outside / total
        )));
    }
    let cell = grid.cell_area();
    let mut lhs = 0.0f64;
    for a1 in 0..=k {
        let a2 = k - a1;
        let coeffs: Vec<Complex64> = hat
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if k % 2 == 1 && grid.is_nyquist(i) {
                    return Complex64::default();
                }
                let (k1, k2) = grid.wavevector(i);
                let m = Complex64::new(0.0, k1).powu(a1) * Complex64::new(0.0, k2).powu(a2);
                m * c
            })
            .collect();
        let d = SpectralField::from_raw(grid, coeffs).to_real();
        lhs = lhs.max(lp_norm_slice(d.values(), cell, b));
    }
    let lambda = 2f64.powi(q);
    let inv = |p: f64| if p.is_infinite() { 0.0 } else { 1.0 / p };
    let rhs =
        lambda.powf(k as f64 + 2.0 * (inv(a) - inv(b))) * lp_norm_slice(f_block.values(), cell, a);

    let mut report = InequalityReport::new("bernstein")
        .with_param("q", q as f64)
        .with_param("k", k as f64)
        .with_param("a", a)
        .with_param("b", b);
    report.push(format!("q={q}"), lhs, rhs);
    let passed = if a == 2.0 && b == 2.0 && k == 1 {
        let grad = spectral_sobolev_gradient_ratio(&hat);
        report.note(format!("gradient ratio {grad:.12e}"));
        grad == 0.0 || (grad >= lo * (1.0 - 1e-12) && grad <= hi * (1.0 + 1e-12))
    } else {
        ratio(lhs, rhs).is_finite()
    };
    Ok(report.finish(passed))
}

/// `‖∇f‖_{L²} / ‖f‖_{L²}` by Plancherel; zero for `f = 0`.
fn spectral_sobolev_gradient_ratio(hat: &SpectralField) -> f64 {
    let grid = hat.grid();
    let (num, den) = hat
        .coeffs()
        .iter()
        .enumerate()
        .fold((0.0, 0.0), |(n, d), (i, c)| {
            let k = grid.wavenumber_magnitude(i);
            (n + k * k * c.norm_sqr(), d + c.norm_sqr())
        });
    if den == 0.0 {
        0.0
    } else {
        (num / den).sqrt()
    }
}

/// Ratios along `H^s ↪ B^{1+2α}_{2,1} ↪ H^{1+2α}`:
/// `‖f‖_{B^{1+2α}_{2,1}} / ‖f‖_{H^s}` and `‖f‖_{H^{1+2α}} / ‖f‖_{B^{1+2α}_{2,1}}`.
pub fn verify_besov_embedding(
    f: &RealField,
    s: f64,
    alpha: f64,
    part: &DyadicPartition,
) -> Result<InequalityReport> {
    if !(s > 2.0) {
        return Err(Error::out_of_range("s", s, "s > 2"));
    }
    if !(alpha < 0.5) {
        return Err(Error::out_of_range("alpha", alpha, "alpha < 1/2"));
    }
    ensure_same_grid(f.grid(), part.grid())?;
    let hat = f.to_spectral();
    part.check_resolved(&hat)?;
    let sb = 1.0 + 2.0 * alpha;
    let besov = combine_lq(&weighted_block_norms(&hat, part, sb, 2.0), 1.0);
    let hs = spectral_sobolev_norm(&hat, s);
    let h_low = spectral_sobolev_norm(&hat, sb);
    let mut report = InequalityReport::new("besov_embedding")
        .with_param("s", s)
        .with_param("alpha", alpha);
    report.push("besov_over_hs", besov, hs);
    report.push("h_over_besov", h_low, besov);
    let ok = report.all_finite();
    Ok(report.finish(ok))
}
