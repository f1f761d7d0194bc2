use gsqg::littlewood_paley::{
    besov_norm, bony_decompose, build_partition, decompose, lp_block, BesovIndex, DyadicPartition,
};
use gsqg::spectral::samples::random_bandlimited;
use gsqg::spectral::{dealiased_product, lp_norm, Grid2D, RealField};
use proptest::prelude::*;
use std::sync::OnceLock;

fn n256() -> &'static (Grid2D, DyadicPartition) {
    static CELL: OnceLock<(Grid2D, DyadicPartition)> = OnceLock::new();
    CELL.get_or_init(|| {
        let g = Grid2D::periodic(256).unwrap();
        let p = build_partition(&g).unwrap();
        (g, p)
    })
}

#[test]
fn partition_of_unity_on_every_mode() {
    let (g, p) = n256();
    let worst = (0..g.len())
        .map(|i| {
            let s: f64 = (-1..=p.j_max()).map(|q| p.weights(q).unwrap()[i]).sum();
            (s - 1.0).abs()
        })
        .fold(0.0, f64::max);
    assert!(worst <= 1e-10);
}

#[test]
fn blocks_reconstruct_and_separate() {
    let (_, p) = n256();
    let f = random_bandlimited(p.grid(), 5, 60.0, 1.0).unwrap();
    let lp = decompose(&f, p).unwrap();
    let sum = lp
        .blocks
        .iter()
        .skip(1)
        .fold(lp.block(-1).clone(), |a, b| a.add(b).unwrap());
    assert!(sum.max_abs_diff(&f).unwrap() <= 1e-10 * f.max_abs());
    for a in -1..=p.j_max() {
        let da = lp_block(lp.block(a), p, a).unwrap();
        for b in (a + 2)..=p.j_max() {
            let dab = lp_block(&da, p, b).unwrap();
            assert!(dab.max_abs() <= 1e-14 * f.max_abs(), "({a}, {b})");
        }
    }
}

#[test]
fn bony_identity_on_random_pairs() {
    let (g, p) = n256();
    for i in 0..50 {
        let u = random_bandlimited(g, 2 * i, 40.0, 1.0).unwrap();
        let v = random_bandlimited(g, 2 * i + 1, 40.0, 1.0).unwrap();
        let parts = bony_decompose(&u, &v, p).unwrap();
        let exact = dealiased_product(&u, &v).unwrap();
        assert!(
            parts.sum().max_abs_diff(&exact).unwrap() <= 1e-9 * exact.max_abs(),
            "pair {i}"
        );
    }
}

#[test]
fn b022_is_comparable_to_l2() {
    let (g, p) = n256();
    let idx = BesovIndex::new(0.0, 2.0, 2.0).unwrap();
    for seed in 0..10 {
        let f = random_bandlimited(g, seed, 60.0, 1.0).unwrap();
        let r = besov_norm(&f, p, idx).unwrap() / lp_norm(&f, 2.0).unwrap();
        assert!((0.5..=2.0).contains(&r), "{r}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn besov_norm_is_a_seminorm(seed in 0u64..500, c in -5.0f64..5.0, s in -1.0f64..3.0) {
        let g = Grid2D::periodic(64).unwrap();
        let p = build_partition(&g).unwrap();
        let idx = BesovIndex::new(s, 2.0, 1.0).unwrap();
        let f = random_bandlimited(&g, seed, 12.0, 1.0).unwrap();
        let h = random_bandlimited(&g, seed + 1000, 12.0, 1.0).unwrap();
        let nf = besov_norm(&f, &p, idx).unwrap();
        let nh = besov_norm(&h, &p, idx).unwrap();
        let scaled = besov_norm(&f.scaled(c), &p, idx).unwrap();
        prop_assert!((scaled - c.abs() * nf).abs() <= 1e-12 * nf.max(1e-300) * c.abs().max(1.0));
        let sum = besov_norm(&f.add(&h).unwrap(), &p, idx).unwrap();
        prop_assert!(sum <= (nf + nh) * (1.0 + 1e-12));
    }

    #[test]
    fn product_with_constant_is_all_low_high(seed in 0u64..500, c in -3.0f64..3.0) {
        let g = Grid2D::periodic(64).unwrap();
        let p = build_partition(&g).unwrap();
        let v = random_bandlimited(&g, seed, 12.0, 1.0).unwrap();
        let k = RealField::constant(&g, c);
        let parts = bony_decompose(&k, &v, &p).unwrap();
        prop_assert!(parts.sum().max_abs_diff(&v.scaled(c)).unwrap() <= 1e-10 * v.max_abs().max(1.0));
    }
}
