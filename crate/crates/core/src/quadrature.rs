//! Gauss–Legendre rules and composite panel helpers.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        for i in 0..order.div_ceil(2) {
            // Tricomi initial guess, refined by Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(order, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(order, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[order - 1 - i] = x;
            weights[i] = w;
            weights[order - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (c + h * x, h * w))
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Composite rule over consecutive panels `[breaks[i], breaks[i + 1]]`.
    pub fn composite(&self, breaks: &[f64]) -> Vec<(f64, f64)> {
        breaks
            .windows(2)
            .flat_map(|p| self.mapped(p[0], p[1]).collect::<Vec<_>>())
            .collect()
    }
}

/// Panel breakpoints on `[a, b]`: every interval between consecutive points of
/// `{a, b} ∪ cuts` is split uniformly into panels no wider than `width`.
pub fn uniform_breaks(a: f64, b: f64, width: f64, cuts: &[f64]) -> Vec<f64> {
    let mut fixed = vec![a, b];
    fixed.extend(cuts.iter().copied().filter(|&c| c > a && c < b));
    fixed.sort_by(f64::total_cmp);
    fixed.dedup();
    let mut out = vec![a];
    for w in fixed.windows(2) {
        let m = ((w[1] - w[0]) / width).ceil().max(1.0) as usize;
        let h = (w[1] - w[0]) / m as f64;
        for i in 1..m {
            out.push(w[0] + h * i as f64);
        }
        out.push(w[1]);
    }
    out
}

/// Breakpoints `a, a·ratio, a·ratio², …` stopping before the panel width
/// exceeds `width` or the point passes `b`; the last entry is returned as the
/// start of the uniform region.
pub fn geometric_breaks(a: f64, b: f64, ratio: f64, width: f64) -> Vec<f64> {
    let mut out = vec![a];
    let mut r = a;
    while r * ratio < b && r * (ratio - 1.0) <= width {
        r *= ratio;
        out.push(r);
    }
    out
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let gl = GaussLegendre::new(8);
        // degree 15 is exact for 8 nodes
        let v = gl.integrate(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-9);
        assert!((gl.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn odd_orders_have_center_node() {
        let gl = GaussLegendre::new(5);
        assert!(gl.nodes[2].abs() < 1e-15);
        assert!((gl.integrate(0.0, PI, f64::sin) - 2.0).abs() < 1e-6);
    }

    #[test]
    fn breakpoints_honor_cuts_and_width() {
        let b = uniform_breaks(0.0, 3.0, 0.4, &[1.0, 2.5, 7.0]);
        assert!(b.contains(&1.0) && b.contains(&2.5));
        assert!(b
            .windows(2)
            .all(|w| w[1] > w[0] && w[1] - w[0] <= 0.4 + 1e-15));
        assert_eq!(*b.last().unwrap(), 3.0);

        let g = geometric_breaks(1e-6, 10.0, 1.2, 0.1);
        assert!(g.windows(2).all(|w| (w[1] / w[0] - 1.2).abs() < 1e-12));
        let last = *g.last().unwrap();
        assert!(last * 0.2 > 0.1 || last * 1.2 >= 10.0);

        let gl = GaussLegendre::new(8);
        let v: f64 = gl
            .composite(&uniform_breaks(0.0, PI, 0.3, &[]))
            .iter()
            .map(|(x, w)| w * x.sin())
            .sum();
        assert!((v - 2.0).abs() < 1e-14);
    }
}
