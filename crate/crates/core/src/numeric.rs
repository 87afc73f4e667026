//! Small numerical building blocks shared across modules.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

/// Pairwise (cascade) summation. The reduction tree depends only on the
/// length of the input, so results are reproducible.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        sxy += (xi - mx) * (yi - my);
        sxx += (xi - mx) * (xi - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Slope of `ln y` against `ln x`; points with non-positive coordinates are skipped.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let (lx, ly): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .unzip();
    if lx.len() < 2 {
        return None;
    }
    Some(ls_slope(&lx, &ly))
}

/// `ln k!` for small `k`, exact summation of logs.
pub fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|j| (j as f64).ln()).sum()
}

pub fn factorial(k: usize) -> f64 {
    (2..=k).map(|j| j as f64).product()
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for j in 0..k {
        acc = acc * (n - j) as f64 / (j + 1) as f64;
    }
    acc.round()
}

/// Radical-inverse Halton sequence with a Cranley–Patterson shift per axis.
///
/// Prefixes are nested: the first `n` points of a longer run equal a run of
/// length `n`.
#[derive(Debug, Clone)]
pub struct ShiftedHalton {
    bases: Vec<u64>,
    shifts: Vec<f64>,
}

const PRIMES: [u64; 24] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
];

impl ShiftedHalton {
    pub fn new(dim: usize, seed: u64) -> Self {
        use rand::{Rng, SeedableRng};
        assert!(dim <= PRIMES.len(), "Halton dimension capped at 24");
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        ShiftedHalton {
            bases: PRIMES[..dim].to_vec(),
            shifts: (0..dim).map(|_| rng.gen::<f64>()).collect(),
        }
    }

    /// Point `index` in `[0, 1)^dim`.
    pub fn point(&self, index: u64) -> Vec<f64> {
        self.bases
            .iter()
            .zip(&self.shifts)
            .map(|(&b, &shift)| {
                let mut f = 1.0;
                let mut r = 0.0;
                let mut i = index + 1;
                while i > 0 {
                    f /= b as f64;
                    r += f * (i % b) as f64;
                    i /= b;
                }
                (r + shift).fract()
            })
            .collect()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let degree = NonZeroUsize::new(n.max(1)).expect("nonzero");
    GaussLegendre::new(degree).as_node_weight_pairs().to_vec()
}

/// Tanh-sinh (double exponential) nodes and weights on `(-1, 1)` with step `h`.
///
/// Nodes whose weight underflows relative to the central weight are dropped.
/// Endpoint distances are computed directly so that nodes never round onto ±1.
pub fn tanh_sinh(h: f64) -> Vec<(f64, f64)> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut rule = Vec::new();
    let centre_weight = half_pi;
    let mut j: i64 = 0;
    loop {
        let tau = j as f64 * h;
        let u = half_pi * tau.sinh();
        let cosh_u = u.cosh();
        let w = h * half_pi * tau.cosh() / (cosh_u * cosh_u);
        // 1 - tanh(u) = 2 / (1 + e^{2u})
        let gap = 2.0 / (1.0 + (2.0 * u).exp());
        let x = 1.0 - gap;
        if w < 1e-300 || w < centre_weight * h * 1e-20 || gap == 0.0 || x >= 1.0 {
            break;
        }
        if j == 0 {
            rule.push((0.0, w));
        } else {
            rule.push((x, w));
            rule.push((-x, w));
        }
        j += 1;
    }
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

static GL32: OnceLock<Vec<(f64, f64)>> = OnceLock::new();

/// Cached 32-node Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre_32() -> &'static [(f64, f64)] {
    GL32.get_or_init(|| gauss_legendre(32))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_small_inputs() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64 * 0.5).collect();
        assert_eq!(pairwise_sum(&v), 249_750.0);
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (1..6).map(|i| (i as f64, (i as f64).powi(3))).collect();
        assert!((loglog_slope(&pts).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 2), 6.0);
        assert_eq!(binomial(24, 12), 2_704_156.0);
        assert_eq!(binomial(3, 5), 0.0);
    }

    #[test]
    fn halton_prefix_is_nested_and_in_unit_cube() {
        let h = ShiftedHalton::new(3, 7);
        for i in 0..200 {
            let p = h.point(i);
            assert!(p.iter().all(|&c| (0.0..1.0).contains(&c)));
            assert_eq!(p, h.point(i));
        }
    }

    #[test]
    fn gl_integrates_polynomials() {
        let rule = gauss_legendre(8);
        let s: f64 = rule.iter().map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn tanh_sinh_integrates_endpoint_flat_functions() {
        let rule = tanh_sinh(1.0 / 64.0);
        let s: f64 = rule.iter().map(|(x, w)| w * (1.0 - x * x).sqrt()).sum();
        assert!((s - std::f64::consts::FRAC_PI_2).abs() < 1e-13);
        assert!(rule.iter().all(|(x, _)| x.abs() < 1.0));
    }
}
