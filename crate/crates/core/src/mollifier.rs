//! Friedrichs mollifiers built on the bump `ρ(x) = exp(1/(x² − 1))`.
//!
//! Derivatives follow `ρ^{(k)}(x) = P_k(x) (x² − 1)^{−2k} ρ(x)` with
//! `P_{k+1} = P_k' (x² − 1)² − P_k (4k x (x² − 1) + 2x)`, whose integer
//! coefficients are generated exactly. Near the support boundary `P_k` is
//! evaluated in the variable `q = x² − 1` and the prefactor in log form.

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{Orbit, TimeWindow, Vector, C64};
use crate::numeric::tanh_sinh;

/// `∫_{−1}^{1} exp(1/(x² − 1)) dx`.
pub const BUMP_MASS: f64 = 0.443_993_816_168_079_4;
/// Highest derivative order with exact recurrence coefficients.
pub const MAX_KERNEL_ORDER: usize = 12;
/// Default ladder `l = 2, 4, …, 256`.
pub const DEFAULT_LADDER: [u32; 8] = [2, 4, 8, 16, 32, 64, 128, 256];
/// Sample points per window in the smoothness probe.
pub const PROBE_POINTS: usize = 256;
/// Relative level below which consecutive mollifications count as equal.
pub const PROBE_TOL: f64 = 1e-6;
/// Ratio of consecutive distances that counts as geometric convergence.
pub const PROBE_CONTRACTION: f64 = 0.75;
/// Multiple of `ε sup‖f‖ ∫|ϱ_l^{(k)}|` below which distances count as rounding.
pub const PROBE_NOISE: f64 = 64.0;

/// Normalization `C = 1 / ∫ρ`.
pub fn normalization() -> f64 {
    1.0 / BUMP_MASS
}

struct RecurrencePoly {
    /// Coefficients of `P_k` in `x`, ascending.
    in_x: Vec<f64>,
    /// Coefficients of `S_k` in `q` with `P_k(x) = x^{k mod 2} S_k(x² − 1)`.
    in_q: Vec<f64>,
}

fn exact_polys() -> Vec<Vec<i128>> {
    let mut polys: Vec<Vec<i128>> = vec![vec![1]];
    for k in 0..MAX_KERNEL_ORDER {
        let p = &polys[k];
        let deriv: Vec<i128> = p
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * i as i128)
            .collect();
        let mut next = vec![0i128; p.len() + 3];
        // P_k' (x⁴ − 2x² + 1)
        for (i, &c) in deriv.iter().enumerate() {
            next[i] += c;
            next[i + 2] -= 2 * c;
            next[i + 4] += c;
        }
        // − P_k (4k x³ + (2 − 4k) x)
        let k = k as i128;
        for (i, &c) in p.iter().enumerate() {
            next[i + 3] -= 4 * k * c;
            next[i + 1] -= (2 - 4 * k) * c;
        }
        while next.len() > 1 && *next.last().unwrap() == 0 {
            next.pop();
        }
        polys.push(next);
    }
    polys
}

fn to_q_form(p: &[i128], parity: usize) -> Vec<i128> {
    // r_m is the coefficient of x^{2m + parity}; S(q) = Σ_m r_m (q + 1)^m.
    let r: Vec<i128> = p.iter().skip(parity).step_by(2).copied().collect();
    let mut s = vec![0i128; r.len().max(1)];
    for (m, &rm) in r.iter().enumerate() {
        let mut binom: i128 = 1;
        for (j, sj) in s.iter_mut().enumerate().take(m + 1) {
            *sj += rm * binom;
            binom = binom * (m - j) as i128 / (j + 1) as i128;
        }
    }
    s
}

fn recurrence() -> &'static [RecurrencePoly] {
    static POLYS: OnceLock<Vec<RecurrencePoly>> = OnceLock::new();
    POLYS.get_or_init(|| {
        exact_polys()
            .iter()
            .enumerate()
            .map(|(k, p)| RecurrencePoly {
                in_x: p.iter().map(|&c| c as f64).collect(),
                in_q: to_q_form(p, k % 2).iter().map(|&c| c as f64).collect(),
            })
            .collect()
    })
}

/// Integer coefficients of `P_k`, ascending in `x`.
pub fn recurrence_coefficients(k: usize) -> Result<Vec<i128>> {
    check_order(k)?;
    Ok(exact_polys().swap_remove(k))
}

fn check_order(k: usize) -> Result<()> {
    if k > MAX_KERNEL_ORDER {
        Err(Error::config(
            "k",
            format!("kernel derivative order {k} exceeds {MAX_KERNEL_ORDER}"),
        ))
    } else {
        Ok(())
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// `ρ^{(k)}(x)` for the unnormalized bump; zero for `|x| ≥ 1`.
fn bump_unscaled(k: usize, x: f64) -> f64 {
    if !(x.abs() < 1.0) {
        return 0.0;
    }
    let poly = &recurrence()[k];
    let q = (x - 1.0) * (x + 1.0);
    if x * x < 0.5 {
        horner(&poly.in_x, x) * (1.0 / q).exp() / q.powi(2 * k as i32)
    } else {
        let odd = if k % 2 == 1 { x } else { 1.0 };
        let log_prefactor = 1.0 / q - 2.0 * k as f64 * (-q).ln();
        odd * horner(&poly.in_q, q) * log_prefactor.exp()
    }
}

/// `ϱ_l^{(k)}(x)` with `ϱ_l(x) = C·l·ρ(l·x)`.
pub fn bump_deriv(l: u32, k: usize, x: f64) -> Result<f64> {
    check_order(k)?;
    if l == 0 {
        return Err(Error::config("l", "mollifier index must be positive"));
    }
    let lf = l as f64;
    Ok(normalization() * lf.powi(k as i32 + 1) * bump_unscaled(k, lf * x))
}

/// Tanh-sinh step on `(−1, 1)` for kernel order `k`.
pub fn quadrature_step(k: usize) -> f64 {
    match k {
        0..=3 => 1.0 / 64.0,
        4..=7 => 1.0 / 128.0,
        _ => 1.0 / 256.0,
    }
}

/// Quadrature nodes `s_i ∈ (−1/l, 1/l)` and weights `w_i·ϱ_l^{(k)}(s_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MollifierFamily {
    pub l: u32,
    pub k: usize,
    pub normalization: f64,
    pub nodes: Vec<(f64, f64)>,
}

impl MollifierFamily {
    pub fn new(l: u32, k: usize) -> Result<Self> {
        check_order(k)?;
        if l == 0 {
            return Err(Error::config("l", "mollifier index must be positive"));
        }
        let lf = l as f64;
        let c = normalization();
        let scale = c * lf.powi(k as i32);
        let nodes = tanh_sinh(quadrature_step(k))
            .into_iter()
            .map(|(x, w)| (x / lf, w * scale * bump_unscaled(k, x)))
            .filter(|(_, w)| *w != 0.0)
            .collect();
        Ok(MollifierFamily {
            l,
            k,
            normalization: c,
            nodes,
        })
    }

    /// `Σ_i w_i ϱ_l^{(k)}(s_i)`, the discrete kernel mass.
    pub fn mass(&self) -> f64 {
        self.nodes.iter().map(|(_, w)| w).sum()
    }

    /// `Σ_i w_i |ϱ_l^{(k)}(s_i)|`.
    pub fn abs_mass(&self) -> f64 {
        self.nodes.iter().map(|(_, w)| w.abs()).sum()
    }

    /// `(f ∗ ϱ_l^{(k)})(t) = ∫ f(t − s) ϱ_l^{(k)}(s) ds`, `f` extended by zero.
    pub fn apply(&self, f: &Orbit, t: f64) -> Vector {
        let mut acc = Vector::zeros(f.dim());
        for &(s, w) in &self.nodes {
            acc.axpy(
                C64::new(w, 0.0),
                &f.eval_extended(t - s),
                C64::new(1.0, 0.0),
            );
        }
        acc
    }
}

/// `(f ∗ ϱ_l^{(k)})(t)`.
pub fn mollify_deriv(f: &Orbit, l: u32, k: usize, t: f64) -> Result<Vector> {
    Ok(MollifierFamily::new(l, k)?.apply(f, t))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderReport {
    pub k: usize,
    /// `(l, l', sup_t ‖f∗ϱ_l^{(k)} − f∗ϱ_{l'}^{(k)}‖)` for consecutive ladder pairs.
    #[serde(with = "crate::kernel::extfloat::triples")]
    pub distances: Vec<(u32, u32, f64)>,
    /// `sup_t ‖f∗ϱ_l^{(k)}‖` at the finest ladder index.
    #[serde(with = "crate::kernel::extfloat::single")]
    pub scale: f64,
    /// Rounding level `64 ε sup‖f‖ max_l ∫|ϱ_l^{(k)}|` of the quadrature.
    #[serde(with = "crate::kernel::extfloat::single")]
    pub noise_floor: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessReport {
    pub window: TimeWindow,
    pub ladder: Vec<u32>,
    pub orders: Vec<OrderReport>,
    /// Largest `k` such that every order `≤ k` converged.
    pub smooth_to: Option<usize>,
}

impl SmoothnessReport {
    pub fn is_smooth_to(&self, k: usize) -> bool {
        self.smooth_to.is_some_and(|s| s >= k)
    }
}

fn converged(distances: &[f64], scale: f64, noise_floor: f64) -> bool {
    if distances.iter().any(|d| !d.is_finite()) {
        return false;
    }
    let Some(&last) = distances.last() else {
        return false;
    };
    if last <= PROBE_TOL * scale || last <= noise_floor {
        return true;
    }
    let n = distances.len();
    n >= 3
        && distances[n - 2] <= PROBE_CONTRACTION * distances[n - 3]
        && last <= PROBE_CONTRACTION * distances[n - 2]
}

/// Uniform Cauchy behaviour of `f ∗ ϱ_l^{(k)}` on a compact window, `k ≤ max_order`.
pub fn smoothness_probe(
    f: &Orbit,
    window: &TimeWindow,
    max_order: usize,
    ladder: &[u32],
) -> Result<SmoothnessReport> {
    smoothness_probe_with(f, window, max_order, ladder, PROBE_POINTS)
}

/// [`smoothness_probe`] on `points` window midpoints.
pub fn smoothness_probe_with(
    f: &Orbit,
    window: &TimeWindow,
    max_order: usize,
    ladder: &[u32],
    points: usize,
) -> Result<SmoothnessReport> {
    let Some(hi) = window.hi() else {
        return Err(Error::config(
            "window.hi",
            "the smoothness probe needs a compact window",
        ));
    };
    check_order(max_order)?;
    if ladder.len() < 2 {
        return Err(Error::config(
            "ladder",
            "need at least two mollifier indices",
        ));
    }
    if ladder.windows(2).any(|w| w[1] <= w[0]) || ladder[0] == 0 {
        return Err(Error::config(
            "ladder",
            "indices must be positive and strictly increasing",
        ));
    }
    let lo = window.lo();
    if points == 0 {
        return Err(Error::config(
            "points",
            "at least one probe point is needed",
        ));
    }
    let times: Vec<f64> = (0..points)
        .map(|i| lo + (hi - lo) * (i as f64 + 0.5) / points as f64)
        .collect();
    let reach = 1.0 / ladder[0] as f64;
    let f_scale = times
        .par_iter()
        .map(|&t| {
            [t - reach, t, t + reach]
                .iter()
                .map(|&u| f.norm_of(&f.eval_extended(u)))
                .fold(0.0, nan_max)
        })
        .reduce(|| 0.0, nan_max);
    let orders = (0..=max_order)
        .into_par_iter()
        .map(|k| -> Result<OrderReport> {
            let mut abs_mass: f64 = 0.0;
            let values: Vec<Vec<Vector>> = ladder
                .iter()
                .map(|&l| {
                    let fam = MollifierFamily::new(l, k)?;
                    abs_mass = abs_mass.max(fam.abs_mass());
                    Ok(times.par_iter().map(|&t| fam.apply(f, t)).collect())
                })
                .collect::<Result<_>>()?;
            let noise_floor = PROBE_NOISE * f64::EPSILON * f_scale * abs_mass;
            let distances: Vec<(u32, u32, f64)> = ladder
                .windows(2)
                .zip(values.windows(2))
                .map(|(ls, vs)| {
                    let d = vs[0]
                        .iter()
                        .zip(&vs[1])
                        .map(|(a, b)| f.norm_of(&(a - b)))
                        .fold(0.0, nan_max);
                    (ls[0], ls[1], d)
                })
                .collect();
            let scale = values
                .last()
                .unwrap()
                .iter()
                .map(|v| f.norm_of(v))
                .fold(0.0, nan_max);
            let ds: Vec<f64> = distances.iter().map(|d| d.2).collect();
            Ok(OrderReport {
                k,
                converged: converged(&ds, scale, noise_floor),
                distances,
                scale,
                noise_floor,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let smooth_to = orders
        .iter()
        .take_while(|o| o.converged)
        .last()
        .map(|o| o.k);
    Ok(SmoothnessReport {
        window: *window,
        ladder: ladder.to_vec(),
        orders,
        smooth_to,
    })
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}
