//! Order-k difference quotients
//! `D[f](h) = (Π h_j)^{-1} Σ_{J ⊆ [k]} (−1)^{k−|J|} f(t + h_J)`
//! in three realizations, Richardson derivative estimates and the
//! difference-quotient seminorm.
//!
//! The subset-sum and nested realizations share one table of function values
//! and combine it in double-double arithmetic, so they differ only by the
//! identity relating them and not by cancellation noise.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::kernel::{ExtRealVerdict, Orbit, Vector, VerdictPolicy, C64};
use crate::numeric::{binomial, gauss_legendre, ShiftedHalton};

/// Largest admissible order; the subset sum has `2^k` terms.
pub const MAX_ORDER: usize = 24;
/// Total tensor-quadrature node budget for the integral realization.
pub const INTEGRAL_NODE_BUDGET: usize = 1 << 20;
/// Nodes per axis of the integral realization for small orders.
pub const INTEGRAL_NODES: usize = 32;
/// Relative floor `|h_j| ≥ δ·2^{-20}` of the seminorm's step sampler.
pub const STEP_FLOOR: f64 = 1.0 / (1u64 << 20) as f64;
pub const DIFF_SEMINORM_LEVELS: usize = 5;
pub const DIFF_SEMINORM_SEED: u64 = 0x5eed_d1ff;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    SubsetSum,
    Nested,
    Integral,
}

/// Increments `h ∈ I_δ^k` at base time `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepBox {
    pub t: f64,
    pub delta: f64,
    pub h: Vec<f64>,
}

impl StepBox {
    pub fn new(t: f64, delta: f64, h: Vec<f64>) -> Result<Self> {
        if !t.is_finite() {
            return Err(Error::config("t", "base time must be finite"));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::config(
                "delta",
                format!("must be a finite positive real, got {delta}"),
            ));
        }
        check_order(h.len())?;
        for (j, &hj) in h.iter().enumerate() {
            if hj == 0.0 || !hj.is_finite() {
                return Err(Error::config(
                    format!("h[{j}]"),
                    "increments must be finite and nonzero",
                ));
            }
            if hj.abs() > delta {
                return Err(Error::config(
                    format!("h[{j}]"),
                    format!("|{hj}| exceeds delta = {delta}"),
                ));
            }
        }
        Ok(StepBox { t, delta, h })
    }

    /// `k` equal increments `h`, with `delta = |h|`.
    pub fn equal(t: f64, k: usize, h: f64) -> Result<Self> {
        Self::new(t, h.abs(), vec![h; k])
    }

    pub fn k(&self) -> usize {
        self.h.len()
    }

    /// `[t − kδ, t + kδ]`.
    pub fn reach(&self) -> (f64, f64) {
        let span = self.k() as f64 * self.delta;
        (self.t - span, self.t + span)
    }

    /// Smallest and largest of the points `t + h_J`.
    pub fn point_hull(&self) -> (f64, f64) {
        let neg: f64 = self.h.iter().filter(|h| **h < 0.0).sum();
        let pos: f64 = self.h.iter().filter(|h| **h > 0.0).sum();
        (self.t + neg, self.t + pos)
    }
}

fn check_order(k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::config("k", "order must be at least 1"));
    }
    if k > MAX_ORDER {
        return Err(Error::config(
            "k",
            format!("order {k} exceeds the cap {MAX_ORDER}"),
        ));
    }
    Ok(())
}

/// Double-double sum of the values, added in ascending order.
fn dd_sorted_sum(values: &mut [f64]) -> TwoFloat {
    values.sort_by(f64::total_cmp);
    values.iter().fold(TwoFloat::from(0.0), |acc, &v| acc + v)
}

/// `t + Σ_{j∈J} h_j` rounded once; depends on `h` only through the multiset `h_J`.
fn subset_point(t: f64, h: &[f64], mask: usize, scratch: &mut Vec<f64>) -> f64 {
    scratch.clear();
    scratch.extend(
        h.iter()
            .enumerate()
            .filter(|(j, _)| mask >> j & 1 == 1)
            .map(|(_, &v)| v),
    );
    let s = dd_sorted_sum(scratch) + t;
    s.hi()
}

/// `Π h_j` in double-double, multiplied in ascending order.
fn dd_product(h: &[f64]) -> TwoFloat {
    let mut sorted = h.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.iter().fold(TwoFloat::from(1.0), |acc, &v| acc * v)
}

/// Values `f(t + h_J)` for every mask `J`, flattened with stride `dim`.
fn value_table(f: &Orbit, b: &StepBox) -> Vec<C64> {
    let k = b.k();
    let dim = f.dim();
    let rows: Vec<Vector> = (0..1usize << k)
        .into_par_iter()
        .map_init(Vec::new, |scratch, mask| {
            f.eval(subset_point(b.t, &b.h, mask, scratch))
        })
        .collect();
    let mut flat = Vec::with_capacity(rows.len() * dim);
    for r in rows {
        debug_assert_eq!(r.len(), dim);
        flat.extend(r.iter().copied());
    }
    flat
}

fn parity_sign(k: usize, mask: usize) -> f64 {
    if (k - mask.count_ones() as usize).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn subset_sum_combine(table: &[C64], dim: usize, b: &StepBox) -> Vector {
    let k = b.k();
    let n = 1usize << k;
    let prod = dd_product(&b.h);
    let component = |c: usize, part: fn(&C64) -> f64| -> f64 {
        let mut terms: Vec<f64> = (0..n)
            .map(|m| parity_sign(k, m) * part(&table[m * dim + c]))
            .collect();
        (dd_sorted_sum(&mut terms) / prod).hi()
    };
    Vector::from_fn(dim, |c, _| {
        C64::new(component(c, |z| z.re), component(c, |z| z.im))
    })
}

fn nested_combine(table: &[C64], dim: usize, b: &StepBox) -> Vector {
    let k = b.k();
    let n = 1usize << k;
    let run = |c: usize, part: fn(&C64) -> f64| -> f64 {
        let mut g: Vec<TwoFloat> = (0..n)
            .map(|m| TwoFloat::from(part(&table[m * dim + c])))
            .collect();
        // D_{i+1}(t + h_J) = (D_i(t + h_J + h_i) − D_i(t + h_J)) / h_i, for J free of i.
        for (i, &hi) in b.h.iter().enumerate() {
            let bit = 1usize << i;
            for m in 0..n {
                if m & bit == 0 {
                    g[m] = (g[m | bit] - g[m]) / hi;
                }
            }
        }
        g[0].hi()
    };
    Vector::from_fn(dim, |c, _| C64::new(run(c, |z| z.re), run(c, |z| z.im)))
}

/// Nodes per axis of the tensor rule for order `k`.
pub fn integral_nodes_per_axis(k: usize) -> usize {
    if k <= 4 {
        return INTEGRAL_NODES;
    }
    let per_axis = (INTEGRAL_NODE_BUDGET as f64).powf(1.0 / k as f64).floor() as usize;
    per_axis.clamp(2, INTEGRAL_NODES)
}

/// `∫_{[0,1]^k} f^{(k)}(t + Σ_j h_j s_j) ds` by a tensor Gauss–Legendre rule.
fn integral_quotient(f: &Orbit, b: &StepBox) -> Result<Vector> {
    if !f.has_oracle() {
        return Err(Error::config(
            "strategy",
            "the integral realization needs a derivative oracle",
        ));
    }
    let k = b.k();
    let rule: Vec<(f64, f64)> = gauss_legendre(integral_nodes_per_axis(k))
        .into_iter()
        .map(|(x, w)| (0.5 * (x + 1.0), 0.5 * w))
        .collect();
    let m = rule.len();
    let dim = f.dim();
    let inner_count = m.pow(k as u32 - 1);
    // Parallel over the first axis; each slab is summed in a fixed order.
    let slabs: Vec<Vector> = (0..m)
        .into_par_iter()
        .map(|i0| {
            let (s0, w0) = rule[i0];
            let mut acc = Vector::zeros(dim);
            let mut idx = vec![0usize; k - 1];
            for _ in 0..inner_count {
                let mut point = b.t + b.h[0] * s0;
                let mut weight = w0;
                for (axis, &i) in idx.iter().enumerate() {
                    let (s, w) = rule[i];
                    point += b.h[axis + 1] * s;
                    weight *= w;
                }
                let v = f.derivative(k, point).expect("oracle checked");
                acc.axpy(C64::new(weight, 0.0), &v, C64::new(1.0, 0.0));
                for d in idx.iter_mut() {
                    *d += 1;
                    if *d < m {
                        break;
                    }
                    *d = 0;
                }
            }
            acc
        })
        .collect();
    Ok(slabs.into_iter().fold(Vector::zeros(dim), |a, b| a + b))
}

/// The order-`k` difference quotient of `f` on the box.
pub fn diff_quotient(f: &Orbit, b: &StepBox, strategy: Strategy) -> Result<Vector> {
    check_order(b.k())?;
    let (lo, _) = b.point_hull();
    if lo < f.domain_start() {
        return Err(Error::config(
            "h",
            format!(
                "point {lo} lies before the orbit domain start {}",
                f.domain_start()
            ),
        ));
    }
    match strategy {
        Strategy::Integral => integral_quotient(f, b),
        Strategy::SubsetSum => Ok(subset_sum_combine(&value_table(f, b), f.dim(), b)),
        Strategy::Nested => Ok(nested_combine(&value_table(f, b), f.dim(), b)),
    }
}

/// Both table-based realizations from one set of function values.
pub fn diff_quotient_pair(f: &Orbit, b: &StepBox) -> Result<(Vector, Vector)> {
    check_order(b.k())?;
    let (lo, _) = b.point_hull();
    if lo < f.domain_start() {
        return Err(Error::config(
            "h",
            format!("point {lo} lies before the orbit domain start"),
        ));
    }
    let table = value_table(f, b);
    Ok((
        subset_sum_combine(&table, f.dim(), b),
        nested_combine(&table, f.dim(), b),
    ))
}

/// `w_j = (−1)^{k−j} C(k, j)`, `j = 0..=k`.
pub fn equal_step_weights(k: usize) -> Vec<f64> {
    (0..=k)
        .map(|j| if (k - j).is_multiple_of(2) { 1.0 } else { -1.0 } * binomial(k, j))
        .collect()
}

/// Equal-step quotient `h^{-k} Σ_j w_j f(t + j·h)` on the binomial stencil.
///
/// Stencil points are formed exactly as the subset points of `(h, …, h)`.
pub fn stencil_quotient(f: &Orbit, t: f64, k: usize, h: f64) -> Result<Vector> {
    check_order(k)?;
    if h == 0.0 || !h.is_finite() {
        return Err(Error::config("h", "step must be finite and nonzero"));
    }
    let weights = equal_step_weights(k);
    let mut scratch = Vec::new();
    let values: Vec<Vector> = (0..=k)
        .map(|j| {
            f.eval(subset_point(
                t,
                &vec![h; k],
                (1usize << j) - 1,
                &mut scratch,
            ))
        })
        .collect();
    let prod = dd_product(&vec![h; k]);
    let dim = f.dim();
    let component = |c: usize, part: fn(&C64) -> f64| -> f64 {
        let sum = weights
            .iter()
            .zip(&values)
            .fold(TwoFloat::from(0.0), |acc, (&w, v)| {
                acc + TwoFloat::new_mul(w, part(&v[c]))
            });
        (sum / prod).hi()
    };
    Ok(Vector::from_fn(dim, |c, _| {
        C64::new(component(c, |z| z.re), component(c, |z| z.im))
    }))
}

/// Richardson-extrapolated derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeEstimate {
    pub value: Vector,
    /// Discrepancy of the accepted Neville entry against its neighbours,
    /// never below the rounding floor at its step.
    pub error: f64,
    /// `(step, discrepancy)` per level.
    pub trace: Vec<(f64, f64)>,
}

struct OneSided {
    value: Vector,
    error: f64,
    trace: Vec<(f64, f64)>,
    converged: bool,
}

fn one_sided(f: &Orbit, t: f64, k: usize, h0: f64, levels: usize) -> Result<OneSided> {
    let weights = equal_step_weights(k);
    let abs_weight: f64 = weights.iter().map(|w| w.abs()).sum();
    let mut prev_row: Vec<Vector> = Vec::new();
    let mut best: Option<(Vector, f64)> = None;
    let mut trace = Vec::with_capacity(levels);
    let mut diagonals: Vec<Vector> = Vec::new();
    let mut noise = Vec::with_capacity(levels);
    for i in 0..levels {
        let h = h0 / (1u64 << i) as f64;
        let d = stencil_quotient(f, t, k, h)?;
        let scale = (0..=k)
            .map(|j| f.value_norm(t + j as f64 * h))
            .fold(0.0, f64::max);
        noise.push(64.0 * f64::EPSILON * abs_weight * scale / h.abs().powi(k as i32));
        let mut row = vec![d];
        for m in 1..=i {
            let factor = (1u64 << m) as f64;
            let next = (&row[m - 1] * C64::new(factor, 0.0) - &prev_row[m - 1])
                / C64::new(factor - 1.0, 0.0);
            let err = f
                .norm_of(&(&next - &row[m - 1]))
                .max(f.norm_of(&(&next - &prev_row[m - 1])))
                .max(noise[i]);
            if best.as_ref().is_none_or(|(_, e)| err <= *e) {
                best = Some((next.clone(), err));
            }
            row.push(next);
        }
        let diag = row[i].clone();
        let disc = diagonals
            .last()
            .map_or(f64::INFINITY, |p: &Vector| f.norm_of(&(&diag - p)));
        trace.push((h, disc));
        diagonals.push(diag);
        prev_row = row;
    }
    let discs: Vec<f64> = trace.iter().skip(1).map(|(_, d)| *d).collect();
    let floor = noise.iter().cloned().fold(0.0, f64::max);
    let decreasing_once = discs.windows(2).any(|w| w[1] < w[0]);
    let at_noise = discs.iter().any(|&d| d <= floor);
    let converged = discs.iter().all(|d| d.is_finite()) && (decreasing_once || at_noise);
    let (value, error) = best.unwrap_or_else(|| (diagonals[0].clone(), f64::INFINITY));
    Ok(OneSided {
        value,
        error,
        trace,
        converged,
    })
}

/// `f^{(k)}(t)` from forward stencils at `h0, h0/2, …` and a Neville table
/// with ratio 2. When the window admits it, a backward stencil must agree.
pub fn derivative_estimate(
    f: &Orbit,
    t: f64,
    k: usize,
    h0: f64,
    levels: usize,
) -> Result<DerivativeEstimate> {
    check_order(k)?;
    if levels < 2 {
        return Err(Error::config("levels", "at least two levels are needed"));
    }
    if !(h0 > 0.0 && h0.is_finite()) {
        return Err(Error::config(
            "h0",
            format!("must be a finite positive step, got {h0}"),
        ));
    }
    if t < f.domain_start() {
        return Err(Error::config(
            "t",
            format!("{t} lies before the orbit domain start"),
        ));
    }
    let fwd = one_sided(f, t, k, h0, levels)?;
    if !fwd.converged {
        return Err(Error::inconclusive(
            format!("order-{k} derivative at t = {t}: discrepancies never decrease"),
            fwd.trace,
        ));
    }
    if t - k as f64 * h0 >= f.domain_start() {
        let bwd = one_sided(f, t, k, -h0, levels)?;
        let gap = f.norm_of(&(&fwd.value - &bwd.value));
        let scale = f.norm_of(&fwd.value).max(f.norm_of(&bwd.value));
        if !bwd.converged || gap > 8.0 * (fwd.error + bwd.error) + 1e-9 * scale {
            let mut trace = fwd.trace;
            trace.extend(bwd.trace.iter().map(|(h, d)| (*h, *d)));
            return Err(Error::inconclusive(
                format!("order-{k} derivative at t = {t}: one-sided limits disagree by {gap:e}"),
                trace,
            ));
        }
    }
    Ok(DerivativeEstimate {
        value: fwd.value,
        error: fwd.error,
        trace: fwd.trace,
    })
}

/// Default step-box size `min(1, (t − lo)/(k + 1))`.
pub fn default_delta(t: f64, lo: f64, k: usize) -> f64 {
    ((t - lo) / (k as f64 + 1.0)).min(1.0)
}

/// `sup_{h ∈ I_δ^k} ‖D[f](h)‖` over a shifted Halton sample.
pub fn diff_seminorm(
    f: &Orbit,
    t: f64,
    k: usize,
    delta: f64,
    samples: usize,
) -> Result<ExtRealVerdict> {
    diff_seminorm_with(
        f,
        t,
        k,
        delta,
        samples,
        DIFF_SEMINORM_LEVELS,
        DIFF_SEMINORM_SEED,
    )
}

/// [`diff_seminorm`] with explicit level count and sampler seed. Level `j`
/// uses the first `samples·2^j` points of one sequence.
pub fn diff_seminorm_with(
    f: &Orbit,
    t: f64,
    k: usize,
    delta: f64,
    samples: usize,
    levels: usize,
    seed: u64,
) -> Result<ExtRealVerdict> {
    check_order(k)?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::config(
            "delta",
            format!("must be a finite positive real, got {delta}"),
        ));
    }
    if samples == 0 || levels == 0 {
        return Err(Error::config(
            "samples",
            "sample count and levels must be positive",
        ));
    }
    if t - k as f64 * delta <= f.domain_start() {
        return Err(Error::config(
            "delta",
            format!(
                "reach t − kδ = {} must stay above the orbit domain start {}",
                t - k as f64 * delta,
                f.domain_start()
            ),
        ));
    }
    let halton = ShiftedHalton::new(k, seed);
    let floor = delta * STEP_FLOOR;
    let total = samples << (levels - 1);
    let norms: Vec<f64> = (0..total as u64)
        .into_par_iter()
        .map(|i| {
            let h: Vec<f64> = halton
                .point(i)
                .into_iter()
                .map(|u| {
                    let v = delta * (2.0 * u - 1.0);
                    if v.abs() < floor {
                        floor.copysign(if v == 0.0 { 1.0 } else { v })
                    } else {
                        v
                    }
                })
                .collect();
            let b = StepBox { t, delta, h };
            let table = value_table(f, &b);
            f.norm_of(&subset_sum_combine(&table, f.dim(), &b))
        })
        .collect();
    let mut trace = Vec::with_capacity(levels);
    let mut best = 0.0f64;
    let mut start = 0;
    for j in 0..levels {
        let end = samples << j;
        for &v in &norms[start..end] {
            best = if v.is_nan() || best.is_nan() {
                f64::NAN
            } else {
                best.max(v)
            };
        }
        start = end;
        trace.push((end as f64, best));
    }
    Ok(ExtRealVerdict::from_trace(trace, &VerdictPolicy::default()))
}
