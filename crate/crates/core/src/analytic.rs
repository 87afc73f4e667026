//! Cauchy estimates: the seminorms
//! `p_{t,r}(x) = sup{ r^k/k! ‖u_x^{(k)}(s)‖ : s ∈ (t − r, t + r), k ≤ K }`,
//! radius ladders and truncated Taylor series with tail bounds.
//!
//! Magnitudes are tracked as logarithms, `k ln r − ln k! + ln‖f^{(k)}(s)‖`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finitediff::derivative_estimate;
use crate::kernel::{ExtRealVerdict, Orbit, Resolution, Vector, VerdictKind, VerdictPolicy, C64};
use crate::numeric::{ln_factorial, ls_slope};

pub const DEFAULT_K_MAX: usize = 24;
/// Orders spanned by the divergence-in-k fit.
pub const K_FIT_ORDERS: usize = 8;
/// Log-linear slope in `k` above which the seminorm diverges.
pub const K_SLOPE: f64 = 0.05;
/// Highest order served by numerical derivative estimates when no oracle exists.
pub const MAX_ESTIMATED_ORDER: usize = 6;
const ESTIMATE_STEP: f64 = 0.2;
const ESTIMATE_LEVELS: usize = 8;

/// `s`-sampling: `per_unit` points per window at level 0, doubled per level.
pub fn default_resolution() -> Resolution {
    Resolution {
        per_unit: 128,
        levels: 6,
    }
}

/// Dyadic ladder `1, 1/2, …, 2^{−10}`.
pub fn default_ladder() -> Vec<f64> {
    (0..=10).map(|j| 1.0 / (1u32 << j) as f64).collect()
}

/// Constant `C` with `‖f^{(k)}(s)‖ ≤ C·k!/r^k`, or `None` when divergent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyFit {
    pub t: f64,
    pub r: f64,
    pub c: Option<f64>,
    pub k_max: usize,
    pub window: (f64, f64),
}

impl CauchyFit {
    /// Fit from derivatives at the centre only, `C = max_{k ≤ K} r^k/k! ‖f^{(k)}(t)‖`.
    pub fn at_center(f: &Orbit, t: f64, r: f64, k_max: usize) -> Result<Self> {
        check_radius(r)?;
        let logs = (0..=k_max)
            .map(|k| Ok(weighted_log(k, r, f.norm_of(&derivative_at(f, k, t)?))))
            .collect::<Result<Vec<f64>>>()?;
        let c = if k_slope(&logs).is_some_and(|s| s > K_SLOPE) {
            None
        } else {
            Some(logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max).exp())
        };
        Ok(CauchyFit {
            t,
            r,
            c,
            k_max,
            window: (t, t),
        })
    }

    /// Fit from the windowed seminorm `p_{t,r}`.
    pub fn from_seminorm(
        f: &Orbit,
        t: f64,
        r: f64,
        k_max: usize,
        res: &Resolution,
    ) -> Result<Self> {
        let v = analyticity_seminorm(f, t, r, k_max, res)?;
        let (lo, hi) = clipped_window(f, t, r);
        Ok(CauchyFit {
            t,
            r,
            c: v.is_finite().then(|| v.value.unwrap_or(0.0)),
            k_max,
            window: (lo, hi),
        })
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::config(
            "r",
            format!("radius must be a finite positive real, got {r}"),
        ))
    }
}

fn weighted_log(k: usize, r: f64, norm: f64) -> f64 {
    if norm == 0.0 {
        return f64::NEG_INFINITY;
    }
    k as f64 * r.ln() - ln_factorial(k) + norm.ln()
}

fn derivative_at(f: &Orbit, k: usize, s: f64) -> Result<Vector> {
    if let Some(v) = f.derivative(k, s) {
        return Ok(v);
    }
    if k > MAX_ESTIMATED_ORDER {
        return Err(Error::config(
            "k_max",
            format!("order {k} needs a derivative oracle; estimates stop at {MAX_ESTIMATED_ORDER}"),
        ));
    }
    Ok(derivative_estimate(f, s, k, ESTIMATE_STEP, ESTIMATE_LEVELS)?.value)
}

/// Least-squares slope of the finite log-magnitudes over the last orders.
fn k_slope(logs: &[f64]) -> Option<f64> {
    let start = logs.len().saturating_sub(K_FIT_ORDERS);
    let (k, y): (Vec<f64>, Vec<f64>) = logs[start..]
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .map(|(i, v)| ((start + i) as f64, *v))
        .unzip();
    (k.len() >= 2).then(|| ls_slope(&k, &y))
}

fn clipped_window(f: &Orbit, t: f64, r: f64) -> (f64, f64) {
    ((t - r).max(f.domain_start()), t + r)
}

/// `p_{t,r}` over `K ≤ k_max` on the window `(t − r, t + r)`, clipped to the orbit domain.
pub fn analyticity_seminorm(
    f: &Orbit,
    t: f64,
    r: f64,
    k_max: usize,
    res: &Resolution,
) -> Result<ExtRealVerdict> {
    check_radius(r)?;
    let (lo, hi) = clipped_window(f, t, r);
    if !(hi > lo) {
        return Err(Error::config("t", format!("window ({lo}, {hi}) is empty")));
    }
    let policy = VerdictPolicy::default();
    let mut trace = Vec::with_capacity(res.levels);
    let mut best = f64::NEG_INFINITY;
    let mut finest: Vec<f64> = Vec::new();
    for j in 0..res.levels {
        let n = res.per_unit << j;
        let rows = (0..n)
            .into_par_iter()
            .map(|i| {
                let s = lo + (hi - lo) * (i as f64 + 0.5) / n as f64;
                (0..=k_max)
                    .map(|k| Ok(weighted_log(k, r, f.norm_of(&derivative_at(f, k, s)?))))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let per_order: Vec<f64> = (0..=k_max)
            .map(|k| {
                rows.iter()
                    .map(|row| row[k])
                    .fold(f64::NEG_INFINITY, log_max)
            })
            .collect();
        let level_max = per_order.iter().cloned().fold(f64::NEG_INFINITY, log_max);
        best = log_max(best, level_max);
        trace.push((n as f64, best.exp()));
        finest = per_order;
    }
    if finest.iter().any(|v| v.is_nan()) {
        return Ok(ExtRealVerdict::inconclusive(trace));
    }
    if let Some(s) = k_slope(&finest) {
        if s > K_SLOPE {
            return Ok(ExtRealVerdict::diverging(s, trace));
        }
    }
    Ok(ExtRealVerdict::from_trace(trace, &policy))
}

fn log_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusReport {
    pub t: f64,
    pub k_max: usize,
    pub radius: Option<f64>,
    pub per_radius: Vec<(f64, ExtRealVerdict)>,
}

/// Largest ladder radius with a Finite `p_{t,r}`.
pub fn analyticity_radius(f: &Orbit, t: f64, ladder: &[f64], k_max: usize) -> Result<RadiusReport> {
    analyticity_radius_with(f, t, ladder, k_max, &default_resolution())
}

pub fn analyticity_radius_with(
    f: &Orbit,
    t: f64,
    ladder: &[f64],
    k_max: usize,
    res: &Resolution,
) -> Result<RadiusReport> {
    if ladder.is_empty() {
        return Err(Error::config("ladder", "empty radius ladder"));
    }
    if ladder.iter().any(|&r| !(r > 0.0 && r <= 1.0)) || ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::config(
            "ladder",
            "radii must be strictly decreasing in (0, 1]",
        ));
    }
    let per_radius = ladder
        .par_iter()
        .map(|&r| Ok((r, analyticity_seminorm(f, t, r, k_max, res)?)))
        .collect::<Result<Vec<_>>>()?;
    if per_radius
        .iter()
        .all(|(_, v)| v.kind == VerdictKind::Inconclusive)
    {
        let trace = per_radius
            .iter()
            .map(|(r, v)| (*r, v.refinement_trace.last().map_or(f64::NAN, |p| p.1)))
            .collect();
        return Err(Error::inconclusive(
            format!("every radius in the ladder is inconclusive at t = {t}"),
            trace,
        ));
    }
    let radius = per_radius
        .iter()
        .find(|(_, v)| v.is_finite())
        .map(|(r, _)| *r);
    Ok(RadiusReport {
        t,
        k_max,
        radius,
        per_radius,
    })
}

/// Truncated Taylor series with a geometric tail bound.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesValue {
    pub value: Vector,
    /// `C q^{K+1} / (1 − q)`.
    pub tail_bound: f64,
    /// `(K + 1) ε Σ ‖terms‖`, a bound on summation rounding.
    pub rounding_bound: f64,
}

impl SeriesValue {
    pub fn error_bound(&self) -> f64 {
        self.tail_bound + self.rounding_bound
    }
}

/// `Σ_{k ≤ K} (z − t)^k f^{(k)}(t) / k!` for a derivative source centred at `fit.t`.
pub fn series_eval(f: &Orbit, z: C64, k: usize, fit: &CauchyFit) -> Result<SeriesValue> {
    let t = fit.t;
    let dz = z - C64::new(t, 0.0);
    let q = dz.norm() / fit.r;
    if !(q < 1.0) {
        return Err(Error::OutOfDomain {
            re: z.re,
            im: z.im,
            message: format!(
                "|z − t| = {} is not below the fit radius {}",
                dz.norm(),
                fit.r
            ),
        });
    }
    let Some(c) = fit.c else {
        return Err(Error::config("tail_policy", "the Cauchy fit is divergent"));
    };
    let mut value = Vector::zeros(f.dim());
    let mut weight = C64::new(1.0, 0.0);
    let mut abs_sum = 0.0;
    for j in 0..=k {
        if j > 0 {
            weight = weight * dz / j as f64;
        }
        if weight == C64::new(0.0, 0.0) {
            break;
        }
        let term = derivative_at(f, j, t)? * weight;
        abs_sum += f.norm_of(&term);
        value += term;
    }
    let tail_bound = if q == 0.0 {
        0.0
    } else {
        c * q.powi(k as i32 + 1) / (1.0 - q)
    };
    Ok(SeriesValue {
        value,
        tail_bound,
        rounding_bound: (k as f64 + 1.0) * f64::EPSILON * abs_sum,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_validation() {
        let f = Orbit::real(0.0, f64::exp).with_real_oracle(|_, t| t.exp());
        assert!(analyticity_radius(&f, 3.0, &[0.5, 1.0], 8).is_err());
        assert!(analyticity_radius(&f, 3.0, &[2.0, 1.0], 8).is_err());
        assert!(analyticity_radius(&f, 3.0, &[], 8).is_err());
    }

    #[test]
    fn center_evaluation_is_exact() {
        let f = Orbit::real(0.0, |t| 1.0 / (2.0 - t))
            .with_real_oracle(|k, t| ln_factorial(k).exp() / (2.0 - t).powi(k as i32 + 1));
        let fit = CauchyFit::at_center(&f, 0.5, 1.0, 24).unwrap();
        let s = series_eval(&f, C64::new(0.5, 0.0), 10, &fit).unwrap();
        assert_eq!(s.value[0], C64::new(1.0 / 1.5, 0.0));
        assert_eq!(s.tail_bound, 0.0);
    }

    #[test]
    fn out_of_disc_is_rejected() {
        let f = Orbit::real(0.0, f64::exp).with_real_oracle(|_, t| t.exp());
        let fit = CauchyFit::at_center(&f, 0.0, 1.0, 24).unwrap();
        assert!(matches!(
            series_eval(&f, C64::new(0.0, 1.0), 5, &fit),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn estimator_path_caps_the_order() {
        let f = Orbit::real(0.0, f64::exp);
        assert!(analyticity_seminorm(&f, 3.0, 0.5, 10, &default_resolution()).is_err());
    }
}
