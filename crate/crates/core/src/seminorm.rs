//! Extended seminorms of boundedness, Hölder continuity, uniform continuity,
//! bounded variation and absolute continuity, evaluated on refining sample
//! sets of a time window.
//!
//! Every evaluator runs all refinement levels on a fixed, data-independent
//! sample and pair set, so the seminorm axioms (absolute homogeneity and the
//! triangle inequality) hold exactly up to rounding for every orbit pair.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{
    sample_levels, ExtRealVerdict, Orbit, Resolution, TimeWindow, VectorNorm, VerdictPolicy, C64,
};
use crate::numeric::pairwise_sum;

/// Up to this many samples every pair is inspected.
pub const EXACT_PAIR_LIMIT: usize = 4096;
/// Neighbour band always inspected beyond the exact limit.
pub const PAIR_BAND: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeminormProperty {
    SupNorm,
    LocalBound,
    Holder,
    LocalHolder,
    UniformContinuity,
    TotalVariation,
    AbsoluteContinuity,
}

impl SeminormProperty {
    pub const ALL: [SeminormProperty; 7] = [
        SeminormProperty::SupNorm,
        SeminormProperty::LocalBound,
        SeminormProperty::Holder,
        SeminormProperty::LocalHolder,
        SeminormProperty::UniformContinuity,
        SeminormProperty::TotalVariation,
        SeminormProperty::AbsoluteContinuity,
    ];

    /// Local properties are measured on compact windows only.
    pub fn is_local(&self) -> bool {
        matches!(
            self,
            SeminormProperty::LocalBound
                | SeminormProperty::LocalHolder
                | SeminormProperty::TotalVariation
        )
    }
}

/// A seminorm together with its window and parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeminormSpec {
    pub property: SeminormProperty,
    pub window: TimeWindow,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_delta_cap")]
    pub delta_cap: f64,
    #[serde(default = "default_per_unit")]
    pub sample_resolution: usize,
    #[serde(default = "default_levels")]
    pub levels: usize,
}

fn default_alpha() -> f64 {
    1.0
}
fn default_delta_cap() -> f64 {
    1.0
}
fn default_per_unit() -> usize {
    Resolution::default().per_unit
}
fn default_levels() -> usize {
    Resolution::default().levels
}

impl SeminormSpec {
    pub fn new(property: SeminormProperty, window: TimeWindow) -> Self {
        SeminormSpec {
            property,
            window,
            alpha: default_alpha(),
            delta_cap: default_delta_cap(),
            sample_resolution: default_per_unit(),
            levels: default_levels(),
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_delta_cap(mut self, delta_cap: f64) -> Self {
        self.delta_cap = delta_cap;
        self
    }

    pub fn with_resolution(mut self, res: Resolution) -> Self {
        self.sample_resolution = res.per_unit;
        self.levels = res.levels;
        self
    }

    pub fn resolution(&self) -> Result<Resolution> {
        Resolution::new(self.sample_resolution, self.levels)
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        check_positive("delta_cap", self.delta_cap)?;
        self.resolution()?;
        Ok(())
    }

    pub fn evaluate(&self, orbit: &Orbit) -> Result<ExtRealVerdict> {
        self.validate()?;
        let res = self.resolution()?;
        let w = self.window;
        match self.property {
            SeminormProperty::SupNorm => sup_seminorm(orbit, &w, &res),
            SeminormProperty::LocalBound => sup_seminorm(orbit, &require_compact(&w)?, &res),
            SeminormProperty::Holder => holder_seminorm(orbit, &w, self.alpha, &res),
            SeminormProperty::LocalHolder => {
                holder_seminorm(orbit, &require_compact(&w)?, self.alpha, &res)
            }
            SeminormProperty::UniformContinuity => {
                uc_modulus_seminorm(orbit, &w, self.delta_cap, &res)
            }
            SeminormProperty::TotalVariation => {
                let w = require_compact(&w)?;
                total_variation(orbit, w.lo(), w.hi().expect("compact"), &res)
            }
            SeminormProperty::AbsoluteContinuity => ac_functional(orbit, &w, self.delta_cap, &res),
        }
    }
}

fn require_compact(w: &TimeWindow) -> Result<TimeWindow> {
    if w.is_compact() {
        Ok(*w)
    } else {
        Err(Error::config(
            "window.hi",
            "a local seminorm needs a finite window",
        ))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::config(
            "alpha",
            format!("must lie in (0, 1], got {alpha}"),
        ))
    }
}

fn check_positive(field: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(
            field,
            format!("must be a finite positive real, got {v}"),
        ))
    }
}

fn check_domain(orbit: &Orbit, lo: f64) -> Result<()> {
    if lo < orbit.domain_start() {
        return Err(Error::config(
            "window.lo",
            format!(
                "window starts at {lo}, before the orbit domain start {}",
                orbit.domain_start()
            ),
        ));
    }
    Ok(())
}

/// Orbit values at `times`, stored row-major with stride `dim`.
struct Samples {
    dim: usize,
    norm: VectorNorm,
    data: Vec<C64>,
}

impl Samples {
    fn collect(orbit: &Orbit, times: &[f64]) -> Self {
        let rows: Vec<_> = times.par_iter().map(|&t| orbit.eval(t)).collect();
        let dim = orbit.dim();
        let mut data = Vec::with_capacity(dim * rows.len());
        for r in &rows {
            data.extend(r.iter().copied());
        }
        Samples {
            dim,
            norm: orbit.norm_kind(),
            data,
        }
    }

    fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    fn dist(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (self.row(i), self.row(j));
        match self.norm {
            VectorNorm::Euclidean => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt(),
            VectorNorm::Sup => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max),
        }
    }
}

/// NaN-propagating maximum.
fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Running maximum turns per-level sups into a non-decreasing trace.
fn accumulate(levels: impl IntoIterator<Item = (f64, f64)>) -> Vec<(f64, f64)> {
    let mut best = 0.0f64;
    levels
        .into_iter()
        .map(|(res, v)| {
            best = nan_max(best, v);
            (res, best)
        })
        .collect()
}

fn verdict(trace: Vec<(f64, f64)>) -> ExtRealVerdict {
    ExtRealVerdict::from_trace(trace, &VerdictPolicy::default())
}

/// `sup ‖u_x(t)‖` over the window.
pub fn sup_seminorm(
    orbit: &Orbit,
    window: &TimeWindow,
    res: &Resolution,
) -> Result<ExtRealVerdict> {
    check_domain(orbit, window.lo())?;
    let levels = sample_levels(window, res);
    if levels.iter().all(|l| l.times.is_empty()) {
        return Err(Error::config("resolution", "empty sample set"));
    }
    let trace = accumulate(levels.iter().map(|level| {
        let m = level
            .times
            .par_iter()
            .map(|&t| orbit.value_norm(t))
            .reduce(|| 0.0, nan_max);
        (level.resolution, m)
    }));
    Ok(verdict(trace))
}

/// Sup of `weight(t_j − t_i)·‖u(t_j) − u(t_i)‖` over a fixed pair set of the
/// sorted samples. `weight` returning `None` excludes the pair; exclusion must
/// be monotone in the gap so that scanning stops at the first excluded `j`.
fn pair_sup(times: &[f64], s: &Samples, weight: &(dyn Fn(f64) -> Option<f64> + Sync)) -> f64 {
    let n = s.len();
    let scan = |i: usize, js: &mut dyn Iterator<Item = usize>| -> f64 {
        let mut best = 0.0f64;
        for j in js {
            let Some(w) = weight(times[j] - times[i]) else {
                break;
            };
            best = nan_max(best, w * s.dist(i, j));
        }
        best
    };
    if n <= EXACT_PAIR_LIMIT {
        return (0..n)
            .into_par_iter()
            .map(|i| scan(i, &mut (i + 1..n)))
            .reduce(|| 0.0, nan_max);
    }
    let band = (0..n)
        .into_par_iter()
        .map(|i| scan(i, &mut (i + 1..n.min(i + 1 + PAIR_BAND))))
        .reduce(|| 0.0, nan_max);
    let stride = n.div_ceil(EXACT_PAIR_LIMIT);
    let coarse: Vec<usize> = (0..n).step_by(stride).collect();
    let wide = (0..coarse.len())
        .into_par_iter()
        .map(|a| scan(coarse[a], &mut coarse[a + 1..].iter().copied()))
        .reduce(|| 0.0, nan_max);
    nan_max(band, wide)
}

/// `sup_{r<s} ‖u_x(s) − u_x(r)‖ / (s − r)^α` over the window.
pub fn holder_seminorm(
    orbit: &Orbit,
    window: &TimeWindow,
    alpha: f64,
    res: &Resolution,
) -> Result<ExtRealVerdict> {
    check_alpha(alpha)?;
    check_domain(orbit, window.lo())?;
    let levels = sample_levels(window, res);
    if levels.iter().all(|l| l.times.len() < 2) {
        return Err(Error::config("resolution", "fewer than two samples"));
    }
    let weight = move |dt: f64| {
        Some(if alpha == 1.0 {
            1.0 / dt
        } else {
            dt.powf(-alpha)
        })
    };
    let trace = accumulate(levels.iter().map(|level| {
        let s = Samples::collect(orbit, &level.times);
        (level.resolution, pair_sup(&level.times, &s, &weight))
    }));
    Ok(verdict(trace))
}

/// `sup{‖u_x(t) − u_x(s)‖ : |t − s| ≤ delta_cap}` over the window.
pub fn uc_modulus_seminorm(
    orbit: &Orbit,
    window: &TimeWindow,
    delta_cap: f64,
    res: &Resolution,
) -> Result<ExtRealVerdict> {
    check_positive("delta_cap", delta_cap)?;
    check_domain(orbit, window.lo())?;
    let levels = sample_levels(window, res);
    if levels.iter().all(|l| l.times.len() < 2) {
        return Err(Error::config("resolution", "fewer than two samples"));
    }
    let weight = move |dt: f64| (dt <= delta_cap).then_some(1.0);
    let trace = accumulate(levels.iter().map(|level| {
        let s = Samples::collect(orbit, &level.times);
        (level.resolution, pair_sup(&level.times, &s, &weight))
    }));
    Ok(verdict(trace))
}

/// Partition sums `Σ ‖u_x(t_{i+1}) − u_x(t_i)‖` on the closed interval `[a, b]`.
///
/// Level `j` uses the uniform partition with `ceil(per_unit·(b − a))·2^j`
/// cells; partitions are nested across levels and contain both endpoints.
pub fn total_variation(orbit: &Orbit, a: f64, b: f64, res: &Resolution) -> Result<ExtRealVerdict> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(Error::config(
            "window",
            format!("need finite a < b, got [{a}, {b}]"),
        ));
    }
    check_domain(orbit, a)?;
    let base = ((res.per_unit as f64 * (b - a)).ceil() as usize).max(1);
    let trace = accumulate((0..res.levels).map(|j| {
        let n = base << j;
        let times: Vec<f64> = (0..=n)
            .map(|i| {
                if i == n {
                    b
                } else {
                    a + (b - a) * i as f64 / n as f64
                }
            })
            .collect();
        let s = Samples::collect(orbit, &times);
        let increments: Vec<f64> = (0..n).into_par_iter().map(|i| s.dist(i, i + 1)).collect();
        (n as f64, pairwise_sum(&increments))
    }));
    Ok(verdict(trace))
}

/// Grid-restricted `sup Σ_k ‖u_x(b_k) − u_x(a_k)‖` over disjoint intervals of
/// total length `< delta`: the sum of the `m` largest single-cell increments,
/// `m·Δ < delta`.
pub fn ac_functional(
    orbit: &Orbit,
    window: &TimeWindow,
    delta: f64,
    res: &Resolution,
) -> Result<ExtRealVerdict> {
    check_positive("delta", delta)?;
    check_domain(orbit, window.lo())?;
    let levels = sample_levels(window, res);
    let mut trace = Vec::with_capacity(levels.len());
    for level in &levels {
        let n = level.times.len();
        if n < 2 {
            continue;
        }
        let cell = level.times[1] - level.times[0];
        let m = cells_below(delta, cell);
        if m == 0 {
            return Err(Error::config(
                "delta",
                format!("delta = {delta} is smaller than one grid cell ({cell}); increase the resolution"),
            ));
        }
        let s = Samples::collect(orbit, &level.times);
        let mut increments: Vec<f64> = (0..n - 1)
            .into_par_iter()
            .map(|i| s.dist(i, i + 1))
            .collect();
        let value = if increments.iter().any(|v| v.is_nan()) {
            f64::NAN
        } else {
            top_sum(&mut increments, m)
        };
        trace.push((level.resolution, value));
    }
    if trace.is_empty() {
        return Err(Error::config("resolution", "fewer than two samples"));
    }
    Ok(verdict(accumulate(trace)))
}

/// Largest `m` with `m·cell < delta`.
fn cells_below(delta: f64, cell: f64) -> usize {
    let q = delta / cell;
    let m = q.ceil() as usize;
    if m as f64 * cell < delta {
        m
    } else {
        m.saturating_sub(1)
    }
}

/// Sum of the `m` largest entries, reduced in a length-determined order.
fn top_sum(values: &mut [f64], m: usize) -> f64 {
    if m >= values.len() {
        values.sort_by(|a, b| b.total_cmp(a));
        return pairwise_sum(values);
    }
    values.select_nth_unstable_by(m - 1, |a, b| b.total_cmp(a));
    let top = &mut values[..m];
    top.sort_by(|a, b| b.total_cmp(a));
    pairwise_sum(top)
}
