//! Eventual-regularity thresholds.
//!
//! An orbit has a property from `t_x` on when the property holds on `(n, ∞)` for the
//! scanned start `n = t_x`. Local properties are tested on the exhaustion windows
//! `[n + 1/m, n + m]`. The uniform threshold is the maximum over a basis plus seeded
//! random probe vectors.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{analyticity_radius_with, default_ladder, MAX_ESTIMATED_ORDER};
use crate::error::{Error, Result};
use crate::kernel::{OperatorFunction, Orbit, Resolution, TimeWindow, Vector, VerdictKind, C64};
use crate::mollifier::smoothness_probe_with;
use crate::seminorm::{sup_seminorm, SeminormProperty, SeminormSpec};

pub const DEFAULT_PROBES: usize = 32;
pub const DEFAULT_SEED: u64 = 0x7e57_ab1e;
/// Exhaustion parameters `m` of the local windows `[n + 1/m, n + m]`.
pub const LOCAL_M: [u32; 4] = [2, 4, 8, 16];
pub const BISECTION_STEP: f64 = 1.0 / 64.0;
/// Orders checked for `Smooth`.
pub const SMOOTH_ORDER: usize = 4;

fn default_alpha() -> f64 {
    1.0
}

fn default_delta_cap() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", deny_unknown_fields)]
pub enum Property {
    Seminorm {
        property: SeminormProperty,
        #[serde(default = "default_alpha")]
        alpha: f64,
        #[serde(default = "default_delta_cap")]
        delta_cap: f64,
    },
    Differentiable {
        k: usize,
    },
    Smooth,
    Analytic,
    Zero,
}

impl Property {
    pub fn seminorm(property: SeminormProperty) -> Self {
        Property::Seminorm {
            property,
            alpha: default_alpha(),
            delta_cap: default_delta_cap(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Property::Seminorm { property, .. } => format!("{property:?}"),
            Property::Differentiable { k } => format!("Differentiable({k})"),
            Property::Smooth => "Smooth".into(),
            Property::Analytic => "Analytic".into(),
            Property::Zero => "Zero".into(),
        }
    }

    fn is_local(&self) -> bool {
        match self {
            Property::Seminorm { property, .. } => property.is_local(),
            Property::Differentiable { .. } | Property::Smooth | Property::Analytic => true,
            Property::Zero => false,
        }
    }
}

/// Sampling used by the per-window tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifyOptions {
    pub seminorm_resolution: Resolution,
    pub zero_resolution: Resolution,
    pub mollifier_ladder: Vec<u32>,
    /// Smoothness probe points per unit of window length.
    pub probe_points: usize,
    pub analytic_k_max: usize,
    pub analytic_resolution: Resolution,
    pub probes: usize,
    pub seed: u64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            seminorm_resolution: Resolution {
                per_unit: 32,
                levels: 5,
            },
            zero_resolution: Resolution {
                per_unit: 64,
                levels: 3,
            },
            mollifier_ladder: vec![4, 8, 16, 32, 64],
            probe_points: 64,
            analytic_k_max: 24,
            analytic_resolution: Resolution {
                per_unit: 16,
                levels: 3,
            },
            probes: DEFAULT_PROBES,
            seed: DEFAULT_SEED,
        }
    }
}

/// One row of the scan: the verdict on the windows starting at `start`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub start: f64,
    pub verdict: VerdictKind,
    /// Refinement trace of the deciding window, or of the last window tried.
    #[serde(with = "crate::kernel::extfloat::pairs")]
    pub trace: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitThreshold {
    pub orbit_id: String,
    /// `None` when no scanned start passes.
    pub threshold: Option<f64>,
    /// First scanned integer start that passes.
    pub witness_n: Option<usize>,
    pub rows: Vec<ScanRow>,
}

impl OrbitThreshold {
    pub fn verdict(&self) -> VerdictKind {
        if self.threshold.is_some() {
            VerdictKind::Finite
        } else {
            VerdictKind::Diverging
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub function: String,
    pub property: Property,
    pub n_scan: Vec<usize>,
    /// Time lattice of discretized examples; thresholds are exact only on it.
    pub lattice: Option<f64>,
    pub per_orbit: Vec<OrbitThreshold>,
    /// `None` when some orbit never attains the property within the scan.
    pub uniform_threshold: Option<f64>,
    /// Orbit attaining the maximum, or the first diverging one.
    pub witness_orbit: Option<String>,
}

impl RegularityReport {
    pub fn uniform_verdict(&self) -> VerdictKind {
        if self.uniform_threshold.is_some() {
            VerdictKind::Finite
        } else {
            VerdictKind::Diverging
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Columns `orbit_id,property,threshold,verdict,witness_n`; the uniform row has id `uniform`.
    pub fn to_csv(&self) -> String {
        let label = self.property.label();
        let fmt_threshold =
            |t: Option<f64>| t.map_or_else(|| "inf".to_string(), |v| format!("{v:.16e}"));
        let mut out = String::from("orbit_id,property,threshold,verdict,witness_n\n");
        for o in &self.per_orbit {
            out.push_str(&format!(
                "{},{},{},{:?},{}\n",
                o.orbit_id,
                label,
                fmt_threshold(o.threshold),
                o.verdict(),
                o.witness_n.map_or(String::new(), |n| n.to_string())
            ));
        }
        out.push_str(&format!(
            "uniform,{},{},{:?},\n",
            label,
            fmt_threshold(self.uniform_threshold),
            self.uniform_verdict()
        ));
        out
    }
}

fn windows_from(property: &Property, start: f64) -> Result<Vec<TimeWindow>> {
    if property.is_local() {
        LOCAL_M
            .iter()
            .map(|&m| TimeWindow::new(start + 1.0 / m as f64, start + m as f64))
            .collect()
    } else {
        Ok(vec![TimeWindow::unbounded(start)?])
    }
}

/// Whether the property holds from `start` on.
fn test_start(
    orbit: &Orbit,
    property: &Property,
    start: f64,
    opts: &ClassifyOptions,
) -> Result<ScanRow> {
    let mut trace = Vec::new();
    for window in windows_from(property, start)? {
        let (kind, tr) = test_window(orbit, property, start, &window, opts)?;
        trace = tr;
        if kind != VerdictKind::Finite {
            return Ok(ScanRow {
                start,
                verdict: kind,
                trace,
            });
        }
    }
    Ok(ScanRow {
        start,
        verdict: VerdictKind::Finite,
        trace,
    })
}

fn test_window(
    orbit: &Orbit,
    property: &Property,
    start: f64,
    window: &TimeWindow,
    opts: &ClassifyOptions,
) -> Result<(VerdictKind, Vec<(f64, f64)>)> {
    match *property {
        Property::Seminorm {
            property,
            alpha,
            delta_cap,
        } => {
            let v = SeminormSpec::new(property, *window)
                .with_alpha(alpha)
                .with_delta_cap(delta_cap)
                .with_resolution(opts.seminorm_resolution)
                .evaluate(orbit)?;
            Ok((v.kind, v.refinement_trace))
        }
        Property::Zero => {
            let v = sup_seminorm(orbit, window, &opts.zero_resolution)?;
            let zero = v.refinement_trace.iter().all(|&(_, s)| s == 0.0);
            let kind = if zero {
                VerdictKind::Finite
            } else {
                VerdictKind::Diverging
            };
            Ok((kind, v.refinement_trace))
        }
        Property::Differentiable { k } => smooth_window(orbit, window, k, opts),
        Property::Smooth => smooth_window(orbit, window, SMOOTH_ORDER, opts),
        Property::Analytic => {
            // Both window edges serve as centres, with radii below their distance to `start`.
            let mut trace = Vec::new();
            let k_max = if orbit.has_oracle() {
                opts.analytic_k_max
            } else {
                opts.analytic_k_max.min(MAX_ESTIMATED_ORDER)
            };
            for t in [window.lo(), window.hi().unwrap_or(window.lo())] {
                let ladder: Vec<f64> = default_ladder()
                    .into_iter()
                    .filter(|&r| r < t - start)
                    .collect();
                if ladder.is_empty() {
                    return Ok((VerdictKind::Inconclusive, trace));
                }
                let report = match analyticity_radius_with(
                    orbit,
                    t,
                    &ladder,
                    k_max,
                    &opts.analytic_resolution,
                ) {
                    Ok(r) => r,
                    Err(Error::Inconclusive { trace, .. }) => {
                        return Ok((VerdictKind::Inconclusive, trace))
                    }
                    Err(e) => return Err(e),
                };
                trace = report
                    .per_radius
                    .iter()
                    .map(|(r, v)| (*r, v.value.unwrap_or(f64::INFINITY)))
                    .collect();
                if report.radius.is_none() {
                    return Ok((VerdictKind::Diverging, trace));
                }
            }
            Ok((VerdictKind::Finite, trace))
        }
    }
}

fn smooth_window(
    orbit: &Orbit,
    window: &TimeWindow,
    k: usize,
    opts: &ClassifyOptions,
) -> Result<(VerdictKind, Vec<(f64, f64)>)> {
    // Local windows are compact.
    let len = window.hi().unwrap_or(window.lo() + 1.0) - window.lo();
    let points = opts.probe_points * len.ceil().max(1.0) as usize;
    let rep = smoothness_probe_with(orbit, window, k, &opts.mollifier_ladder, points)?;
    let trace = rep
        .orders
        .last()
        .map(|o| o.distances.iter().map(|&(_, l, d)| (l as f64, d)).collect())
        .unwrap_or_default();
    let kind = if rep.is_smooth_to(k) {
        VerdictKind::Finite
    } else {
        VerdictKind::Diverging
    };
    Ok((kind, trace))
}

fn check_scan(scan: &[usize]) -> Result<()> {
    if scan.first() != Some(&0) {
        return Err(Error::config("scan", "the scan must start at 0"));
    }
    if scan.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::config(
            "scan",
            "the scan must be strictly increasing",
        ));
    }
    Ok(())
}

/// Default scan `0, 1, …, 8`.
pub fn default_scan() -> Vec<usize> {
    (0..=8).collect()
}

/// Smallest scanned start that passes, refined by bisection against the last failing one.
pub fn orbit_threshold(
    orbit: &Orbit,
    orbit_id: &str,
    property: &Property,
    scan: &[usize],
    opts: &ClassifyOptions,
) -> Result<OrbitThreshold> {
    check_scan(scan)?;
    let mut rows = Vec::new();
    let mut last_fail: Option<f64> = None;
    let mut witness = None;
    for &n in scan {
        let row = test_start(orbit, property, n as f64, opts)?;
        let pass = row.verdict == VerdictKind::Finite;
        rows.push(row);
        if pass {
            witness = Some(n);
            break;
        }
        last_fail = Some(n as f64);
    }
    let Some(n) = witness else {
        return Ok(OrbitThreshold {
            orbit_id: orbit_id.to_string(),
            threshold: None,
            witness_n: None,
            rows,
        });
    };
    let mut hi = n as f64;
    if let Some(mut lo) = last_fail {
        while hi - lo > BISECTION_STEP {
            let mid = 0.5 * (lo + hi);
            let row = test_start(orbit, property, mid, opts)?;
            if row.verdict == VerdictKind::Finite {
                hi = mid;
            } else {
                lo = mid;
            }
            rows.push(row);
        }
    }
    Ok(OrbitThreshold {
        orbit_id: orbit_id.to_string(),
        threshold: Some(hi),
        witness_n: Some(n),
        rows,
    })
}

/// Basis vectors followed by `count` seeded complex-Gaussian vectors.
pub fn probe_vectors(dim: usize, count: usize, seed: u64) -> Vec<(String, Vector)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut out: Vec<(String, Vector)> = (0..dim)
        .map(|j| {
            (
                format!("e{j}"),
                Vector::from_fn(dim, |i, _| C64::new(if i == j { 1.0 } else { 0.0 }, 0.0)),
            )
        })
        .collect();
    for p in 0..count {
        let v = Vector::from_fn(dim, |_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re * scale, im * scale)
        });
        out.push((format!("probe{p}"), v));
    }
    out
}

/// Thresholds for the given vectors and their maximum.
pub fn uniform_threshold_for(
    f: &OperatorFunction,
    property: &Property,
    vectors: &[(String, Vector)],
    scan: &[usize],
    opts: &ClassifyOptions,
) -> Result<RegularityReport> {
    if vectors.is_empty() {
        return Err(Error::config("probes", "the probe set is empty"));
    }
    check_scan(scan)?;
    let per_orbit = vectors
        .par_iter()
        .map(|(id, x)| orbit_threshold(&f.orbit(x.clone())?, id, property, scan, opts))
        .collect::<Result<Vec<_>>>()?;
    let (uniform_threshold, witness_orbit) = match per_orbit.iter().find(|o| o.threshold.is_none())
    {
        Some(o) => (None, Some(o.orbit_id.clone())),
        None => {
            let best = per_orbit
                .iter()
                .fold(None::<&OrbitThreshold>, |acc, o| match acc {
                    Some(a) if a.threshold >= o.threshold => Some(a),
                    _ => Some(o),
                })
                .expect("non-empty");
            (best.threshold, Some(best.orbit_id.clone()))
        }
    };
    Ok(RegularityReport {
        function: f.name.clone(),
        property: *property,
        n_scan: scan.to_vec(),
        lattice: None,
        per_orbit,
        uniform_threshold,
        witness_orbit,
    })
}

/// Thresholds over the basis plus `opts.probes` random probes.
pub fn uniform_threshold(
    f: &OperatorFunction,
    property: &Property,
    scan: &[usize],
    opts: &ClassifyOptions,
) -> Result<RegularityReport> {
    let vectors = probe_vectors(f.dim(), opts.probes, opts.seed);
    uniform_threshold_for(f, property, &vectors, scan, opts)
}
