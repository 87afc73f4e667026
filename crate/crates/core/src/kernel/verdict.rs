use serde::{Deserialize, Serialize};

use crate::numeric::loglog_slope;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictKind {
    Finite,
    Diverging,
    Inconclusive,
}

/// Value of an extended seminorm.
///
/// An infinite value is never stored: divergence is certified from the
/// refinement trace and carries the fitted log-log growth exponent instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtRealVerdict {
    pub kind: VerdictKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub growth_exponent: Option<f64>,
    /// `(resolution, partial sup)` pairs, partial sups non-decreasing.
    #[serde(with = "crate::kernel::extfloat::pairs")]
    pub refinement_trace: Vec<(f64, f64)>,
}

/// Thresholds of the refinement policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerdictPolicy {
    /// Successive partial sups agreeing within this relative gap are final.
    pub finite_rel_tol: f64,
    /// Log-log slope above which a trace is declared divergent.
    pub diverge_slope: f64,
    /// Number of doublings the slope fit spans.
    pub min_doublings: usize,
    /// Increment envelopes shrinking at least by this ratio signal convergence.
    pub contraction: f64,
    /// Tail increment sums that keep at least this ratio signal logarithmic divergence.
    pub stall: f64,
}

impl Default for VerdictPolicy {
    fn default() -> Self {
        VerdictPolicy {
            finite_rel_tol: 1e-6,
            diverge_slope: 0.1,
            min_doublings: 4,
            contraction: 0.8,
            stall: 0.9,
        }
    }
}

impl ExtRealVerdict {
    pub fn finite(value: f64, trace: Vec<(f64, f64)>) -> Self {
        debug_assert!(value >= 0.0);
        ExtRealVerdict {
            kind: VerdictKind::Finite,
            value: Some(value),
            growth_exponent: None,
            refinement_trace: trace,
        }
    }

    pub fn diverging(exponent: f64, trace: Vec<(f64, f64)>) -> Self {
        ExtRealVerdict {
            kind: VerdictKind::Diverging,
            value: None,
            growth_exponent: Some(exponent),
            refinement_trace: trace,
        }
    }

    pub fn inconclusive(trace: Vec<(f64, f64)>) -> Self {
        ExtRealVerdict {
            kind: VerdictKind::Inconclusive,
            value: None,
            growth_exponent: None,
            refinement_trace: trace,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.kind == VerdictKind::Finite
    }

    pub fn is_diverging(&self) -> bool {
        self.kind == VerdictKind::Diverging
    }

    /// Decide a verdict from a trace of non-decreasing partial sups, finest last.
    ///
    /// Order of tests: non-finite samples, all-zero trace, agreement of the
    /// last two partial sups, geometric contraction of the increment envelope
    /// over blocks of two levels, slope over the last `min_doublings`
    /// doublings, stalled increment sums. A trace whose increments contract
    /// geometrically is summable and never divergent.
    pub fn from_trace(trace: Vec<(f64, f64)>, policy: &VerdictPolicy) -> Self {
        let Some(&(_, last)) = trace.last() else {
            return Self::inconclusive(trace);
        };
        if trace.iter().any(|(_, v)| v.is_nan()) {
            return Self::inconclusive(trace);
        }
        if trace.iter().any(|(_, v)| v.is_infinite()) {
            let finite: Vec<(f64, f64)> = trace
                .iter()
                .copied()
                .filter(|(_, v)| v.is_finite())
                .collect();
            let slope = loglog_slope(&finite)
                .unwrap_or(f64::MAX)
                .max(policy.diverge_slope);
            return Self::diverging(slope, trace);
        }
        if last == 0.0 {
            return Self::finite(0.0, trace);
        }
        let n = trace.len();
        if n >= 2 {
            let prev = trace[n - 2].1;
            if (last - prev).abs() <= policy.finite_rel_tol * last {
                return Self::finite(last, trace);
            }
        }
        let increments: Vec<f64> = trace.windows(2).map(|w| w[1].1 - w[0].1).collect();
        let m = increments.len();
        let contracting = |prev: f64, next: f64| prev > 0.0 && next <= policy.contraction * prev;
        if m >= 4 {
            // Envelope over blocks of two levels tolerates sawtooth approximations.
            let recent = increments[m - 1].max(increments[m - 2]);
            let earlier = increments[m - 3].max(increments[m - 4]);
            if contracting(earlier, recent) {
                return Self::finite(last, trace);
            }
        } else if m >= 2 && contracting(increments[m - 2], increments[m - 1]) {
            return Self::finite(last, trace);
        }
        let span = policy.min_doublings + 1;
        let slope = if n >= span {
            loglog_slope(&trace[n - span..])
        } else {
            None
        };
        if let Some(s) = slope {
            if s > policy.diverge_slope {
                return Self::diverging(s, trace);
            }
            let tail = &increments[m - policy.min_doublings..];
            let half = tail.len() / 2;
            let (old, new): (f64, f64) = (tail[..half].iter().sum(), tail[half..].iter().sum());
            if s > 0.0 && old > 0.0 && new >= policy.stall * old {
                return Self::diverging(s, trace);
            }
        }
        Self::inconclusive(trace)
    }
}
