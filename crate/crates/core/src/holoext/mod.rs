//! Holomorphic extension of a real-analytic semigroup to
//! `Ω_t = ⋃_{n ≥ 1} ⋃_{nt ≤ s < (n+1)t} B(s, nr)` and the sector
//! `S(t, θ_t)`, `θ_t = arcsin(r/t)`.

mod svg;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use svg::{domain_svg, render_svg};

use crate::error::{Error, Result};
use crate::kernel::{ComplexValue, Operator, OperatorFunction, C64};
use crate::numeric::ln_factorial;

pub type ComplexPoint = ComplexValue;

pub const DEFAULT_TRUNCATION: usize = 40;
/// Orders sampled for the Cauchy constant at the re-centred point.
pub const CAUCHY_ORDERS: usize = 64;
/// Error bound above which an extension carries a truncation warning, relative to `max(1, ‖value‖)`.
pub const EXTEND_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolomorphyDomain {
    t: f64,
    r: f64,
    theta: f64,
    n_max: usize,
}

#[derive(Deserialize)]
struct DomainDoc {
    t: f64,
    r: f64,
    #[serde(default = "default_n_max")]
    n_max: usize,
}

fn default_n_max() -> usize {
    6
}

impl<'de> Deserialize<'de> for HolomorphyDomain {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = DomainDoc::deserialize(d)?;
        HolomorphyDomain::new(doc.t, doc.r, doc.n_max).map_err(serde::de::Error::custom)
    }
}

impl HolomorphyDomain {
    pub fn new(t: f64, r: f64, n_max: usize) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::config(
                "t",
                format!("must be finite and positive, got {t}"),
            ));
        }
        if !(r > 0.0 && r < t) {
            return Err(Error::config(
                "r",
                format!("must lie in (0, t) = (0, {t}), got {r}"),
            ));
        }
        if n_max == 0 {
            return Err(Error::config("n_max", "at least one ball is rendered"));
        }
        Ok(HolomorphyDomain {
            t,
            r,
            theta: (r / t).asin(),
            n_max,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Nearest point of the generator segment `[nt, (n+1)t]` to `z`.
    pub fn center(&self, n: usize, z: C64) -> f64 {
        z.re.clamp(n as f64 * self.t, (n + 1) as f64 * self.t)
    }
}

/// Smallest `n ≥ 1` with `dist(z, [nt, (n+1)t]) < nr`, if any.
///
/// Ball `n` reaches no further left than `n(t − r)`, so `n ≤ ⌈re z/(t − r)⌉ + 1`.
pub fn omega_membership(dom: &HolomorphyDomain, z: ComplexPoint) -> Option<usize> {
    let z = C64::from(z);
    if !(z.re > 0.0) || !z.im.is_finite() || !z.re.is_finite() {
        return None;
    }
    let last = (z.re / (dom.t - dom.r)).ceil() as usize + 1;
    (1..=last).find(|&n| {
        let c = dom.center(n, z);
        (z - C64::new(c, 0.0)).norm() < n as f64 * dom.r
    })
}

pub fn omega_membership_batch(
    dom: &HolomorphyDomain,
    points: &[ComplexPoint],
) -> Vec<Option<usize>> {
    points
        .par_iter()
        .map(|&z| omega_membership(dom, z))
        .collect()
}

/// `re z > t` and `|arg(z − t)| < θ_t`, arg in `(−π, π]`.
pub fn sector_membership(dom: &HolomorphyDomain, z: ComplexPoint) -> bool {
    let w = C64::from(z) - C64::new(dom.t, 0.0);
    z.re > dom.t && w.arg().abs() < dom.theta
}

/// Value of the extension at `z` with its error bounds.
#[derive(Debug, Clone)]
pub struct Extension {
    pub value: Operator,
    pub witness: usize,
    pub center: f64,
    pub truncation: usize,
    /// Cauchy constant `sup_k ‖T^{(k)}(s)‖ (nr)^k / k!` over sampled orders.
    pub cauchy_constant: f64,
    /// `C q^{K+1}/(1 − q)` with `q = |z − s|/(nr)`.
    pub tail_bound: f64,
    pub rounding_bound: f64,
}

impl Extension {
    pub fn error_bound(&self) -> f64 {
        self.tail_bound + self.rounding_bound
    }

    pub fn truncation_warning(&self) -> bool {
        !(self.error_bound() <= EXTEND_TOLERANCE * self.value.norm().max(1.0))
    }
}

/// `Σ_{k ≤ K} (z − s)^k T^{(k)}(s)/k!` with `T^{(k)}(s) = T^{(k)}(t) T(s − t)`.
pub fn extend_eval(
    f: &OperatorFunction,
    dom: &HolomorphyDomain,
    z: ComplexPoint,
    k: usize,
) -> Result<Extension> {
    if !f.has_oracle() {
        return Err(Error::config(
            "oracle",
            format!("{} has no derivative oracle", f.name),
        ));
    }
    let Some(n) = omega_membership(dom, z) else {
        return Err(Error::OutOfDomain {
            re: z.re,
            im: z.im,
            message: format!("outside Ω_t for t = {}, r = {}", dom.t, dom.r),
        });
    };
    let zc = C64::from(z);
    let s = dom.center(n, zc);
    let radius = n as f64 * dom.r;
    let shift = f.eval(s - dom.t);
    let deriv_at_center = |j: usize| -> Operator {
        f.derivative(j, dom.t)
            .expect("oracle checked above")
            .compose(&shift)
    };

    let dz = zc - C64::new(s, 0.0);
    let mut value = Operator::zeros(f.dim());
    let mut weight = C64::new(1.0, 0.0);
    let mut abs_sum = 0.0;
    let mut log_c = f64::NEG_INFINITY;
    for j in 0..=k.max(CAUCHY_ORDERS) {
        let d = deriv_at_center(j);
        let norm = d.norm();
        if norm > 0.0 {
            log_c = log_c.max(norm.ln() + j as f64 * radius.ln() - ln_factorial(j));
        }
        if j <= k {
            if j > 0 {
                weight = weight * dz / j as f64;
            }
            let term = d.scale(weight);
            abs_sum += term.norm();
            value = value.add(&term);
        }
    }
    let c = log_c.exp();
    let q = dz.norm() / radius;
    let tail_bound = if q == 0.0 {
        0.0
    } else {
        c * q.powi(k as i32 + 1) / (1.0 - q)
    };
    Ok(Extension {
        value,
        witness: n,
        center: s,
        truncation: k,
        cauchy_constant: c,
        tail_bound,
        rounding_bound: 8.0 * (k as f64 + 1.0) * f64::EPSILON * abs_sum,
    })
}

/// `max ‖T(s + t) − T(s)T(t)‖` over ordered pairs of grid times.
pub fn semigroup_defect(f: &OperatorFunction, grid: &[f64]) -> Result<f64> {
    if let Some(bad) = grid.iter().find(|&&t| !(t >= 0.0 && t.is_finite())) {
        return Err(Error::config(
            "grid",
            format!("times must be finite and ≥ 0, got {bad}"),
        ));
    }
    let values: Vec<Operator> = grid.par_iter().map(|&t| f.eval(t)).collect();
    let defects: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let values = &values;
            (0..grid.len()).map(move |j| {
                f.eval(grid[i] + grid[j])
                    .sub(&values[i].compose(&values[j]))
                    .norm()
            })
        })
        .collect();
    Ok(defects.into_iter().fold(0.0, f64::max))
}

/// `‖T^{(l)}(t) T^{(k)}(s) − T^{(l+k)}(t + s)‖`.
pub fn derivative_composition_defect(
    f: &OperatorFunction,
    l: usize,
    k: usize,
    t: f64,
    s: f64,
) -> Result<f64> {
    let need = |j: usize, at: f64| {
        f.derivative(j, at)
            .ok_or_else(|| Error::config("oracle", format!("{} has no derivative oracle", f.name)))
    };
    Ok(need(l, t)?
        .compose(&need(k, s)?)
        .sub(&need(l + k, t + s)?)
        .norm())
}
