use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::operator::{Vector, C64};
use crate::error::{Error, Result};

/// Norm used on orbit values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VectorNorm {
    /// `ℓ²` norm of `ℂ^d`.
    #[default]
    Euclidean,
    /// Max modulus over grid points, the norm of a discretized `C_0` space.
    Sup,
}

impl VectorNorm {
    pub fn of(&self, v: &Vector) -> f64 {
        match self {
            VectorNorm::Euclidean => v.norm(),
            VectorNorm::Sup => v.iter().map(|z| z.norm()).fold(0.0, f64::max),
        }
    }
}

type EvalFn = Arc<dyn Fn(f64) -> Vector + Send + Sync>;
type DerivFn = Arc<dyn Fn(usize, f64) -> Vector + Send + Sync>;

/// A vector-valued map `t ↦ u_x(t)` defined for `t ≥ domain_start`, with an
/// optional exact derivative oracle. `derivative(0, t) == eval(t)`.
#[derive(Clone)]
pub struct Orbit {
    dim: usize,
    domain_start: f64,
    norm: VectorNorm,
    eval: EvalFn,
    deriv: Option<DerivFn>,
}

impl fmt::Debug for Orbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Orbit")
            .field("dim", &self.dim)
            .field("domain_start", &self.domain_start)
            .field("norm", &self.norm)
            .field("has_oracle", &self.deriv.is_some())
            .finish()
    }
}

impl Orbit {
    pub fn new(
        dim: usize,
        domain_start: f64,
        eval: impl Fn(f64) -> Vector + Send + Sync + 'static,
    ) -> Self {
        assert!(dim > 0, "orbit dimension must be positive");
        assert!(
            domain_start >= 0.0 && domain_start.is_finite(),
            "domain_start must be finite and ≥ 0"
        );
        Orbit {
            dim,
            domain_start,
            norm: VectorNorm::Euclidean,
            eval: Arc::new(eval),
            deriv: None,
        }
    }

    /// One-dimensional orbit from a complex scalar function.
    pub fn scalar(domain_start: f64, f: impl Fn(f64) -> C64 + Send + Sync + 'static) -> Self {
        Orbit::new(1, domain_start, move |t| Vector::from_element(1, f(t)))
    }

    /// One-dimensional orbit from a real scalar function.
    pub fn real(domain_start: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Orbit::scalar(domain_start, move |t| C64::new(f(t), 0.0))
    }

    pub fn with_oracle(
        mut self,
        deriv: impl Fn(usize, f64) -> Vector + Send + Sync + 'static,
    ) -> Self {
        self.deriv = Some(Arc::new(deriv));
        self
    }

    /// Attach a real scalar derivative oracle `(k, t) ↦ f^{(k)}(t)`; `dim` must be 1.
    pub fn with_real_oracle(
        self,
        deriv: impl Fn(usize, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        assert_eq!(self.dim, 1, "scalar oracle on a vector orbit");
        self.with_oracle(move |k, t| Vector::from_element(1, C64::new(deriv(k, t), 0.0)))
    }

    pub fn with_norm(mut self, norm: VectorNorm) -> Self {
        self.norm = norm;
        self
    }

    pub fn without_oracle(mut self) -> Self {
        self.deriv = None;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain_start(&self) -> f64 {
        self.domain_start
    }

    pub fn norm_kind(&self) -> VectorNorm {
        self.norm
    }

    pub fn has_oracle(&self) -> bool {
        self.deriv.is_some()
    }

    pub fn eval(&self, t: f64) -> Vector {
        (self.eval)(t)
    }

    /// Value at `t`, extended by zero below `domain_start`.
    pub fn eval_extended(&self, t: f64) -> Vector {
        if t < self.domain_start {
            Vector::zeros(self.dim)
        } else {
            self.eval(t)
        }
    }

    /// `u_x^{(k)}(t)` from the oracle; `k = 0` always succeeds.
    pub fn derivative(&self, k: usize, t: f64) -> Option<Vector> {
        if k == 0 {
            return Some(self.eval(t));
        }
        self.deriv.as_ref().map(|d| d(k, t))
    }

    pub fn require_derivative(&self, k: usize, t: f64) -> Result<Vector> {
        self.derivative(k, t).ok_or_else(|| {
            Error::config(
                "orbit.deriv_oracle",
                format!("order {k} requested but no oracle present"),
            )
        })
    }

    pub fn norm_of(&self, v: &Vector) -> f64 {
        self.norm.of(v)
    }

    pub fn value_norm(&self, t: f64) -> f64 {
        self.norm_of(&self.eval(t))
    }

    /// The orbit `λ·u_x`, oracle included.
    pub fn scaled(&self, lambda: C64) -> Orbit {
        let eval = self.eval.clone();
        Orbit {
            dim: self.dim,
            domain_start: self.domain_start,
            norm: self.norm,
            eval: Arc::new(move |t| eval(t) * lambda),
            deriv: self
                .deriv
                .clone()
                .map(|d| -> DerivFn { Arc::new(move |k, t| d(k, t) * lambda) }),
        }
    }

    /// The orbit `u_x + u_y`; the oracle is kept only if both carry one.
    pub fn sum(&self, other: &Orbit) -> Result<Orbit> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: other.dim,
            });
        }
        let (a, b) = (self.eval.clone(), other.eval.clone());
        let deriv = match (&self.deriv, &other.deriv) {
            (Some(da), Some(db)) => {
                let (da, db) = (da.clone(), db.clone());
                Some(Arc::new(move |k, t| da(k, t) + db(k, t)) as DerivFn)
            }
            _ => None,
        };
        Ok(Orbit {
            dim: self.dim,
            domain_start: self.domain_start.max(other.domain_start),
            norm: self.norm,
            eval: Arc::new(move |t| a(t) + b(t)),
            deriv,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeroth_derivative_is_eval() {
        let o = Orbit::real(0.0, |t| t * t).with_real_oracle(|k, t| match k {
            0 => t * t,
            1 => 2.0 * t,
            2 => 2.0,
            _ => 0.0,
        });
        assert_eq!(o.derivative(0, 3.0), Some(o.eval(3.0)));
        assert_eq!(o.derivative(1, 3.0).unwrap()[0].re, 6.0);
    }

    #[test]
    fn extension_by_zero_below_domain_start() {
        let o = Orbit::real(1.0, |t| t.ln());
        assert_eq!(o.eval_extended(0.5)[0], C64::new(0.0, 0.0));
        assert_eq!(o.eval_extended(1.0)[0], C64::new(0.0, 0.0));
    }

    #[test]
    fn sum_and_scale_compose_pointwise() {
        let a = Orbit::real(0.0, |t| t);
        let b = Orbit::real(0.0, |t| 1.0 - t);
        let s = a.scaled(C64::new(0.0, 2.0)).sum(&b).unwrap();
        assert_eq!(s.eval(0.25)[0], C64::new(0.75, 0.5));
    }

    #[test]
    fn sup_norm_is_max_modulus() {
        let v = Vector::from_vec(vec![C64::new(3.0, 4.0), C64::new(1.0, 0.0)]);
        assert_eq!(VectorNorm::Sup.of(&v), 5.0);
        assert!((VectorNorm::Euclidean.of(&v) - 26f64.sqrt()).abs() < 1e-15);
    }
}
