use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::orbit::{Orbit, VectorNorm};
use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Vector = DVector<C64>;

const POWER_TOL: f64 = 1e-12;
const POWER_MAX_ITER: usize = 10_000;

/// A bounded operator on a finite-dimensional or grid-discretized space.
#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    Dense(DMatrix<C64>),
    /// Multiplication by the listed symbol values, one per grid point.
    Diagonal(DVector<C64>),
}

impl Operator {
    pub fn identity(dim: usize) -> Self {
        Operator::Dense(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Operator::Dense(DMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        match self {
            Operator::Dense(m) => m.nrows(),
            Operator::Diagonal(d) => d.len(),
        }
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        Ok(match self {
            Operator::Dense(m) => m * x,
            Operator::Diagonal(d) => d.component_mul(x),
        })
    }

    /// `self · rhs`.
    pub fn compose(&self, rhs: &Operator) -> Operator {
        match (self, rhs) {
            (Operator::Diagonal(a), Operator::Diagonal(b)) => {
                Operator::Diagonal(a.component_mul(b))
            }
            _ => Operator::Dense(self.to_dense() * rhs.to_dense()),
        }
    }

    pub fn sub(&self, rhs: &Operator) -> Operator {
        match (self, rhs) {
            (Operator::Diagonal(a), Operator::Diagonal(b)) => Operator::Diagonal(a - b),
            _ => Operator::Dense(self.to_dense() - rhs.to_dense()),
        }
    }

    pub fn add(&self, rhs: &Operator) -> Operator {
        match (self, rhs) {
            (Operator::Diagonal(a), Operator::Diagonal(b)) => Operator::Diagonal(a + b),
            _ => Operator::Dense(self.to_dense() + rhs.to_dense()),
        }
    }

    pub fn scale(&self, c: C64) -> Operator {
        match self {
            Operator::Dense(m) => Operator::Dense(m * c),
            Operator::Diagonal(d) => Operator::Diagonal(d * c),
        }
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        match self {
            Operator::Dense(m) => m.clone(),
            Operator::Diagonal(d) => DMatrix::from_diagonal(d),
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        match self {
            Operator::Dense(m) => m[(i, j)],
            Operator::Diagonal(d) => {
                if i == j {
                    d[i]
                } else {
                    C64::new(0.0, 0.0)
                }
            }
        }
    }

    /// Largest absolute entry difference, used for entrywise comparisons.
    pub fn max_entry_diff(&self, other: &Operator) -> f64 {
        match (self, other) {
            (Operator::Diagonal(a), Operator::Diagonal(b)) => a
                .iter()
                .zip(b.iter())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max),
            _ => {
                let d = self.to_dense() - other.to_dense();
                d.iter().map(|z| z.norm()).fold(0.0, f64::max)
            }
        }
    }

    /// Operator norm: spectral norm for dense matrices (power iteration on
    /// `M*M`), max modulus for multipliers.
    pub fn norm(&self) -> f64 {
        match self {
            Operator::Diagonal(d) => d.iter().map(|z| z.norm()).fold(0.0, f64::max),
            Operator::Dense(m) => spectral_norm(m),
        }
    }
}

/// Largest singular value by power iteration on `M*M`.
pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    let n = m.ncols();
    if n == 0 || m.iter().all(|z| *z == C64::new(0.0, 0.0)) {
        return 0.0;
    }
    let gram = m.adjoint() * m;
    // Deterministic start with no special alignment to coordinate axes.
    let mut v = DVector::from_fn(n, |j, _| {
        C64::new(1.0 + 0.37 * j as f64, 0.11 * (j as f64 + 1.0))
    });
    v /= C64::from(v.norm());
    let mut estimate = 0.0;
    for _ in 0..POWER_MAX_ITER {
        let w = &gram * &v;
        let w_norm = w.norm();
        if w_norm == 0.0 {
            // Start vector in the kernel; fall back to the column with the largest norm.
            let (j, _) = (0..n)
                .map(|j| (j, m.column(j).norm()))
                .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            v = DVector::from_fn(n, |i, _| {
                if i == j {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            continue;
        }
        let rayleigh = v.dotc(&w).re;
        v = w / C64::from(w_norm);
        if (rayleigh - estimate).abs() <= POWER_TOL * rayleigh.abs() {
            estimate = rayleigh;
            break;
        }
        estimate = rayleigh;
    }
    // The Rayleigh quotient converges to the top eigenvalue of M*M.
    let final_rq = v.dotc(&(&gram * &v)).re;
    final_rq.max(estimate).max(0.0).sqrt()
}

/// Discretization of the half-line `[0, s_max]` for multiplication operators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    pub s_max: f64,
    pub spacing: Spacing,
    pub points: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Uniform,
    Logarithmic,
}

impl SpatialGrid {
    pub fn new(s_max: f64, n: usize, spacing: Spacing) -> Result<Self> {
        if !(s_max.is_finite() && s_max > 0.0) {
            return Err(Error::config(
                "grid.s_max",
                "must be a finite positive real",
            ));
        }
        if n < 2 {
            return Err(Error::config("grid.points", "need at least two points"));
        }
        let last = (n - 1) as f64;
        let points = match spacing {
            Spacing::Uniform => (0..n).map(|i| s_max * i as f64 / last).collect(),
            Spacing::Logarithmic => {
                let span = s_max.ln_1p();
                (0..n).map(|i| (span * i as f64 / last).exp_m1()).collect()
            }
        };
        Ok(SpatialGrid {
            s_max,
            spacing,
            points,
        })
    }

    pub fn uniform(s_max: f64, n: usize) -> Result<Self> {
        Self::new(s_max, n, Spacing::Uniform)
    }

    pub fn logarithmic(s_max: f64, n: usize) -> Result<Self> {
        Self::new(s_max, n, Spacing::Logarithmic)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorRep {
    DenseMatrix { dim: usize },
    DiagonalMultiplier { grid: SpatialGrid },
}

pub type OperatorEval = Arc<dyn Fn(f64) -> Operator + Send + Sync>;
pub type OperatorDeriv = Arc<dyn Fn(usize, f64) -> Operator + Send + Sync>;

/// An evaluable map `t ↦ u(t)` with an optional derivative oracle `(k, t) ↦ u^{(k)}(t)`.
#[derive(Clone)]
pub struct OperatorFunction {
    pub name: String,
    pub rep: OperatorRep,
    eval: OperatorEval,
    deriv: Option<OperatorDeriv>,
}

impl fmt::Debug for OperatorFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorFunction")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("has_oracle", &self.deriv.is_some())
            .finish()
    }
}

impl OperatorFunction {
    pub fn new(
        name: impl Into<String>,
        rep: OperatorRep,
        eval: impl Fn(f64) -> Operator + Send + Sync + 'static,
    ) -> Self {
        OperatorFunction {
            name: name.into(),
            rep,
            eval: Arc::new(eval),
            deriv: None,
        }
    }

    pub fn with_oracle(
        mut self,
        deriv: impl Fn(usize, f64) -> Operator + Send + Sync + 'static,
    ) -> Self {
        self.deriv = Some(Arc::new(deriv));
        self
    }

    pub fn dim(&self) -> usize {
        match &self.rep {
            OperatorRep::DenseMatrix { dim } => *dim,
            OperatorRep::DiagonalMultiplier { grid } => grid.len(),
        }
    }

    pub fn eval(&self, t: f64) -> Operator {
        (self.eval)(t)
    }

    pub fn has_oracle(&self) -> bool {
        self.deriv.is_some()
    }

    /// `u^{(k)}(t)` from the oracle; `k = 0` falls back to `eval`.
    pub fn derivative(&self, k: usize, t: f64) -> Option<Operator> {
        if k == 0 {
            return Some(self.eval(t));
        }
        self.deriv.as_ref().map(|d| d(k, t))
    }

    fn vector_norm(&self) -> VectorNorm {
        match self.rep {
            OperatorRep::DenseMatrix { .. } => VectorNorm::Euclidean,
            OperatorRep::DiagonalMultiplier { .. } => VectorNorm::Sup,
        }
    }

    /// The orbit `t ↦ u(t)x`.
    pub fn orbit(&self, x: Vector) -> Result<Orbit> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        let eval = self.eval.clone();
        let x = Arc::new(x);
        let xe = x.clone();
        let mut orbit = Orbit::new(self.dim(), 0.0, move |t| {
            eval(t)
                .apply(&xe)
                .expect("dimension checked at construction")
        })
        .with_norm(self.vector_norm());
        if let Some(deriv) = self.deriv.clone() {
            let eval = self.eval.clone();
            orbit = orbit.with_oracle(move |k, t| {
                let op = if k == 0 { eval(t) } else { deriv(k, t) };
                op.apply(&x).expect("dimension checked at construction")
            });
        }
        Ok(orbit)
    }

    pub fn basis_vector(&self, j: usize) -> Vector {
        let mut e = Vector::zeros(self.dim());
        e[j] = C64::new(1.0, 0.0);
        e
    }
}

/// `eval_orbit`: `u(t)x` with a dimension check.
pub fn eval_orbit(f: &OperatorFunction, x: &Vector, t: f64) -> Result<Vector> {
    if !(t >= 0.0) {
        return Err(Error::config("t", format!("time must be ≥ 0, got {t}")));
    }
    f.eval(t).apply(x)
}
