//! Concrete operator functions with known regularity thresholds.
//!
//! * `MatrixPoly`: `u(t) = [[t², t], [0, 0]]`, not a semigroup.
//! * `MultiplicationC0`: `T(t)f(s) = f(s) e^{t a(s)}`, `a(s) = −ln(1 + s) + i s`,
//!   on a truncated logarithmic grid of `[0, s_max]`. `T^{(n)}(t)` is bounded iff `t ≥ n`.
//! * `NilpotentShift`: right shift by `⌊t/Δ⌋` cells on `[0, 1]`, zero for `t ≥ 1`.
//!   The semigroup law is exact on the lattice `Δ·ℕ`.
//! * `DiagonalAnalytic`, `DenseMatrixExp`, `JordanNilpotentExp`: matrix exponentials `e^{tA}`.
//!
//! Bárta's semigroup on bounded uniformly continuous functions is not modelled.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{ComplexValue, Operator, OperatorFunction, OperatorRep, SpatialGrid, C64};
use crate::numeric::{binomial, factorial, ls_slope};

pub const GROWTH_GRID_POINTS: usize = 200_000;
pub const GROWTH_GRID_MAX: f64 = 1e6;
pub const DEFAULT_SHIFT_STEP: f64 = 1.0 / 64.0;

fn default_s_max() -> f64 {
    1e6
}

fn default_points() -> usize {
    256
}

fn default_step() -> f64 {
    DEFAULT_SHIFT_STEP
}

fn default_jordan_dim() -> usize {
    4
}

/// Example name plus its parameter document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", content = "params", deny_unknown_fields)]
pub enum ExampleSpec {
    MatrixPoly,
    MultiplicationC0 {
        #[serde(default = "default_s_max")]
        s_max: f64,
        #[serde(default = "default_points")]
        points: usize,
    },
    NilpotentShift {
        #[serde(default = "default_step")]
        delta: f64,
    },
    DiagonalAnalytic {
        lambdas: Vec<ComplexValue>,
    },
    DenseMatrixExp {
        /// Row-major square matrix.
        matrix: Vec<Vec<ComplexValue>>,
    },
    JordanNilpotentExp {
        #[serde(default = "default_jordan_dim")]
        dim: usize,
        #[serde(default)]
        lambda: Option<ComplexValue>,
    },
}

impl ExampleSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ExampleSpec::MatrixPoly => "MatrixPoly",
            ExampleSpec::MultiplicationC0 { .. } => "MultiplicationC0",
            ExampleSpec::NilpotentShift { .. } => "NilpotentShift",
            ExampleSpec::DiagonalAnalytic { .. } => "DiagonalAnalytic",
            ExampleSpec::DenseMatrixExp { .. } => "DenseMatrixExp",
            ExampleSpec::JordanNilpotentExp { .. } => "JordanNilpotentExp",
        }
    }

    /// Time lattice on which the semigroup law is exact, for discretized examples.
    pub fn time_lattice(&self) -> Option<f64> {
        match self {
            ExampleSpec::NilpotentShift { delta } => Some(*delta),
            _ => None,
        }
    }

    /// `e^{zA}` for the matrix exponentials, `e^{z a(s_j)}` for the multiplier.
    pub fn closed_form(&self, z: C64) -> Result<Option<Operator>> {
        Ok(match self {
            ExampleSpec::DiagonalAnalytic { lambdas } => {
                Some(Operator::Diagonal(DVector::from_iterator(
                    lambdas.len(),
                    lambdas.iter().map(|&l| (C64::from(l) * z).exp()),
                )))
            }
            ExampleSpec::DenseMatrixExp { matrix } => {
                Some(Operator::Dense((dense_matrix(matrix)? * z).exp()))
            }
            ExampleSpec::JordanNilpotentExp { dim, lambda } => Some(Operator::Dense(
                jordan_derivative(*dim, lambda.map(C64::from), 0, z),
            )),
            ExampleSpec::MultiplicationC0 { s_max, points } => {
                let grid = SpatialGrid::logarithmic(*s_max, *points)?;
                Some(Operator::Diagonal(DVector::from_iterator(
                    grid.len(),
                    grid.points.iter().map(|&s| (symbol(s) * z).exp()),
                )))
            }
            _ => None,
        })
    }
}

/// `a(s) = −ln(1 + s) + i s`.
pub fn symbol(s: f64) -> C64 {
    C64::new(-s.ln_1p(), s)
}

fn dense_matrix(rows: &[Vec<ComplexValue>]) -> Result<DMatrix<C64>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::config("matrix", "empty matrix"));
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::config(
            "matrix",
            format!(
                "matrix must be square: {n} rows but a row of length {}",
                bad.len()
            ),
        ));
    }
    if rows
        .iter()
        .flatten()
        .any(|z| !(z.re.is_finite() && z.im.is_finite()))
    {
        return Err(Error::config("matrix", "entries must be finite"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j].into()))
}

/// `d^k/dz^k e^{z(λI + N)}`: entry `(i, i+m)` is
/// `e^{λz} Σ_{j ≤ min(k, m)} C(k, j) λ^{k−j} z^{m−j}/(m−j)!`.
fn jordan_derivative(dim: usize, lambda: Option<C64>, k: usize, z: C64) -> DMatrix<C64> {
    let lambda = lambda.unwrap_or(C64::new(0.0, 0.0));
    let growth = (lambda * z).exp();
    let entry = |m: usize| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..=k.min(m) {
            let lam_pow = if k == j {
                C64::new(1.0, 0.0)
            } else {
                lambda.powu((k - j) as u32)
            };
            let z_pow = if m == j {
                C64::new(1.0, 0.0)
            } else {
                z.powu((m - j) as u32)
            };
            acc += lam_pow * z_pow * (binomial(k, j) / factorial(m - j));
        }
        acc * growth
    };
    DMatrix::from_fn(dim, dim, |i, j| {
        if j >= i {
            entry(j - i)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

fn shift_amount(t: f64, cells: usize) -> usize {
    let m = (t * cells as f64 + 1e-9).floor();
    if m <= 0.0 {
        0
    } else {
        (m as usize).min(cells)
    }
}

pub fn make_example(spec: &ExampleSpec) -> Result<OperatorFunction> {
    Ok(match spec {
        ExampleSpec::MatrixPoly => {
            let poly = |k: usize, t: f64| -> Operator {
                let (a, b) = match k {
                    0 => (t * t, t),
                    1 => (2.0 * t, 1.0),
                    2 => (2.0, 0.0),
                    _ => (0.0, 0.0),
                };
                Operator::Dense(DMatrix::from_row_slice(
                    2,
                    2,
                    &[
                        C64::new(a, 0.0),
                        C64::new(b, 0.0),
                        C64::new(0.0, 0.0),
                        C64::new(0.0, 0.0),
                    ],
                ))
            };
            OperatorFunction::new(
                "MatrixPoly",
                OperatorRep::DenseMatrix { dim: 2 },
                move |t| poly(0, t),
            )
            .with_oracle(poly)
        }
        ExampleSpec::MultiplicationC0 { s_max, points } => {
            let grid = SpatialGrid::logarithmic(*s_max, *points)?;
            let a: Vec<C64> = grid.points.iter().map(|&s| symbol(s)).collect();
            let a_deriv = a.clone();
            OperatorFunction::new(
                "MultiplicationC0",
                OperatorRep::DiagonalMultiplier { grid },
                move |t| {
                    Operator::Diagonal(DVector::from_iterator(
                        a.len(),
                        a.iter().map(|&x| (x * t).exp()),
                    ))
                },
            )
            .with_oracle(move |k, t| {
                Operator::Diagonal(DVector::from_iterator(
                    a_deriv.len(),
                    a_deriv.iter().map(|&x| x.powu(k as u32) * (x * t).exp()),
                ))
            })
        }
        ExampleSpec::NilpotentShift { delta } => {
            let inv = 1.0 / delta;
            if !(*delta > 0.0 && *delta <= 1.0) || (inv - inv.round()).abs() > 1e-9 {
                return Err(Error::config(
                    "delta",
                    format!("grid step must divide 1, got {delta}"),
                ));
            }
            let cells = inv.round() as usize;
            OperatorFunction::new(
                "NilpotentShift",
                OperatorRep::DenseMatrix { dim: cells },
                move |t| {
                    let m = shift_amount(t, cells);
                    Operator::Dense(DMatrix::from_fn(cells, cells, |i, j| {
                        if i == j + m {
                            C64::new(1.0, 0.0)
                        } else {
                            C64::new(0.0, 0.0)
                        }
                    }))
                },
            )
        }
        ExampleSpec::DiagonalAnalytic { lambdas } => {
            if lambdas.is_empty() {
                return Err(Error::config(
                    "lambdas",
                    "at least one eigenvalue is needed",
                ));
            }
            if let Some(l) = lambdas.iter().find(|l| !(l.re < 0.0 && l.im.is_finite())) {
                return Err(Error::config(
                    "lambdas",
                    format!("eigenvalues need Re λ < 0, got {} + {}i", l.re, l.im),
                ));
            }
            let l: Vec<C64> = lambdas.iter().map(|&z| z.into()).collect();
            let l_deriv = l.clone();
            OperatorFunction::new(
                "DiagonalAnalytic",
                OperatorRep::DenseMatrix { dim: l.len() },
                move |t| {
                    Operator::Diagonal(DVector::from_iterator(
                        l.len(),
                        l.iter().map(|&x| (x * t).exp()),
                    ))
                },
            )
            .with_oracle(move |k, t| {
                Operator::Diagonal(DVector::from_iterator(
                    l_deriv.len(),
                    l_deriv.iter().map(|&x| x.powu(k as u32) * (x * t).exp()),
                ))
            })
        }
        ExampleSpec::DenseMatrixExp { matrix } => {
            let a = dense_matrix(matrix)?;
            let n = a.nrows();
            let a_eval = a.clone();
            OperatorFunction::new(
                "DenseMatrixExp",
                OperatorRep::DenseMatrix { dim: n },
                move |t| Operator::Dense((&a_eval * C64::new(t, 0.0)).exp()),
            )
            .with_oracle(move |k, t| {
                let mut m = (&a * C64::new(t, 0.0)).exp();
                for _ in 0..k {
                    m = &a * m;
                }
                Operator::Dense(m)
            })
        }
        ExampleSpec::JordanNilpotentExp { dim, lambda } => {
            if *dim == 0 {
                return Err(Error::config("dim", "dimension must be positive"));
            }
            let (dim, lambda) = (*dim, lambda.map(C64::from));
            OperatorFunction::new(
                "JordanNilpotentExp",
                OperatorRep::DenseMatrix { dim },
                move |t| Operator::Dense(jordan_derivative(dim, lambda, 0, C64::new(t, 0.0))),
            )
            .with_oracle(move |k, t| {
                Operator::Dense(jordan_derivative(dim, lambda, k, C64::new(t, 0.0)))
            })
        }
    })
}

/// Growth of `sup_{0 ≤ s ≤ S} |a(s)|^n (1 + s)^{−t}` along a ladder of `S`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthScan {
    pub n: u32,
    pub t: f64,
    /// `(S, ln sup)` per ladder entry.
    pub log_sups: Vec<(f64, f64)>,
    /// Least-squares slope of `ln sup` against `ln S`.
    pub slope: f64,
}

pub fn growth_scan(n: u32, t: f64, ladder: &[f64]) -> Result<GrowthScan> {
    growth_scan_with(n, t, ladder, GROWTH_GRID_POINTS)
}

pub fn growth_scan_with(n: u32, t: f64, ladder: &[f64], points: usize) -> Result<GrowthScan> {
    if ladder.len() < 3 {
        return Err(Error::config(
            "ladder",
            "at least three ladder entries are needed",
        ));
    }
    if ladder.iter().any(|&s| !(s > 0.0 && s.is_finite()))
        || ladder.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::config(
            "ladder",
            "entries must be positive, finite and increasing",
        ));
    }
    if !t.is_finite() {
        return Err(Error::config("t", "time must be finite"));
    }
    let s_max = GROWTH_GRID_MAX.max(ladder[ladder.len() - 1]);
    let grid = SpatialGrid::logarithmic(s_max, points)?;
    let log_terms: Vec<f64> = grid
        .points
        .par_iter()
        .map(|&s| 0.5 * n as f64 * symbol(s).norm_sqr().ln() - t * s.ln_1p())
        .collect();
    let log_sups: Vec<(f64, f64)> = ladder
        .par_iter()
        .map(|&cap| {
            let end = grid.points.partition_point(|&s| s <= cap);
            let sup = log_terms[..end]
                .iter()
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max);
            (cap, sup)
        })
        .collect();
    let x: Vec<f64> = log_sups.iter().map(|(s, _)| s.ln()).collect();
    let y: Vec<f64> = log_sups.iter().map(|(_, v)| *v).collect();
    Ok(GrowthScan {
        n,
        t,
        slope: ls_slope(&x, &y),
        log_sups,
    })
}
