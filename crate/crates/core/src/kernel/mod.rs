//! Shared representations: time windows, orbits, operator functions and
//! extended-real verdicts.

pub mod extfloat;
mod operator;
mod orbit;
mod verdict;
mod window;

use serde::{Deserialize, Serialize};

pub use operator::{
    eval_orbit, spectral_norm, Operator, OperatorFunction, OperatorRep, Spacing, SpatialGrid,
    Vector, C64,
};
pub use orbit::{Orbit, VectorNorm};
pub use verdict::{ExtRealVerdict, VerdictKind, VerdictPolicy};
pub use window::{sample_levels, Resolution, SampleLevel, TimeWindow};

use crate::error::{Error, Result};
use crate::finitediff::{derivative_estimate, DerivativeEstimate};

/// Serialized form of a complex scalar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl From<C64> for ComplexValue {
    fn from(z: C64) -> Self {
        ComplexValue { re: z.re, im: z.im }
    }
}

impl From<ComplexValue> for C64 {
    fn from(z: ComplexValue) -> Self {
        C64::new(z.re, z.im)
    }
}

/// Default base step of numerical derivative estimates used to assemble
/// `u^{(k)}(t)` when no oracle is present.
pub const ASSEMBLY_STEP: f64 = 1.0 / 16.0;
pub const ASSEMBLY_LEVELS: usize = 8;

/// `u^{(k)}(t)` assembled columnwise from the derivatives of the basis orbits.
///
/// Uses the oracle when present, otherwise a Richardson derivative estimate of
/// each basis orbit; a failed estimate aborts with its trace.
pub fn assemble_derivative_operator(f: &OperatorFunction, k: usize, t: f64) -> Result<Operator> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::config(
            "t",
            format!("time must be finite and ≥ 0, got {t}"),
        ));
    }
    if let Some(op) = f.derivative(k, t) {
        return Ok(op);
    }
    let d = f.dim();
    let mut m = nalgebra::DMatrix::<C64>::zeros(d, d);
    for j in 0..d {
        let orbit = f.orbit(f.basis_vector(j))?;
        let DerivativeEstimate { value, .. } =
            derivative_estimate(&orbit, t, k, ASSEMBLY_STEP, ASSEMBLY_LEVELS)?;
        m.set_column(j, &value);
    }
    Ok(match f.rep {
        OperatorRep::DiagonalMultiplier { .. } => Operator::Diagonal(m.diagonal()),
        OperatorRep::DenseMatrix { .. } => Operator::Dense(m),
    })
}
