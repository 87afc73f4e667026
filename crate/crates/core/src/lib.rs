//! Numerical toolkit for eventual regularity of operator-valued functions.
//!
//! The crate measures, at desk scale, the thresholds after which an
//! operator-valued function `u: [0, ∞) → L(X)` (or its orbits `t ↦ u(t)x`)
//! becomes bounded, Hölder, of bounded variation, differentiable, smooth or
//! real analytic. Every regularity class is expressed through an extended
//! seminorm whose value is reported as an [`ExtRealVerdict`]: finite, or a
//! certified divergence with a measured growth exponent.
//!
//! Module map:
//!
//! * [`kernel`]: orbits, operator functions, time windows, verdicts.
//! * [`seminorm`]: sup, Hölder, uniform-continuity, variation and
//!   absolute-continuity seminorms.
//! * [`finitediff`]: order-k difference quotients and derivative estimates.
//! * [`mollifier`]: Friedrichs mollifiers and the smoothness probe.
//! * [`analytic`]: Cauchy estimates, analyticity radii, truncated series.
//! * [`holoext`]: the holomorphy domain of a semigroup and off-axis evaluation.
//! * [`gallery`]: concrete example families with derivative oracles.
//! * [`classify`]: individual and uniform eventual-regularity thresholds.
//! * [`cli`]: the `reg` command-line front end and its config format.

pub mod analytic;
pub mod classify;
pub mod cli;
pub mod error;
pub mod finitediff;
pub mod gallery;
pub mod holoext;
pub mod kernel;
pub mod mollifier;
pub mod numeric;
pub mod seminorm;

pub use error::{Error, Result};
pub use kernel::{
    ExtRealVerdict, Operator, OperatorFunction, OperatorRep, Orbit, Resolution, SpatialGrid,
    TimeWindow, VerdictKind, C64,
};
