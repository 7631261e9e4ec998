//! Monotone single-index regression.
//!
//! Estimates the direction `α` in `E[Y | X] = ψ(αᵀX)` for an unknown
//! nondecreasing link `ψ`, with four profile criteria:
//!
//! * **LSE** – least squares over isotonic fits,
//! * **SSE** – simple score equation built from the isotonic fit,
//! * **ESE** – efficient score equation, weighting by a kernel estimate of `ψ′`,
//! * **spline** – score equation built from a penalized smoothing spline.
//!
//! Population quantities (asymptotic covariances and population loss curves)
//! for the two reference models live in [`asymptotics`]; Monte Carlo studies
//! in [`simulation`].

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod estimators;
pub mod isotonic;
pub mod kernel;
pub mod quadrature;
pub mod rng;
pub mod simulation;
pub mod spline;

pub use asymptotics::{Model, Population};
pub use error::{Error, Result};
pub use estimators::{profile_fit, Dataset, EstimateResult, EstimatorKind, SearchOptions, UnitVector};
pub use isotonic::{fit_isotonic, MonotoneStepFunction, ScatterPoint};
pub use kernel::{Bandwidth, Kernel};
pub use spline::{fit_smoothing_spline, NaturalCubicSpline, PenaltyParameter};
