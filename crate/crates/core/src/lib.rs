//! Numerical laboratory for the maximal operator on Carleson curves with
//! oscillating weights and variable exponents.
//!
//! The crate is organised bottom-up:
//!
//! * [`curve`]: sampled curves, generators, portions and Carleson estimates
//! * [`argbranch`]: continuous argument branches and log-space weights
//! * [`submult`]: submultiplicative majorants and their indices
//! * [`norms`]: variable exponents, Luxemburg norms, the `A_p` estimator
//! * [`maximal`]: the (weighted) maximal operator and the arc decomposition
//! * [`criteria`]: boundedness predicates
//! * [`harness`]: experiment configuration, probes, sweeps and reports
//!
//! Hot loops run through [`Execution`], which fans out with rayon when the
//! `parallel` feature is enabled and otherwise runs sequentially.

pub mod argbranch;
pub mod criteria;
pub mod curve;
pub mod error;
pub mod exec;
pub mod harness;
pub mod maximal;
pub mod norms;
pub mod submult;

pub use num_complex::Complex64 as C64;

pub use argbranch::{eta, phi, power_weight, unwrap_arg, ArgBranch, Weight, WeightKind};
pub use criteria::{Classification, Verdict};
pub use curve::{Curve, Grading, Portion};
pub use error::{Error, Result};
pub use exec::Execution;
pub use maximal::MaximalResult;
pub use norms::{ExponentField, ExponentKind};
pub use submult::{IndexPair, SubmultSamples};
