//! Executable geometry of extrapolation for classifiers.
//!
//! * [`arrays`]: datasets, hypercube domains, CSV and HSM1 I/O, synthetic generators.
//! * [`hull`]: convex-hull projection, membership certificates and extrapolation reports.
//! * [`polyclass`]: polynomial separators, epsilon-equality and the extension constructions.
//! * [`boundary`]: black-box decision-boundary probes and Lipschitz estimates.
//! * [`overparam`]: small MLPs, parameter elimination and regime certificates.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arrays;
pub mod boundary;
pub mod hull;
pub mod linalg;
pub mod overparam;
pub mod polyclass;

#[cfg(any(test, feature = "oracles"))]
pub mod oracle;

pub use arrays::{Dataset, Hypercube, Matrix};
