//! Decision-boundary geometry for black-box classifiers.
//!
//! Probes only evaluate labels: a ray is expanded by doubling until the label
//! changes and then bisected. Nearest-boundary distances are minima over many
//! rays, so they are upper bounds on the true distance (up to the bisection
//! tolerance). Lipschitz estimates are maxima over sampled pairs, so they are
//! lower bounds on the true constant.

mod closeness;
mod lipschitz;
mod probe;

pub use closeness::{closeness_report, ClosenessReport};
pub use lipschitz::{lipschitz_estimate, LipschitzEstimate};
pub use probe::{boundary_distance_along, nearest_boundary_estimate, BoundaryProbe, NearestConfig, NearestEstimate};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::dot;
use crate::polyclass::PolynomialSurface;

#[derive(Debug, Error)]
pub enum BoundaryError {
    #[error("direction must be a nonzero finite vector")]
    ZeroDirection,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("no points given")]
    Empty,
    #[error("clean and perturbed sets differ in size ({clean} vs {perturbed})")]
    CountMismatch { clean: usize, perturbed: usize },
}

/// Deterministic map from points to class labels, safe to share across threads.
pub trait Classifier: Sync {
    fn input_dim(&self) -> usize;
    fn classify(&self, x: &[f64]) -> usize;
}

/// Label 0 where `w . x + b > 0`, label 1 elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearClassifier {
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LinearClassifier {
    pub fn new(weights: Vec<f64>, bias: f64) -> Self {
        Self { weights, bias }
    }

    pub fn score(&self, x: &[f64]) -> f64 {
        dot(&self.weights, x) + self.bias
    }

    /// Euclidean distance from `x` to the separating hyperplane.
    pub fn distance(&self, x: &[f64]) -> f64 {
        self.score(x).abs() / dot(&self.weights, &self.weights).sqrt()
    }
}

impl Classifier for LinearClassifier {
    fn input_dim(&self) -> usize {
        self.weights.len()
    }

    fn classify(&self, x: &[f64]) -> usize {
        usize::from(self.score(x) <= 0.0)
    }
}

/// Same sign convention as fitted separators: positive side is label 0.
impl Classifier for PolynomialSurface {
    fn input_dim(&self) -> usize {
        self.dim()
    }

    fn classify(&self, x: &[f64]) -> usize {
        usize::from(self.eval(x) <= 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrays::Hypercube;

    #[test]
    fn sign_conventions() {
        let lin = LinearClassifier::new(vec![1.0, 0.0], 0.0);
        assert_eq!(lin.classify(&[0.5, 3.0]), 0);
        assert_eq!(lin.classify(&[-0.5, 3.0]), 1);
        assert_eq!(lin.distance(&[-2.0, 7.0]), 2.0);

        let circle =
            PolynomialSurface::from_terms(Hypercube::symmetric_unit(2), 2, &[(&[2, 0], 1.0), (&[0, 2], 1.0), (&[0, 0], -1.0)])
                .unwrap();
        assert_eq!(circle.classify(&[0.0, 0.0]), 1);
        assert_eq!(circle.classify(&[1.5, 0.0]), 0);
    }
}
