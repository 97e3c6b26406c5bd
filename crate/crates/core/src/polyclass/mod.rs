//! Polynomial partitions of hypercube domains.
//!
//! Separators are fitted by ridge least squares in a scaled monomial basis.
//! Epsilon-equality is certified by seeded sampling over a box or a hull. The
//! extension constructions build higher-degree polynomials that agree with a
//! given one inside a hull while deviating by prescribed amounts outside it.
//!
//! Sampling certificates are reproducible and falsifiable (every witness can be
//! re-evaluated), but they are not proofs of a sup-norm bound.

mod certify;
mod extend;
mod fit;
mod surface;

pub use certify::{
    epsilon_equal, lemma2_check, EpsilonCertificate, Lemma2Entry, Lemma2Report, Region, RegionSampler, RegionSummary,
    Verdict, DEFAULT_SAMPLES,
};
pub use extend::{
    lemma1_gap, lemma1_gap_curve, lemma3_extensions, Anchor, ExtensionConfig, ExtensionFamily, PairWitness, DISTINCT_FACTOR,
};
pub use fit::{functional_margin, fit_separator, minimal_degree_separator, separates, SeparatorFit, DEFAULT_RIDGE};
pub use surface::{basis_len, graded_lex, MultiIndex, PolynomialSurface};

use thiserror::Error;

use crate::linalg::LinalgError;

/// Relative singular-value cutoff for every least-squares solve in this module.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("expected {expected} coefficients, found {found}")]
    CoefficientCount { expected: usize, found: usize },
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("monomial {0:?} is not in the basis")]
    UnknownMonomial(Vec<u32>),
    #[error("surfaces live on different domains")]
    DomainMismatch,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point set {0} is empty")]
    EmptyPointSet(&'static str),
    #[error("normal system is rank deficient (rank {rank} < {unknowns} unknowns); use ridge > 0")]
    RankDeficient { rank: usize, unknowns: usize },
    #[error("margin undefined for non-separator")]
    NotSeparator,
    #[error("precondition of Lemma 2 violated: epsilon {epsilon} >= margin {margin}")]
    EpsilonAboveMargin { epsilon: f64, margin: f64 },
    #[error("anchor {index} lies inside the hull but its target {target} is not below epsilon")]
    AnchorInsideHull { index: usize, target: f64 },
    #[error("infeasible constraints: {0}")]
    Infeasible(#[from] LinalgError),
    #[error("degree too small: inside deviation {achieved:.3e} does not stay below epsilon {epsilon:.3e}")]
    InsufficientDegree { achieved: f64, epsilon: f64 },
    #[error("anchor {index} deviation {achieved} misses target {target}")]
    AnchorMissed { index: usize, achieved: f64, target: f64 },
    #[error("members {i} and {j} could not be separated by a witness")]
    NotDistinct { i: usize, j: usize },
    #[error(transparent)]
    Array(#[from] crate::arrays::ArrayError),
    #[error(transparent)]
    Hull(#[from] crate::hull::HullError),
}
