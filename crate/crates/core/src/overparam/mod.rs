//! Over-parameterisation certificates for small feed-forward classifiers.
//!
//! A model is over-parameterised when it still reaches a training loss of at
//! most `epsilon` after some of its parameters are eliminated (zeroed, frozen
//! and retrained from scratch). The search over eliminations is greedy and
//! budgeted, and a failure to train is only evidence, so "under" means "not
//! reached within budget". Choosing `epsilon` below the loss implied by a
//! separator's functional margin keeps the verdicts about separation rather
//! than calibration.

mod decompose;
mod mlp;
mod regime;
mod train;

pub use decompose::{decompose_generalization, GeneralizationReport, GroupStats};
pub use mlp::{Activation, Architecture, Mlp};
pub use regime::{classify_regime, unit_params, Attempt, Elimination, Evidence, Regime, RegimeCertificate, RegimeConfig};
pub use train::{eliminate_and_retrain, train, RestartRecord, TrainConfig, TrainResult, DEFAULT_EPSILON};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OverparamError {
    #[error("invalid architecture: {0}")]
    InvalidArchitecture(String),
    #[error("expected {expected} parameters, found {found}")]
    ParamCount { expected: usize, found: usize },
    #[error("degenerate architecture: layer {layer} has no active parameters")]
    DegenerateArchitecture { layer: usize },
    #[error("elimination removes no active parameter")]
    NoOpElimination,
    #[error("dataset is empty")]
    EmptyData,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("label out of range for {classes} classes")]
    LabelOutOfRange { classes: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Hull(#[from] crate::hull::HullError),
}
