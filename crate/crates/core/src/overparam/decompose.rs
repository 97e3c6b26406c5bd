use serde::{Deserialize, Serialize};

use super::OverparamError;
use crate::arrays::Dataset;
use crate::boundary::Classifier;
use crate::hull::{membership_batch, Membership};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub count: usize,
    /// `None` for an empty group.
    pub accuracy: Option<f64>,
    /// Mean hull distance (upper estimate for unresolved points).
    pub mean_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralizationReport {
    pub overall: GroupStats,
    /// Test points inside the training hull.
    pub inside: GroupStats,
    /// Test points certified outside the training hull.
    pub outside: GroupStats,
    /// Test points whose membership could not be decided.
    pub unresolved: GroupStats,
}

fn stats(rows: &[(bool, f64)]) -> GroupStats {
    let count = rows.len();
    if count == 0 {
        return GroupStats {
            count,
            accuracy: None,
            mean_distance: None,
        };
    }
    let correct = rows.iter().filter(|r| r.0).count();
    GroupStats {
        count,
        accuracy: Some(correct as f64 / count as f64),
        mean_distance: Some(rows.iter().map(|r| r.1).sum::<f64>() / count as f64),
    }
}

/// Splits test accuracy into interpolation (inside the training hull) and
/// extrapolation (outside it) groups.
pub fn decompose_generalization<C: Classifier + ?Sized>(
    clf: &C,
    train: &Dataset,
    test: &Dataset,
    dist_tol: f64,
) -> Result<GeneralizationReport, OverparamError> {
    for d in [train.d(), test.d()] {
        if d != clf.input_dim() {
            return Err(OverparamError::DimensionMismatch {
                expected: clf.input_dim(),
                found: d,
            });
        }
    }
    let memberships = membership_batch(test.points(), train.points(), dist_tol)?;
    let mut all = Vec::with_capacity(test.n());
    let (mut inside, mut outside, mut unresolved) = (Vec::new(), Vec::new(), Vec::new());
    for (i, m) in memberships.iter().enumerate() {
        let ok = clf.classify(test.point(i)) == test.labels()[i];
        let row = (ok, m.distance());
        all.push(row);
        match m {
            Membership::InHull { .. } => inside.push(row),
            Membership::OutOfHull { .. } => outside.push(row),
            Membership::Indeterminate { .. } => unresolved.push(row),
        }
    }
    Ok(GeneralizationReport {
        overall: stats(&all),
        inside: stats(&inside),
        outside: stats(&outside),
        unresolved: stats(&unresolved),
    })
}
