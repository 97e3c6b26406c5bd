use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::probe::{nearest_boundary_estimate, NearestConfig};
use super::{BoundaryError, Classifier};
use crate::arrays::Matrix;
use crate::linalg::median;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosenessReport {
    /// Nearest-boundary estimates; probes that found nothing count as `max_radius`.
    pub clean_distances: Vec<f64>,
    pub perturbed_distances: Vec<f64>,
    pub median_clean: f64,
    pub median_perturbed: f64,
    /// Midpoint of the two medians.
    pub threshold: f64,
}

fn distances<C: Classifier + ?Sized>(clf: &C, points: &Matrix, cfg: &NearestConfig) -> Result<Vec<f64>, BoundaryError> {
    (0..points.rows())
        .into_par_iter()
        .map(|i| nearest_boundary_estimate(clf, points.row(i), cfg).map(|e| e.distance_or(cfg.max_radius)))
        .collect()
}

/// Compares boundary distances of clean points with those of their perturbed
/// counterparts.
pub fn closeness_report<C: Classifier + ?Sized>(
    clf: &C,
    clean: &Matrix,
    perturbed: &Matrix,
    cfg: &NearestConfig,
) -> Result<ClosenessReport, BoundaryError> {
    if clean.rows() == 0 || perturbed.rows() == 0 {
        return Err(BoundaryError::Empty);
    }
    if clean.rows() != perturbed.rows() {
        return Err(BoundaryError::CountMismatch {
            clean: clean.rows(),
            perturbed: perturbed.rows(),
        });
    }
    for m in [clean, perturbed] {
        if m.cols() != clf.input_dim() {
            return Err(BoundaryError::DimensionMismatch {
                expected: clf.input_dim(),
                found: m.cols(),
            });
        }
    }
    let clean_distances = distances(clf, clean, cfg)?;
    let perturbed_distances = distances(clf, perturbed, cfg)?;
    let median_clean = median(&clean_distances).expect("nonempty");
    let median_perturbed = median(&perturbed_distances).expect("nonempty");
    Ok(ClosenessReport {
        clean_distances,
        perturbed_distances,
        median_clean,
        median_perturbed,
        threshold: 0.5 * (median_clean + median_perturbed),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrays::{gaussian_blobs, Hypercube};
    use crate::boundary::{boundary_distance_along, LinearClassifier};

    fn setup() -> (LinearClassifier, Matrix, NearestConfig) {
        let clf = LinearClassifier::new(vec![1.0, 1.0], 0.0);
        let ds = gaussian_blobs(20, 2, &[vec![-1.5, -1.5], vec![1.5, 1.5]], 0.4, 3).unwrap();
        let cfg = NearestConfig::for_domain(&Hypercube::new(-4.0, 4.0, 2).unwrap(), 64, 5);
        (clf, ds.points().clone(), cfg)
    }

    #[test]
    fn walked_points_are_closer() {
        let (clf, clean, cfg) = setup();
        let mut walked = Vec::new();
        for p in clean.iter_rows() {
            // Walk toward the boundary along -w or +w, stopping just short of it.
            let toward: Vec<f64> = if clf.score(p) > 0.0 { vec![-1.0, -1.0] } else { vec![1.0, 1.0] };
            let probe = boundary_distance_along(&clf, p, &toward, cfg.max_radius, cfg.tol).unwrap();
            let r = probe.distance.unwrap() - 2.0 * cfg.tol;
            walked.push(p.iter().zip(&probe.direction).map(|(a, u)| a + r * u).collect::<Vec<f64>>());
        }
        let perturbed = Matrix::from_rows(&walked).unwrap();
        let report = closeness_report(&clf, &clean, &perturbed, &cfg).unwrap();
        assert!(report.median_perturbed < report.median_clean);
        assert!(report.threshold > report.median_perturbed && report.threshold < report.median_clean);
    }

    #[test]
    fn identical_sets_have_equal_medians() {
        let (clf, clean, cfg) = setup();
        let report = closeness_report(&clf, &clean, &clean, &cfg).unwrap();
        assert_eq!(report.median_clean, report.median_perturbed);
        assert_eq!(report.clean_distances, report.perturbed_distances);
    }

    #[test]
    fn bad_inputs() {
        let (clf, clean, cfg) = setup();
        let empty = Matrix::zeros(0, 2);
        assert!(matches!(closeness_report(&clf, &empty, &empty, &cfg), Err(BoundaryError::Empty)));
        let short = clean.select_rows(&[0, 1]);
        assert!(matches!(
            closeness_report(&clf, &clean, &short, &cfg),
            Err(BoundaryError::CountMismatch { .. })
        ));
        let wide = Matrix::zeros(clean.rows(), 3);
        assert!(closeness_report(&clf, &clean, &wide, &cfg).is_err());
    }

    #[test]
    fn json_fields() {
        let (clf, clean, cfg) = setup();
        let report = closeness_report(&clf, &clean, &clean, &cfg).unwrap();
        let v = serde_json::to_value(&report).unwrap();
        for key in ["clean_distances", "perturbed_distances", "median_clean", "median_perturbed", "threshold"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}
