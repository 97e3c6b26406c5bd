use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::BoundaryError;
use crate::arrays::Hypercube;
use crate::linalg::{norm, sub};

/// Perturbation length for local pairs, as a fraction of the box side.
const LOCAL_STEP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzEstimate {
    /// Largest observed `|map(x) - map(y)| / |x - y|`; a lower bound on the
    /// Lipschitz constant over the box.
    pub estimate: f64,
    pub pairs_evaluated: usize,
    /// Pairs dropped because the two points coincided.
    pub pairs_skipped: usize,
}

/// Empirical Lipschitz constant of `map` over `domain`.
///
/// Evaluates `n_pairs` uniform random pairs, `n_pairs` local pairs
/// `(x, x + h u)` with random unit `u`, and one local pair per hint direction.
pub fn lipschitz_estimate<F>(
    map: F,
    domain: &Hypercube,
    n_pairs: usize,
    seed: u64,
    hints: &[Vec<f64>],
) -> Result<LipschitzEstimate, BoundaryError>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    if n_pairs == 0 {
        return Err(BoundaryError::InvalidParameter("n_pairs must be at least 1".into()));
    }
    let d = domain.dim;
    for h in hints {
        if h.len() != d {
            return Err(BoundaryError::DimensionMismatch {
                expected: d,
                found: h.len(),
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let point = |rng: &mut ChaCha8Rng| -> Vec<f64> { (0..d).map(|_| rng.random_range(domain.lower..=domain.upper)).collect() };
    let step = LOCAL_STEP * domain.width();

    let mut pairs: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(2 * n_pairs + hints.len());
    for _ in 0..n_pairs {
        let x = point(&mut rng);
        let y = point(&mut rng);
        pairs.push((x, y));
    }
    let local = |rng: &mut ChaCha8Rng, u: &[f64]| -> Option<(Vec<f64>, Vec<f64>)> {
        let len = norm(u);
        if !(len > 0.0) || !len.is_finite() {
            return None;
        }
        let x = point(rng);
        let y = x.iter().zip(u).map(|(a, b)| a + step * b / len).collect();
        Some((x, y))
    };
    for _ in 0..n_pairs {
        let u: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        pairs.extend(local(&mut rng, &u));
    }
    for h in hints {
        pairs.extend(local(&mut rng, h));
    }

    let mut estimate = 0.0f64;
    let mut evaluated = 0;
    let mut skipped = 0;
    for (x, y) in &pairs {
        let gap = norm(&sub(x, y));
        if gap == 0.0 {
            skipped += 1;
            continue;
        }
        let ratio = norm(&sub(&map(x), &map(y))) / gap;
        evaluated += 1;
        if ratio.is_finite() {
            estimate = estimate.max(ratio);
        }
    }
    Ok(LipschitzEstimate {
        estimate,
        pairs_evaluated: evaluated,
        pairs_skipped: skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrays::Matrix;
    use crate::oracle::power_iteration;

    fn apply(a: &Matrix, x: &[f64]) -> Vec<f64> {
        a.iter_rows().map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
    }

    #[test]
    fn identity_and_scalar_maps() {
        let dom = Hypercube::symmetric_unit(3);
        let id = lipschitz_estimate(|x: &[f64]| x.to_vec(), &dom, 100, 1, &[]).unwrap();
        assert!(id.estimate <= 1.0 && id.estimate >= 1.0 - 1e-9);
        let one = Hypercube::symmetric_unit(1);
        let triple = lipschitz_estimate(|x: &[f64]| vec![3.0 * x[0]], &one, 50, 2, &[]).unwrap();
        assert!((triple.estimate - 3.0).abs() < 1e-9);
    }

    #[test]
    fn constant_map_has_zero_estimate() {
        let dom = Hypercube::symmetric_unit(2);
        let est = lipschitz_estimate(|_: &[f64]| vec![1.0], &dom, 10, 0, &[]).unwrap();
        assert_eq!(est.estimate, 0.0);
        assert_eq!(est.pairs_evaluated, 20);
    }

    #[test]
    fn zero_hint_is_ignored_and_zero_pairs_rejected() {
        let dom = Hypercube::symmetric_unit(2);
        let est = lipschitz_estimate(|x: &[f64]| x.to_vec(), &dom, 3, 0, &[vec![0.0, 0.0]]).unwrap();
        assert_eq!(est.pairs_evaluated + est.pairs_skipped, 6);
        assert!(lipschitz_estimate(|x: &[f64]| x.to_vec(), &dom, 0, 0, &[]).is_err());
    }

    #[test]
    fn linear_maps_bracketed_by_operator_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let d = rng.random_range(1..=16);
            let k = rng.random_range(1..=16);
            let a = Matrix::new(k, d, (0..k * d).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
            let (sigma, v) = power_iteration(&a, 100_000);
            let dom = Hypercube::symmetric_unit(d);
            let blind = lipschitz_estimate(|x: &[f64]| apply(&a, x), &dom, 50, rng.random(), &[]).unwrap();
            assert!(blind.estimate <= sigma * (1.0 + 1e-9), "{} > {sigma}", blind.estimate);
            let hinted = lipschitz_estimate(|x: &[f64]| apply(&a, x), &dom, 5, rng.random(), &[v]).unwrap();
            assert!(hinted.estimate >= 0.99 * sigma && hinted.estimate <= sigma * (1.0 + 1e-9));
        }
    }
}
