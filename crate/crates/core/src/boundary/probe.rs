use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{BoundaryError, Classifier};
use crate::arrays::Hypercube;
use crate::linalg::norm;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryProbe {
    pub origin: Vec<f64>,
    /// Unit direction.
    pub direction: Vec<f64>,
    /// Midpoint of the final bracket; `None` when no label change was seen
    /// within `max_radius`.
    pub distance: Option<f64>,
    pub max_radius: f64,
    pub bracket_width: f64,
    pub origin_label: usize,
    /// Label just past the boundary, if one was found.
    pub far_label: Option<usize>,
}

fn at(origin: &[f64], direction: &[f64], r: f64) -> Vec<f64> {
    origin.iter().zip(direction).map(|(o, u)| o + r * u).collect()
}

fn check_dims<C: Classifier + ?Sized>(clf: &C, x: &[f64]) -> Result<(), BoundaryError> {
    if x.len() != clf.input_dim() {
        return Err(BoundaryError::DimensionMismatch {
            expected: clf.input_dim(),
            found: x.len(),
        });
    }
    Ok(())
}

fn check_radius(max_radius: f64, tol: f64) -> Result<(), BoundaryError> {
    if !(max_radius > 0.0) || !max_radius.is_finite() {
        return Err(BoundaryError::InvalidParameter(format!("max_radius must be > 0, got {max_radius}")));
    }
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(BoundaryError::InvalidParameter(format!("tol must be > 0, got {tol}")));
    }
    Ok(())
}

/// Distance along a ray to the first observed label change.
///
/// The radius doubles from `tol` until the label differs from the origin's
/// (the last step is clamped to `max_radius`), then the bracket is bisected
/// down to width `tol`. Label changes skipped over by a doubling step are not
/// seen.
pub fn boundary_distance_along<C: Classifier + ?Sized>(
    clf: &C,
    origin: &[f64],
    direction: &[f64],
    max_radius: f64,
    tol: f64,
) -> Result<BoundaryProbe, BoundaryError> {
    check_dims(clf, origin)?;
    check_dims(clf, direction)?;
    check_radius(max_radius, tol)?;
    let len = norm(direction);
    if !(len > 0.0) || !len.is_finite() {
        return Err(BoundaryError::ZeroDirection);
    }
    let unit: Vec<f64> = direction.iter().map(|u| u / len).collect();
    Ok(probe_unit(clf, origin, unit, max_radius, tol))
}

fn probe_unit<C: Classifier + ?Sized>(clf: &C, origin: &[f64], unit: Vec<f64>, max_radius: f64, tol: f64) -> BoundaryProbe {
    let home = clf.classify(origin);
    let mut lo = 0.0;
    let mut r = tol.min(max_radius);
    let mut hi = None;
    loop {
        let label = clf.classify(&at(origin, &unit, r));
        if label != home {
            hi = Some((r, label));
            break;
        }
        lo = r;
        if r >= max_radius {
            break;
        }
        r = (2.0 * r).min(max_radius);
    }
    let Some((mut hi, mut far)) = hi else {
        return BoundaryProbe {
            origin: origin.to_vec(),
            direction: unit,
            distance: None,
            max_radius,
            bracket_width: max_radius,
            origin_label: home,
            far_label: None,
        };
    };
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let label = clf.classify(&at(origin, &unit, mid));
        if label == home {
            lo = mid;
        } else {
            hi = mid;
            far = label;
        }
    }
    BoundaryProbe {
        origin: origin.to_vec(),
        direction: unit,
        distance: Some(0.5 * (lo + hi)),
        max_radius,
        bracket_width: hi - lo,
        origin_label: home,
        far_label: Some(far),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearestConfig {
    /// Random directions, probed after the `2d` signed coordinate axes.
    pub n_directions: usize,
    pub max_radius: f64,
    pub tol: f64,
    pub seed: u64,
    /// Polish the best direction by a pattern search on the sphere.
    pub refine: bool,
}

impl NearestConfig {
    /// Radius defaults to the domain diameter and tolerance to `1e-6` of it.
    pub fn for_domain(domain: &Hypercube, n_directions: usize, seed: u64) -> Self {
        let max_radius = domain.diameter();
        Self {
            n_directions,
            max_radius,
            tol: 1e-6 * max_radius,
            seed,
            refine: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearestEstimate {
    /// Smallest distance found; `None` when every probe missed.
    pub distance: Option<f64>,
    pub direction: Option<Vec<f64>>,
    pub probes: usize,
}

impl NearestEstimate {
    /// The distance, or `fallback` when nothing was found.
    pub fn distance_or(&self, fallback: f64) -> f64 {
        self.distance.unwrap_or(fallback)
    }
}

/// Probe directions: `+e_i, -e_i` for each axis, then seeded Gaussian
/// directions. The first `k` random directions do not depend on `n`.
fn probe_directions(d: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut dirs = Vec::with_capacity(2 * d + n);
    for i in 0..d {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; d];
            e[i] = s;
            dirs.push(e);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while dirs.len() < 2 * d + n {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let len = norm(&v);
        if len > 1e-12 {
            dirs.push(v.into_iter().map(|x| x / len).collect());
        }
    }
    dirs
}

fn better(a: &BoundaryProbe, b: &BoundaryProbe) -> bool {
    match (a.distance, b.distance) {
        (Some(x), Some(y)) => x < y,
        (Some(_), None) => true,
        _ => false,
    }
}

/// Smallest boundary distance over the probe directions, optionally refined.
///
/// Each reported distance is realised by an actual label change, so the result
/// bounds the true distance from above (to within `tol / 2`).
pub fn nearest_boundary_estimate<C: Classifier + ?Sized>(
    clf: &C,
    origin: &[f64],
    cfg: &NearestConfig,
) -> Result<NearestEstimate, BoundaryError> {
    check_dims(clf, origin)?;
    check_radius(cfg.max_radius, cfg.tol)?;
    if cfg.n_directions == 0 {
        return Err(BoundaryError::InvalidParameter("n_directions must be at least 1".into()));
    }
    let d = origin.len();
    let dirs = probe_directions(d, cfg.n_directions, cfg.seed);
    let probes: Vec<BoundaryProbe> = dirs
        .into_par_iter()
        .map(|u| probe_unit(clf, origin, u, cfg.max_radius, cfg.tol))
        .collect();
    let mut count = probes.len();
    let mut best = probes
        .into_iter()
        .reduce(|a, b| if better(&b, &a) { b } else { a })
        .expect("at least one direction");
    if cfg.refine && best.distance.is_some() {
        let (refined, used) = refine(clf, origin, best, cfg);
        best = refined;
        count += used;
    }
    Ok(NearestEstimate {
        distance: best.distance,
        direction: best.distance.map(|_| best.direction.clone()),
        probes: count,
    })
}

/// Compass search over the unit sphere: nudge the direction along each signed
/// axis, keep any improvement, halve the step when none helps.
fn refine<C: Classifier + ?Sized>(
    clf: &C,
    origin: &[f64],
    mut best: BoundaryProbe,
    cfg: &NearestConfig,
) -> (BoundaryProbe, usize) {
    let d = origin.len();
    let mut step = 0.5;
    let mut used = 0;
    while step > 1e-4 {
        let candidates: Vec<Vec<f64>> = (0..2 * d)
            .filter_map(|k| {
                let mut v = best.direction.clone();
                v[k / 2] += if k % 2 == 0 { step } else { -step };
                let len = norm(&v);
                (len > 1e-12).then(|| v.into_iter().map(|x| x / len).collect())
            })
            .collect();
        used += candidates.len();
        let winner = candidates
            .into_par_iter()
            .map(|u| probe_unit(clf, origin, u, cfg.max_radius, cfg.tol))
            .collect::<Vec<_>>()
            .into_iter()
            .reduce(|a, b| if better(&b, &a) { b } else { a });
        match winner {
            Some(p) if better(&p, &best) && p.distance.unwrap() < best.distance.unwrap() - 0.5 * cfg.tol => best = p,
            _ => step *= 0.5,
        }
    }
    (best, used)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::LinearClassifier;
    use crate::polyclass::PolynomialSurface;
    use proptest::prelude::{prop_assert, prop_assume, proptest, ProptestConfig};

    fn circle() -> PolynomialSurface {
        PolynomialSurface::from_terms(
            Hypercube::new(-3.0, 3.0, 2).unwrap(),
            2,
            // Scaled coordinates are x / 3, so x^2 + y^2 - 1 = 9 (t0^2 + t1^2) - 1.
            &[(&[2, 0], 9.0), (&[0, 2], 9.0), (&[0, 0], -1.0)],
        )
        .unwrap()
    }

    fn assert_brackets<C: Classifier>(clf: &C, p: &BoundaryProbe, tol: f64) {
        let r = p.distance.unwrap();
        assert!(p.bracket_width <= tol);
        assert_eq!(clf.classify(&at(&p.origin, &p.direction, r - tol)), p.origin_label);
        assert_ne!(clf.classify(&at(&p.origin, &p.direction, r + tol)), p.origin_label);
    }

    #[test]
    fn half_plane_distances() {
        let clf = LinearClassifier::new(vec![1.0, 0.0], 0.0);
        let tol = 1e-8;
        let p = boundary_distance_along(&clf, &[-2.0, 0.0], &[3.0, 0.0], 10.0, tol).unwrap();
        assert!((p.distance.unwrap() - 2.0).abs() <= tol);
        assert_brackets(&clf, &p, tol);
        let q = boundary_distance_along(&clf, &[-2.0, 0.0], &[0.0, 1.0], 10.0, tol).unwrap();
        assert_eq!(q.distance, None);
        assert_eq!(q.far_label, None);
    }

    #[test]
    fn circle_from_centre() {
        let clf = circle();
        let tol = 1e-9;
        for k in 0..12 {
            let a = k as f64 * 0.5;
            let p = boundary_distance_along(&clf, &[0.0, 0.0], &[a.cos(), a.sin()], 5.0, tol).unwrap();
            assert!((p.distance.unwrap() - 1.0).abs() <= tol);
            assert_brackets(&clf, &p, tol);
        }
    }

    #[test]
    fn invalid_inputs() {
        let clf = LinearClassifier::new(vec![1.0, 0.0], 0.0);
        assert!(matches!(
            boundary_distance_along(&clf, &[0.0, 0.0], &[0.0, 0.0], 1.0, 1e-3),
            Err(BoundaryError::ZeroDirection)
        ));
        assert!(boundary_distance_along(&clf, &[0.0, 0.0], &[1.0, 0.0], 0.0, 1e-3).is_err());
        assert!(boundary_distance_along(&clf, &[0.0], &[1.0], 1.0, 1e-3).is_err());
    }

    #[test]
    fn nearest_within_ten_percent() {
        let clf = LinearClassifier::new(vec![1.0, -2.0], 0.5);
        let cfg = NearestConfig {
            n_directions: 1000,
            max_radius: 20.0,
            tol: 1e-9,
            seed: 4,
            refine: false,
        };
        let origin = [1.3, -0.4];
        let truth = clf.distance(&origin);
        let est = nearest_boundary_estimate(&clf, &origin, &cfg).unwrap().distance.unwrap();
        assert!(est >= truth - cfg.tol && est <= 1.1 * truth, "{est} vs {truth}");
    }

    #[test]
    fn refinement_reaches_high_dimension() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        let clf = LinearClassifier::new(w, 0.3);
        let cfg = NearestConfig {
            n_directions: 1000,
            max_radius: 50.0,
            tol: 1e-9,
            seed: 9,
            refine: true,
        };
        for _ in 0..5 {
            let origin: Vec<f64> = (0..8).map(|_| rng.random_range(-2.0..2.0)).collect();
            let truth = clf.distance(&origin);
            let est = nearest_boundary_estimate(&clf, &origin, &cfg).unwrap().distance.unwrap();
            assert!(est >= truth - cfg.tol && est <= 1.1 * truth, "{est} vs {truth}");
        }
    }

    #[test]
    fn just_off_the_boundary() {
        let clf = LinearClassifier::new(vec![0.0, 1.0], 0.0);
        let tol = 1e-6;
        let cfg = NearestConfig {
            n_directions: 10,
            max_radius: 5.0,
            tol,
            seed: 0,
            refine: false,
        };
        let est = nearest_boundary_estimate(&clf, &[0.3, tol], &cfg).unwrap();
        assert!(est.distance.unwrap() <= 2.0 * tol);
    }

    #[test]
    fn nothing_to_find() {
        let clf = LinearClassifier::new(vec![1.0], -100.0);
        let cfg = NearestConfig {
            n_directions: 4,
            max_radius: 1.0,
            tol: 1e-6,
            seed: 0,
            refine: true,
        };
        let est = nearest_boundary_estimate(&clf, &[0.0], &cfg).unwrap();
        assert_eq!(est.distance, None);
        assert_eq!(est.distance_or(1.0), 1.0);
    }

    #[test]
    fn estimate_never_beats_its_own_probes() {
        let clf = circle();
        let cfg = NearestConfig {
            n_directions: 50,
            max_radius: 5.0,
            tol: 1e-7,
            seed: 3,
            refine: false,
        };
        let origin = [0.4, -0.2];
        let est = nearest_boundary_estimate(&clf, &origin, &cfg).unwrap().distance.unwrap();
        for u in probe_directions(2, 50, 3) {
            if let Some(r) = boundary_distance_along(&clf, &origin, &u, 5.0, 1e-7).unwrap().distance {
                assert!(est <= r);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn nested_direction_sets_never_increase(seed in 0u64..1000, n in 1usize..60, extra in 1usize..60,
                                                 x in -2.0f64..2.0, y in -2.0f64..2.0) {
            let clf = circle();
            let mut cfg = NearestConfig { n_directions: n, max_radius: 6.0, tol: 1e-7, seed, refine: false };
            let small = nearest_boundary_estimate(&clf, &[x, y], &cfg).unwrap().distance_or(6.0);
            cfg.n_directions = n + extra;
            let large = nearest_boundary_estimate(&clf, &[x, y], &cfg).unwrap().distance_or(6.0);
            prop_assert!(large <= small);
        }

        #[test]
        fn scaling_space_scales_distances(s in 0.1f64..10.0, w0 in -1.0f64..1.0, w1 in -1.0f64..1.0,
                                          b in -1.0f64..1.0, x in -2.0f64..2.0, y in -2.0f64..2.0,
                                          a in 0.0f64..6.0) {
            prop_assume!(w0.abs() + w1.abs() > 0.1);
            let clf = LinearClassifier::new(vec![w0, w1], b);
            // Same partition on coordinates multiplied by s.
            let scaled = LinearClassifier::new(vec![w0, w1], b * s);
            let tol = 1e-9;
            let dir = [a.cos(), a.sin()];
            let p = boundary_distance_along(&clf, &[x, y], &dir, 100.0, tol).unwrap();
            let q = boundary_distance_along(&scaled, &[s * x, s * y], &dir, 100.0 * s, tol * s).unwrap();
            match (p.distance, q.distance) {
                (Some(r), Some(rs)) => prop_assert!((rs - s * r).abs() <= 2.0 * s * tol, "{} vs {}", rs, s * r),
                (None, None) => {}
                _ => prop_assert!(false, "found in one space only"),
            }
        }
    }
}
