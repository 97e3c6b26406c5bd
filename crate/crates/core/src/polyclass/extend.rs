use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::certify::{epsilon_equal, EpsilonCertificate, Region, Verdict};
use super::surface::design_matrix;
use super::{basis_len, PolyError, PolynomialSurface, RANK_TOL};
use crate::arrays::{uniform_box, Matrix};
use crate::hull::{membership, Membership, DEFAULT_DIST_TOL};
use crate::linalg::constrained_lstsq;

/// Point outside the data hull where an extension must deviate from `f` by
/// exactly `target`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub point: Vec<f64>,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionConfig {
    pub degree_up: usize,
    pub k: usize,
    pub epsilon: f64,
    /// Hull samples for each inside certificate.
    pub n_samples: usize,
    pub seed: u64,
}

/// Members must differ by this many epsilons at their witness point.
pub const DISTINCT_FACTOR: f64 = 10.0;
/// Family step at the witness, in epsilons. Above `DISTINCT_FACTOR` for slack.
const STEP_FACTOR: f64 = 15.0;
/// Planned inside deviation, as a fraction of epsilon.
const INSIDE_BUDGET: f64 = 0.5;
/// Low-gain directions considered when picking the family direction.
const CANDIDATE_DIRECTIONS: usize = 6;
const BOX_PROBES: usize = 4000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairWitness {
    pub i: usize,
    pub j: usize,
    pub point: Vec<f64>,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtensionFamily {
    pub members: Vec<PolynomialSurface>,
    /// Multiple of the family direction added to each member.
    pub offsets: Vec<f64>,
    pub inside_certificates: Vec<EpsilonCertificate>,
    /// `member(anchor) - f(anchor)` for each member and anchor.
    pub anchor_deviations: Vec<Vec<f64>>,
    pub pairwise: Vec<PairWitness>,
    pub max_inside_deviation: f64,
}

fn rows_of(m: &Matrix) -> Vec<&[f64]> {
    m.iter_rows().collect()
}

fn max_abs(m: &DMatrix<f64>, v: &DVector<f64>) -> (usize, f64) {
    let values = m * v;
    values
        .iter()
        .enumerate()
        .map(|(i, x)| (i, x.abs()))
        .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best })
}

/// Number of hull samples in the least-squares objective: enough rows to
/// control the whole hull, not just the data points.
fn dense_size(p: usize) -> usize {
    (40 * p).clamp(2000, 4000)
}

/// Builds `k` degree-`degree_up` surfaces that agree with `f` to within
/// `epsilon` on the hull of `inside`, hit the anchor deviations exactly, and
/// differ pairwise by at least `10 * epsilon` somewhere in the domain box.
///
/// Every property is re-checked by evaluation before returning.
pub fn lemma3_extensions(
    f: &PolynomialSurface,
    inside: &Matrix,
    anchors: &[Anchor],
    cfg: &ExtensionConfig,
) -> Result<ExtensionFamily, PolyError> {
    let d = f.dim();
    let eps = cfg.epsilon;
    if cfg.degree_up <= f.degree() {
        return Err(PolyError::InvalidParameter(format!(
            "degree_up {} must exceed degree {}",
            cfg.degree_up,
            f.degree()
        )));
    }
    if cfg.k < 2 {
        return Err(PolyError::InvalidParameter("k must be at least 2".into()));
    }
    if !(eps > 0.0) || !eps.is_finite() || cfg.n_samples == 0 {
        return Err(PolyError::InvalidParameter("epsilon must be > 0 and n_samples >= 1".into()));
    }
    if inside.rows() == 0 {
        return Err(PolyError::EmptyPointSet("inside"));
    }
    if inside.cols() != d {
        return Err(PolyError::DimensionMismatch {
            expected: d,
            found: inside.cols(),
        });
    }
    for (index, a) in anchors.iter().enumerate() {
        if a.point.len() != d {
            return Err(PolyError::DimensionMismatch {
                expected: d,
                found: a.point.len(),
            });
        }
        if !a.target.is_finite() {
            return Err(PolyError::NonFinite);
        }
        if let Membership::InHull { .. } = membership(&a.point, inside, DEFAULT_DIST_TOL)? {
            if a.target.abs() >= eps {
                return Err(PolyError::AnchorInsideHull { index, target: a.target });
            }
        }
    }

    let domain = *f.domain();
    let n_up = cfg.degree_up;
    let p = basis_len(d, n_up);
    let hull = Region::Hull(inside.clone());
    let dense = hull.sampler(cfg.seed ^ 0xd1ce).take_matrix(inside.rows() + dense_size(p));
    let objective = design_matrix(&domain, n_up, &rows_of(&dense));
    let anchor_rows: Vec<&[f64]> = anchors.iter().map(|a| a.point.as_slice()).collect();
    let constraints = design_matrix(&domain, n_up, &anchor_rows);
    let targets = DVector::from_iterator(anchors.len(), anchors.iter().map(|a| a.target));
    let sol = constrained_lstsq(&objective, &DVector::zeros(dense.rows()), &constraints, &targets, RANK_TOL)?;
    let delta = sol.coefficients;
    let (_, base_in) = max_abs(&objective, &delta);

    // Family direction: a low-gain null-space direction that is small on the
    // hull and large somewhere in the box.
    let mut probes = uniform_box(BOX_PROBES, &domain, cfg.seed ^ 0xb0c5)?;
    if d <= 10 {
        let corners = Matrix::from_rows(&domain.corners())?;
        probes = probes.vstack(&corners)?;
    }
    let box_design = design_matrix(&domain, n_up, &rows_of(&probes));
    let n_dir = sol.directions.ncols().min(CANDIDATE_DIRECTIONS);
    if n_dir == 0 {
        return Err(PolyError::InsufficientDegree {
            achieved: f64::INFINITY,
            epsilon: eps,
        });
    }
    let mut candidates: Vec<DVector<f64>> = (0..n_dir).map(|j| sol.directions.column(j).into_owned()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mix: Vec<f64> = (0..n_dir).map(|_| rng.sample(StandardNormal)).collect();
    let mut combo = DVector::zeros(p);
    for (j, w) in mix.iter().enumerate() {
        combo.axpy(*w, &candidates[j], 1.0);
    }
    if combo.norm() > 0.0 {
        candidates.push(combo.normalize());
    }
    let (direction, witness_idx, v_box, v_in) = candidates
        .into_iter()
        .map(|v| {
            let (wi, vb) = max_abs(&box_design, &v);
            let (_, vi) = max_abs(&objective, &v);
            (v, wi, vb, vi)
        })
        .max_by(|a, b| (a.2 / a.3).total_cmp(&(b.2 / b.3)))
        .expect("at least one candidate");

    let multipliers: Vec<f64> = (0..cfg.k)
        .map(|i| {
            let m = i.div_ceil(2) as f64;
            if i % 2 == 1 {
                m
            } else {
                -m
            }
        })
        .collect();
    let m_max = multipliers.iter().fold(0.0f64, |a, m| a.max(m.abs()));
    let step = STEP_FACTOR * eps / v_box;
    let planned = base_in + m_max * step * v_in;
    if !(planned < INSIDE_BUDGET * eps) || !step.is_finite() {
        return Err(PolyError::InsufficientDegree {
            achieved: planned,
            epsilon: eps,
        });
    }

    let f_up = f.elevate(n_up)?;
    let mut members = Vec::with_capacity(cfg.k);
    let mut offsets = Vec::with_capacity(cfg.k);
    for m in &multipliers {
        let offset = m * step;
        let coeffs: Vec<f64> = f_up
            .coefficients()
            .iter()
            .zip(delta.iter().zip(direction.iter()))
            .map(|(c, (dl, v))| c + dl + offset * v)
            .collect();
        members.push(PolynomialSurface::new(domain, n_up, coeffs)?);
        offsets.push(offset);
    }

    // Post-hoc certification by evaluation.
    let mut inside_certificates = Vec::with_capacity(cfg.k);
    let mut max_inside_deviation = 0.0f64;
    for (i, g) in members.iter().enumerate() {
        let cert = epsilon_equal(f, g, &hull, eps, cfg.n_samples, cfg.seed.wrapping_add(i as u64))?;
        if let Verdict::NotEpsilonEqual { deviation, .. } = &cert.verdict {
            return Err(PolyError::InsufficientDegree {
                achieved: *deviation,
                epsilon: eps,
            });
        }
        max_inside_deviation = max_inside_deviation.max(cert.max_observed_deviation);
        inside_certificates.push(cert);
    }
    let mut anchor_deviations = Vec::with_capacity(cfg.k);
    for g in &members {
        let mut devs = Vec::with_capacity(anchors.len());
        for (index, a) in anchors.iter().enumerate() {
            let achieved = g.eval(&a.point) - f.eval(&a.point);
            if (achieved - a.target).abs() > 1e-6 * (1.0 + a.target.abs()) {
                return Err(PolyError::AnchorMissed {
                    index,
                    achieved,
                    target: a.target,
                });
            }
            devs.push(achieved);
        }
        anchor_deviations.push(devs);
    }
    let witness = probes.row(witness_idx).to_vec();
    let threshold = DISTINCT_FACTOR * eps;
    let box_region = Region::Box(domain);
    let mut pairwise = Vec::new();
    for i in 0..cfg.k {
        for j in i + 1..cfg.k {
            let dev = (members[i].eval(&witness) - members[j].eval(&witness)).abs();
            if dev >= threshold {
                pairwise.push(PairWitness {
                    i,
                    j,
                    point: witness.clone(),
                    deviation: dev,
                });
                continue;
            }
            let cert = epsilon_equal(&members[i], &members[j], &box_region, threshold, cfg.n_samples, cfg.seed)?;
            match cert.verdict {
                Verdict::NotEpsilonEqual { witness, deviation } => pairwise.push(PairWitness {
                    i,
                    j,
                    point: witness,
                    deviation,
                }),
                Verdict::EpsilonEqual => return Err(PolyError::NotDistinct { i, j }),
            }
        }
    }

    Ok(ExtensionFamily {
        members,
        offsets,
        inside_certificates,
        anchor_deviations,
        pairwise,
        max_inside_deviation,
    })
}

/// Smallest RMS deviation from `f` over `inside` achievable by a surface of
/// degree `degree_h` that exceeds `f` by `delta` at `anchor`.
pub fn lemma1_gap(
    f: &PolynomialSurface,
    degree_h: usize,
    inside: &Matrix,
    anchor: &[f64],
    delta: f64,
) -> Result<f64, PolyError> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(PolyError::InvalidParameter(format!("delta must be > 0, got {delta}")));
    }
    if inside.rows() == 0 {
        return Err(PolyError::EmptyPointSet("inside"));
    }
    for len in [inside.cols(), anchor.len()] {
        if len != f.dim() {
            return Err(PolyError::DimensionMismatch {
                expected: f.dim(),
                found: len,
            });
        }
    }
    let domain = f.domain();
    let rows = rows_of(inside);
    let objective = design_matrix(domain, degree_h, &rows);
    let rhs = DVector::from_iterator(rows.len(), rows.iter().map(|x| f.eval(x)));
    let constraint = design_matrix(domain, degree_h, &[anchor]);
    let target = DVector::from_element(1, f.eval(anchor) + delta);
    let sol = constrained_lstsq(&objective, &rhs, &constraint, &target, RANK_TOL)?;
    Ok(sol.residual_norm / (rows.len() as f64).sqrt())
}

/// `lemma1_gap` for each degree in `degrees`.
pub fn lemma1_gap_curve(
    f: &PolynomialSurface,
    degrees: impl IntoIterator<Item = usize>,
    inside: &Matrix,
    anchor: &[f64],
    delta: f64,
) -> Result<Vec<(usize, f64)>, PolyError> {
    degrees
        .into_iter()
        .map(|n| lemma1_gap(f, n, inside, anchor, delta).map(|g| (n, g)))
        .collect()
}
