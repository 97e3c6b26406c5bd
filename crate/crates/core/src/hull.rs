//! Euclidean projection onto the convex hull of a point cloud.
//!
//! The hull is kept implicitly as its generating points. Projection solves
//! `min |P^T l - q|^2` over the probability simplex with Frank-Wolfe plus away
//! steps and closed-form line search. Every few iterations a corrective solve
//! over the affine hull of the current support speeds up the final phase. At
//! termination the Frank-Wolfe gap bounds the suboptimality, and the residual
//! `q - x` yields a separating hyperplane whenever the query lies outside.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arrays::{Dataset, Matrix};
use crate::linalg::{dot, median, Svd};
use nalgebra::{DMatrix, DVector};

/// Distance below which a query counts as inside the hull.
pub const DEFAULT_DIST_TOL: f64 = 1e-6;
/// Frank-Wolfe gap tolerance used by the convenience wrappers.
pub const DEFAULT_SOLVER_TOL: f64 = 1e-10;
/// Iteration budget per generating point for the convenience wrappers.
pub const ITERATIONS_PER_POINT: usize = 50;
/// Iterations between corrective solves on the active support.
const CORRECTIVE_EVERY: usize = 8;

#[derive(Debug, Error)]
pub enum HullError {
    #[error("hull needs at least one generating point")]
    EmptyHull,
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("dimension mismatch: hull points have {expected} coordinates, query has {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("projection unconverged after {} iterations (gap {:.3e})", .projection.iterations, .projection.dual_gap)]
    Unconverged { projection: Box<HullProjection> },
}

/// Hyperplane `{z : normal . z = offset}` with unit normal. Hull points satisfy
/// `normal . v <= offset`; a separated query has `normal . q > offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub normal: Vec<f64>,
    pub offset: f64,
}

impl Certificate {
    /// Signed distance from the hyperplane to `query`; a lower bound on the
    /// distance from `query` to the hull when positive.
    pub fn margin(&self, query: &[f64]) -> f64 {
        dot(&self.normal, query) - self.offset
    }

    /// Checks `normal.q - offset > 0` and `normal.v - offset <= tol` for all `v`.
    pub fn verify(&self, query: &[f64], points: &Matrix, tol: f64) -> bool {
        self.margin(query) > 0.0 && points.iter_rows().all(|v| dot(&self.normal, v) - self.offset <= tol)
    }

    fn from_residual(query: &[f64], projection: &[f64], points: &Matrix) -> Option<Self> {
        let mut normal: Vec<f64> = query.iter().zip(projection).map(|(q, x)| q - x).collect();
        let len = dot(&normal, &normal).sqrt();
        if !(len > 0.0) {
            return None;
        }
        normal.iter_mut().for_each(|w| *w /= len);
        let offset = points
            .iter_rows()
            .map(|v| dot(&normal, v))
            .fold(f64::NEG_INFINITY, f64::max);
        let cert = Certificate { normal, offset };
        (cert.margin(query) > 0.0).then_some(cert)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullProjection {
    /// Convex weights over the generating points.
    pub coefficients: Vec<f64>,
    pub projection: Vec<f64>,
    pub distance: f64,
    pub dual_gap: f64,
    pub iterations: usize,
    pub converged: bool,
    pub certificate: Option<Certificate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Membership {
    InHull {
        distance: f64,
    },
    OutOfHull {
        distance: f64,
        certificate: Certificate,
    },
    /// Neither bound could be certified within the iteration budget.
    Indeterminate {
        distance_upper: f64,
        distance_lower: f64,
        dual_gap: f64,
    },
}

impl Membership {
    pub fn is_inside(&self) -> bool {
        matches!(self, Membership::InHull { .. })
    }

    pub fn is_outside(&self) -> bool {
        matches!(self, Membership::OutOfHull { .. })
    }

    /// Best available distance estimate (upper bound for indeterminate results).
    pub fn distance(&self) -> f64 {
        match self {
            Membership::InHull { distance } | Membership::OutOfHull { distance, .. } => *distance,
            Membership::Indeterminate { distance_upper, .. } => *distance_upper,
        }
    }
}

fn validate(query: &[f64], points: &Matrix) -> Result<(), HullError> {
    if points.rows() == 0 || points.cols() == 0 {
        return Err(HullError::EmptyHull);
    }
    if query.len() != points.cols() {
        return Err(HullError::DimensionMismatch {
            expected: points.cols(),
            found: query.len(),
        });
    }
    if !points.all_finite() {
        return Err(HullError::NonFinite("hull points"));
    }
    if !query.iter().all(|v| v.is_finite()) {
        return Err(HullError::NonFinite("query"));
    }
    Ok(())
}

/// Runs away-step Frank-Wolfe until the gap drops to `tol` or the budget runs out.
fn frank_wolfe(query: &[f64], points: &Matrix, tol: f64, max_iter: usize) -> HullProjection {
    let n = points.rows();
    let d = points.cols();

    // Start from the nearest generating point.
    let start = (0..n)
        .map(|i| (i, crate::linalg::distance(points.row(i), query)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| i)
        .unwrap();
    let mut lambda = vec![0.0; n];
    lambda[start] = 1.0;
    let mut x = points.row(start).to_vec();
    let mut r = vec![0.0; d];
    let mut grad = vec![0.0; n];
    let mut dir = vec![0.0; d];
    let mut gap;
    let mut iterations = 0;
    let mut converged = false;

    loop {
        for k in 0..d {
            r[k] = x[k] - query[k];
        }
        for (i, g) in grad.iter_mut().enumerate() {
            *g = dot(points.row(i), &r);
        }
        let rx = dot(&r, &x);
        let (s, gs) = grad
            .iter()
            .copied()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        gap = (2.0 * (rx - gs)).max(0.0);
        if gap <= tol {
            converged = true;
            break;
        }
        if iterations >= max_iter {
            break;
        }
        iterations += 1;

        let (a, ga) = grad
            .iter()
            .copied()
            .enumerate()
            .filter(|&(i, _)| lambda[i] > 0.0)
            .max_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        let away_gap = 2.0 * (ga - rx);
        let toward = gap >= away_gap || lambda[a] >= 1.0;
        let (vertex, gamma_max) = if toward {
            (s, 1.0)
        } else {
            (a, lambda[a] / (1.0 - lambda[a]))
        };
        let v = points.row(vertex);
        for k in 0..d {
            dir[k] = if toward { v[k] - x[k] } else { x[k] - v[k] };
        }
        let dd = dot(&dir, &dir);
        if dd == 0.0 {
            break;
        }
        let gamma = (-dot(&r, &dir) / dd).clamp(0.0, gamma_max);
        if toward {
            lambda.iter_mut().for_each(|l| *l *= 1.0 - gamma);
            lambda[vertex] += gamma;
        } else {
            lambda.iter_mut().for_each(|l| *l *= 1.0 + gamma);
            lambda[vertex] -= gamma;
            if gamma == gamma_max || lambda[vertex] < 0.0 {
                lambda[vertex] = 0.0;
            }
        }
        for k in 0..d {
            x[k] += gamma * dir[k];
        }
        if iterations % CORRECTIVE_EVERY == 0 {
            corrective_step(query, points, &mut lambda);
            x = combine(points, &lambda);
        }
    }

    let total: f64 = lambda.iter().sum();
    lambda.iter_mut().for_each(|l| *l /= total);
    let projection = combine(points, &lambda);
    let distance = crate::linalg::distance(&projection, query);
    let certificate = if distance > DEFAULT_DIST_TOL {
        Certificate::from_residual(query, &projection, points)
    } else {
        None
    };
    HullProjection {
        coefficients: lambda,
        projection,
        distance,
        dual_gap: gap,
        iterations,
        converged,
        certificate,
    }
}

/// Minimises exactly over the affine hull of the current support, then moves
/// the weights toward that minimiser as far as nonnegativity allows. Both the
/// target and every point on the segment are no worse than the current iterate,
/// so this never increases the objective.
fn corrective_step(query: &[f64], points: &Matrix, lambda: &mut [f64]) {
    let support: Vec<usize> = (0..lambda.len()).filter(|&i| lambda[i] > 0.0).collect();
    if support.len() < 2 {
        return;
    }
    let d = points.cols();
    let base = points.row(support[0]);
    let edges = DMatrix::from_fn(d, support.len() - 1, |r, c| points.row(support[c + 1])[r] - base[r]);
    let rhs = DVector::from_fn(d, |r, _| query[r] - base[r]);
    let beta = Svd::new(&edges).solve(&rhs, 1e-12);
    let mut target = vec![0.0; support.len()];
    target[1..].copy_from_slice(beta.as_slice());
    target[0] = 1.0 - beta.sum();

    let mut step: f64 = 1.0;
    for (&i, &t) in support.iter().zip(&target) {
        if t < 0.0 {
            step = step.min(lambda[i] / (lambda[i] - t));
        }
    }
    for (&i, &t) in support.iter().zip(&target) {
        let next = lambda[i] + step * (t - lambda[i]);
        lambda[i] = if next > 1e-15 { next } else { 0.0 };
    }
    let total: f64 = lambda.iter().sum();
    lambda.iter_mut().for_each(|l| *l /= total);
}

fn combine(points: &Matrix, lambda: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; points.cols()];
    for (i, &l) in lambda.iter().enumerate() {
        if l != 0.0 {
            for (xk, vk) in x.iter_mut().zip(points.row(i)) {
                *xk += l * vk;
            }
        }
    }
    x
}

/// Projects `query` onto the hull of the rows of `points`.
///
/// Returns [`HullError::Unconverged`] (carrying the last iterate) when the gap
/// is still above `tol` after `max_iter` iterations.
pub fn project_onto_hull(
    query: &[f64],
    points: &Matrix,
    tol: f64,
    max_iter: usize,
) -> Result<HullProjection, HullError> {
    validate(query, points)?;
    if !(tol > 0.0) {
        return Err(HullError::InvalidTolerance(tol));
    }
    let proj = frank_wolfe(query, points, tol, max_iter);
    if proj.converged {
        Ok(proj)
    } else {
        Err(HullError::Unconverged {
            projection: Box::new(proj),
        })
    }
}

pub fn default_max_iter(n: usize) -> usize {
    ITERATIONS_PER_POINT * n.max(1)
}

/// Distance to the hull with default tolerance and budget.
pub fn distance_to_hull(query: &[f64], points: &Matrix) -> Result<f64, HullError> {
    project_onto_hull(query, points, DEFAULT_SOLVER_TOL, default_max_iter(points.rows())).map(|p| p.distance)
}

/// Decides whether `query` lies within `dist_tol` of the hull.
///
/// `InHull` is backed by an explicit convex combination within `dist_tol`.
/// `OutOfHull` is backed by a hyperplane whose margin is positive; either the
/// margin itself exceeds `dist_tol`, or the solve converged and the projected
/// distance does. Otherwise the gap is tightened a few times before giving up
/// with `Indeterminate`.
pub fn membership(query: &[f64], points: &Matrix, dist_tol: f64) -> Result<Membership, HullError> {
    validate(query, points)?;
    if !(dist_tol > 0.0) {
        return Err(HullError::InvalidTolerance(dist_tol));
    }
    let budget = default_max_iter(points.rows());
    let mut last = None;
    for (round, tol) in [DEFAULT_SOLVER_TOL, 1e-13, 1e-16].into_iter().enumerate() {
        let proj = frank_wolfe(query, points, tol, budget * (1 + round));
        let upper = proj.distance;
        if upper <= dist_tol {
            return Ok(Membership::InHull { distance: upper });
        }
        if let Some(cert) = Certificate::from_residual(query, &proj.projection, points) {
            let lower = cert.margin(query);
            if lower > dist_tol || proj.converged {
                debug_assert!(cert.verify(query, points, 0.0));
                return Ok(Membership::OutOfHull {
                    distance: upper,
                    certificate: cert,
                });
            }
        }
        last = Some(proj);
    }
    let proj = last.unwrap();
    let lower = Certificate::from_residual(query, &proj.projection, points)
        .map_or(0.0, |c| c.margin(query).max(0.0));
    Ok(Membership::Indeterminate {
        distance_upper: proj.distance,
        distance_lower: lower,
        dual_gap: proj.dual_gap,
    })
}

/// Membership for every row of `queries`, in row order.
pub fn membership_batch(queries: &Matrix, points: &Matrix, dist_tol: f64) -> Result<Vec<Membership>, HullError> {
    (0..queries.rows())
        .into_par_iter()
        .map(|i| membership(queries.row(i), points, dist_tol))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceStats {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

/// How many test points fall outside the training hull, and how far.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationReport {
    pub n_test: usize,
    pub n_outside: usize,
    pub fraction_outside: f64,
    pub distances: Vec<f64>,
    pub stats: DistanceStats,
    /// Points whose membership could not be certified either way.
    pub n_indeterminate: usize,
}

pub fn extrapolation_report(train: &Dataset, test: &Dataset, dist_tol: f64) -> Result<ExtrapolationReport, HullError> {
    if train.d() != test.d() {
        return Err(HullError::DimensionMismatch {
            expected: train.d(),
            found: test.d(),
        });
    }
    let memberships = membership_batch(test.points(), train.points(), dist_tol)?;
    let distances: Vec<f64> = memberships.iter().map(Membership::distance).collect();
    let n_outside = memberships.iter().filter(|m| m.is_outside()).count();
    let n_indeterminate = memberships
        .iter()
        .filter(|m| matches!(m, Membership::Indeterminate { .. }))
        .count();
    let stats = DistanceStats {
        min: distances.iter().copied().fold(f64::INFINITY, f64::min),
        median: median(&distances).unwrap_or(0.0),
        max: distances.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    };
    Ok(ExtrapolationReport {
        n_test: test.n(),
        n_outside,
        fraction_outside: n_outside as f64 / test.n() as f64,
        distances,
        stats,
        n_indeterminate,
    })
}
