use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::surface::design_matrix;
use super::{PolyError, PolynomialSurface, RANK_TOL};
use crate::arrays::{Hypercube, Matrix};
use crate::linalg::Svd;

/// Ridge used when a caller does not choose one (degree search, CLI).
pub const DEFAULT_RIDGE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SeparatorFit {
    Separator { surface: PolynomialSurface },
    /// The least-squares fit gets at least one sign wrong.
    Infeasible {
        surface: PolynomialSurface,
        misclassified: usize,
    },
}

impl SeparatorFit {
    pub fn separator(&self) -> Option<&PolynomialSurface> {
        match self {
            SeparatorFit::Separator { surface } => Some(surface),
            SeparatorFit::Infeasible { .. } => None,
        }
    }

    pub fn surface(&self) -> &PolynomialSurface {
        match self {
            SeparatorFit::Separator { surface } | SeparatorFit::Infeasible { surface, .. } => surface,
        }
    }
}

fn check_sets(x: &Matrix, y: &Matrix, dim: usize) -> Result<(), PolyError> {
    if x.rows() == 0 {
        return Err(PolyError::EmptyPointSet("X"));
    }
    if y.rows() == 0 {
        return Err(PolyError::EmptyPointSet("Y"));
    }
    for m in [x, y] {
        if m.cols() != dim {
            return Err(PolyError::DimensionMismatch {
                expected: dim,
                found: m.cols(),
            });
        }
    }
    Ok(())
}

/// Number of points on the wrong side: `f <= 0` on `x` or `f >= 0` on `y`.
fn misclassified(f: &PolynomialSurface, x: &Matrix, y: &Matrix) -> usize {
    x.iter_rows().filter(|p| f.eval(p) <= 0.0).count() + y.iter_rows().filter(|p| f.eval(p) >= 0.0).count()
}

/// Whether `f` is strictly positive on `x` and strictly negative on `y`.
pub fn separates(f: &PolynomialSurface, x: &Matrix, y: &Matrix) -> bool {
    misclassified(f, x, y) == 0
}

/// Least-squares fit of `f` to `+1` on `x` and `-1` on `y`, with optional ridge.
///
/// With `ridge == 0` the design matrix must have full column rank.
pub fn fit_separator(
    x: &Matrix,
    y: &Matrix,
    degree: usize,
    ridge: f64,
    domain: &Hypercube,
) -> Result<SeparatorFit, PolyError> {
    check_sets(x, y, domain.dim)?;
    if degree == 0 {
        return Err(PolyError::InvalidParameter("degree must be at least 1".into()));
    }
    if !(ridge >= 0.0) || !ridge.is_finite() {
        return Err(PolyError::InvalidParameter(format!("ridge must be >= 0, got {ridge}")));
    }
    let rows: Vec<&[f64]> = x.iter_rows().chain(y.iter_rows()).collect();
    let design = design_matrix(domain, degree, &rows);
    let targets = DVector::from_fn(rows.len(), |i, _| if i < x.rows() { 1.0 } else { -1.0 });
    let svd = Svd::new(&design);
    let coefficients = if ridge == 0.0 {
        let rank = if design.nrows() < design.ncols() {
            svd.rank(RANK_TOL).min(design.nrows())
        } else {
            svd.rank(RANK_TOL)
        };
        if rank < design.ncols() {
            return Err(PolyError::RankDeficient {
                rank,
                unknowns: design.ncols(),
            });
        }
        svd.solve(&targets, RANK_TOL)
    } else {
        svd.solve_ridge(&targets, ridge)
    };
    let surface = PolynomialSurface::new(*domain, degree, coefficients.as_slice().to_vec())?;
    let wrong = misclassified(&surface, x, y);
    Ok(if wrong == 0 {
        SeparatorFit::Separator { surface }
    } else {
        SeparatorFit::Infeasible {
            surface,
            misclassified: wrong,
        }
    })
}

/// Smallest degree in `1..=max_degree` whose ridge fit separates, with the
/// witness surface. `None` when no degree in range works.
pub fn minimal_degree_separator(
    x: &Matrix,
    y: &Matrix,
    max_degree: usize,
    domain: &Hypercube,
) -> Result<Option<(usize, PolynomialSurface)>, PolyError> {
    if max_degree == 0 {
        return Err(PolyError::InvalidParameter("max_degree must be at least 1".into()));
    }
    for degree in 1..=max_degree {
        if let SeparatorFit::Separator { surface } = fit_separator(x, y, degree, DEFAULT_RIDGE, domain)? {
            return Ok(Some((degree, surface)));
        }
    }
    Ok(None)
}

/// `min |f(p)|` over `x ∪ y` for a separator `f`.
pub fn functional_margin(f: &PolynomialSurface, x: &Matrix, y: &Matrix) -> Result<f64, PolyError> {
    check_sets(x, y, f.dim())?;
    if !separates(f, x, y) {
        return Err(PolyError::NotSeparator);
    }
    Ok(x.iter_rows()
        .chain(y.iter_rows())
        .map(|p| f.eval(p).abs())
        .fold(f64::INFINITY, f64::min))
}
