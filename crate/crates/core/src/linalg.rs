//! Small dense helpers: vector arithmetic, a sorted full SVD and the
//! null-space method for equality-constrained least squares.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("equality constraints are inconsistent (residual {residual:.3e})")]
    InconsistentConstraints { residual: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Median of a non-empty slice (mean of the middle pair for even lengths).
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len().is_multiple_of(2) {
        0.5 * (v[m - 1] + v[m])
    } else {
        v[m]
    })
}

/// SVD with singular values in descending order and a complete right basis.
///
/// Wide inputs are padded with zero rows so `v` is always `cols x cols`; the
/// padding only contributes zero singular values.
pub struct Svd {
    pub sigma: Vec<f64>,
    /// Left vectors, `rows x k` where `k = sigma.len()`.
    pub u: DMatrix<f64>,
    /// Right vectors as columns, `cols x k`.
    pub v: DMatrix<f64>,
    rows: usize,
}

impl Svd {
    pub fn new(m: &DMatrix<f64>) -> Self {
        let (rows, cols) = m.shape();
        let padded;
        let work = if rows < cols {
            padded = m.clone().resize_vertically(cols, 0.0);
            &padded
        } else {
            m
        };
        let svd = nalgebra::SVD::new(work.clone(), true, true);
        let u_raw = svd.u.expect("u requested");
        let vt_raw = svd.v_t.expect("v_t requested");
        let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
        order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
        let k = order.len();
        let mut u = DMatrix::zeros(rows, k);
        let mut v = DMatrix::zeros(cols, k);
        let mut sigma = Vec::with_capacity(k);
        for (dst, &src) in order.iter().enumerate() {
            sigma.push(svd.singular_values[src]);
            for r in 0..rows {
                u[(r, dst)] = u_raw[(r, src)];
            }
            for c in 0..cols {
                v[(c, dst)] = vt_raw[(src, c)];
            }
        }
        Self { sigma, u, v, rows }
    }

    fn cutoff(&self, rel_tol: f64) -> f64 {
        rel_tol * self.sigma.first().copied().unwrap_or(0.0)
    }

    pub fn rank(&self, rel_tol: f64) -> usize {
        let cut = self.cutoff(rel_tol);
        self.sigma.iter().filter(|&&s| s > cut && s > 0.0).count()
    }

    /// Minimum-norm least-squares solution, truncating small singular values.
    pub fn solve(&self, b: &DVector<f64>, rel_tol: f64) -> DVector<f64> {
        assert_eq!(b.len(), self.rows);
        let r = self.rank(rel_tol);
        let mut x = DVector::zeros(self.v.nrows());
        for i in 0..r {
            let coef = self.u.column(i).dot(b) / self.sigma[i];
            x.axpy(coef, &self.v.column(i), 1.0);
        }
        x
    }

    /// Tikhonov-regularised solve of `min |Ax - b|^2 + ridge |x|^2`.
    pub fn solve_ridge(&self, b: &DVector<f64>, ridge: f64) -> DVector<f64> {
        let mut x = DVector::zeros(self.v.nrows());
        for (i, &s) in self.sigma.iter().enumerate() {
            if s == 0.0 {
                continue;
            }
            let coef = self.u.column(i).dot(b) * s / (s * s + ridge);
            x.axpy(coef, &self.v.column(i), 1.0);
        }
        x
    }

    /// Orthonormal basis (as columns) of the numerical null space.
    pub fn null_space(&self, rel_tol: f64) -> DMatrix<f64> {
        let r = self.rank(rel_tol);
        self.v.columns(r, self.v.ncols() - r).into_owned()
    }
}

/// Solution of `min |B c - y|^2` subject to `A c = t`.
pub struct ConstrainedSolution {
    pub coefficients: DVector<f64>,
    /// Columns span `{c : A c = 0}`.
    pub null_basis: DMatrix<f64>,
    /// Unit coefficient-space directions inside the constraint null space,
    /// ordered by how little they move the objective (ascending gain).
    pub directions: DMatrix<f64>,
    /// `|B v|` for each column `v` of `directions`.
    pub gains: Vec<f64>,
    /// `|B c - y|` at the solution.
    pub residual_norm: f64,
}

/// Null-space method: particular solution of the constraints, then an
/// unconstrained least-squares problem over the constraint null space.
pub fn constrained_lstsq(
    objective: &DMatrix<f64>,
    rhs: &DVector<f64>,
    constraints: &DMatrix<f64>,
    targets: &DVector<f64>,
    rel_tol: f64,
) -> Result<ConstrainedSolution, LinalgError> {
    let p = objective.ncols();
    if constraints.ncols() != p || objective.nrows() != rhs.len() || constraints.nrows() != targets.len() {
        return Err(LinalgError::Shape(format!(
            "objective {:?}, rhs {}, constraints {:?}, targets {}",
            objective.shape(),
            rhs.len(),
            constraints.shape(),
            targets.len()
        )));
    }

    let (particular, null_basis) = if constraints.nrows() == 0 {
        (DVector::zeros(p), DMatrix::identity(p, p))
    } else {
        let svd = Svd::new(constraints);
        let c0 = svd.solve(targets, rel_tol);
        let residual = (constraints * &c0 - targets).norm();
        if residual > 1e-8 * (1.0 + targets.norm()) {
            return Err(LinalgError::InconsistentConstraints { residual });
        }
        (c0, svd.null_space(rel_tol))
    };

    let q = null_basis.ncols();
    let (coefficients, directions, gains) = if q == 0 {
        (particular, DMatrix::zeros(p, 0), Vec::new())
    } else {
        let reduced = objective * &null_basis;
        let svd = Svd::new(&reduced);
        let residual = rhs - objective * &particular;
        let z = svd.solve(&residual, rel_tol);
        let coefficients = particular + &null_basis * z;
        // Right singular vectors of the reduced system, smallest gain first.
        let k = svd.v.ncols();
        let mut directions = DMatrix::zeros(p, k);
        let mut gains = Vec::with_capacity(k);
        for (dst, src) in (0..k).rev().enumerate() {
            let dir = &null_basis * svd.v.column(src);
            directions.set_column(dst, &dir);
            gains.push(svd.sigma[src]);
        }
        (coefficients, directions, gains)
    };
    let residual_norm = (objective * &coefficients - rhs).norm();
    Ok(ConstrainedSolution {
        coefficients,
        null_basis,
        directions,
        gains,
        residual_norm,
    })
}
