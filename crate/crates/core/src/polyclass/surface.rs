use serde::{Deserialize, Serialize};

use super::PolyError;
use crate::arrays::{Hypercube, Matrix};

/// Exponent vector of one monomial.
pub type MultiIndex = Vec<u32>;

/// Number of monomials of total degree at most `degree` in `dim` variables,
/// `C(dim + degree, degree)`.
pub fn basis_len(dim: usize, degree: usize) -> usize {
    let mut acc: u128 = 1;
    for i in 1..=degree as u128 {
        acc = acc * (dim as u128 + i) / i;
    }
    acc as usize
}

/// Graded-lexicographic multi-indices: by total degree, then descending
/// lexicographic within a degree (`x0` before `x1`), so the basis for a lower
/// degree is a prefix of the basis for a higher one.
pub fn graded_lex(dim: usize, degree: usize) -> Vec<MultiIndex> {
    fn compositions(total: u32, parts: usize, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=total).rev() {
            prefix.push(first);
            compositions(total - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::with_capacity(basis_len(dim, degree));
    for total in 0..=degree as u32 {
        compositions(total, dim, &mut Vec::with_capacity(dim), &mut out);
    }
    out
}

/// Multivariate polynomial in the monomial basis of the domain's scaled
/// `[-1, 1]^d` coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "SurfaceWire", try_from = "SurfaceWire")]
pub struct PolynomialSurface {
    domain: Hypercube,
    degree: usize,
    basis: Vec<MultiIndex>,
    coefficients: Vec<f64>,
}

impl PolynomialSurface {
    pub fn new(domain: Hypercube, degree: usize, coefficients: Vec<f64>) -> Result<Self, PolyError> {
        let basis = graded_lex(domain.dim, degree);
        if coefficients.len() != basis.len() {
            return Err(PolyError::CoefficientCount {
                expected: basis.len(),
                found: coefficients.len(),
            });
        }
        if !coefficients.iter().all(|c| c.is_finite()) {
            return Err(PolyError::NonFinite);
        }
        Ok(Self {
            domain,
            degree,
            basis,
            coefficients,
        })
    }

    pub fn zero(domain: Hypercube, degree: usize) -> Self {
        let basis = graded_lex(domain.dim, degree);
        let coefficients = vec![0.0; basis.len()];
        Self {
            domain,
            degree,
            basis,
            coefficients,
        }
    }

    pub fn constant(domain: Hypercube, value: f64) -> Result<Self, PolyError> {
        Self::new(domain, 0, vec![value])
    }

    /// Builds a surface from `(exponents, coefficient)` pairs in scaled coordinates.
    pub fn from_terms(domain: Hypercube, degree: usize, terms: &[(&[u32], f64)]) -> Result<Self, PolyError> {
        let mut s = Self::zero(domain, degree);
        for (alpha, c) in terms {
            let idx = s
                .basis
                .iter()
                .position(|b| b.as_slice() == *alpha)
                .ok_or_else(|| PolyError::UnknownMonomial(alpha.to_vec()))?;
            s.coefficients[idx] += c;
        }
        if !s.coefficients.iter().all(|c| c.is_finite()) {
            return Err(PolyError::NonFinite);
        }
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.domain.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn domain(&self) -> &Hypercube {
        &self.domain
    }

    pub fn basis(&self) -> &[MultiIndex] {
        &self.basis
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Monomial values at `x`, aligned with [`basis`](Self::basis).
    pub fn features(&self, x: &[f64]) -> Vec<f64> {
        monomials(&self.domain, self.degree, &self.basis, x)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim());
        self.features(x)
            .iter()
            .zip(&self.coefficients)
            .map(|(m, c)| m * c)
            .sum()
    }

    /// Value plus whether `x` lies in the domain box.
    pub fn eval_flagged(&self, x: &[f64]) -> (f64, bool) {
        (self.eval(x), self.domain.contains(x))
    }

    /// Same polynomial written in the basis of a higher degree.
    pub fn elevate(&self, degree: usize) -> Result<Self, PolyError> {
        if degree < self.degree {
            return Err(PolyError::InvalidParameter(format!(
                "cannot lower degree {} to {degree}",
                self.degree
            )));
        }
        let mut coefficients = self.coefficients.clone();
        coefficients.resize(basis_len(self.dim(), degree), 0.0);
        Self::new(self.domain, degree, coefficients)
    }

    /// `a * self + b * other`, over the common degree.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self, PolyError> {
        if self.domain != other.domain {
            return Err(PolyError::DomainMismatch);
        }
        let degree = self.degree.max(other.degree);
        let lhs = self.elevate(degree)?;
        let rhs = other.elevate(degree)?;
        let coefficients = lhs
            .coefficients
            .iter()
            .zip(&rhs.coefficients)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Self::new(self.domain, degree, coefficients)
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        self.combine(1.0, other, 1.0)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut s = self.clone();
        s.coefficients.iter_mut().for_each(|c| *c *= factor);
        s
    }

    pub fn eval_rows(&self, points: &Matrix) -> Vec<f64> {
        points.iter_rows().map(|x| self.eval(x)).collect()
    }
}

/// Monomial features of `x` over the cube's scaled coordinates.
pub(crate) fn monomials(domain: &Hypercube, degree: usize, basis: &[MultiIndex], x: &[f64]) -> Vec<f64> {
    let d = domain.dim;
    let stride = degree + 1;
    let mut powers = vec![1.0; d * stride];
    for (i, &xi) in x.iter().enumerate().take(d) {
        let t = domain.to_unit(xi);
        for e in 1..stride {
            powers[i * stride + e] = powers[i * stride + e - 1] * t;
        }
    }
    basis
        .iter()
        .map(|alpha| {
            alpha
                .iter()
                .enumerate()
                .map(|(i, &e)| powers[i * stride + e as usize])
                .product()
        })
        .collect()
}

/// Design matrix with one row of monomial features per point.
pub(crate) fn design_matrix(domain: &Hypercube, degree: usize, points: &[&[f64]]) -> nalgebra::DMatrix<f64> {
    let basis = graded_lex(domain.dim, degree);
    let mut m = nalgebra::DMatrix::zeros(points.len(), basis.len());
    for (r, x) in points.iter().enumerate() {
        for (c, v) in monomials(domain, degree, &basis, x).into_iter().enumerate() {
            m[(r, c)] = v;
        }
    }
    m
}

#[derive(Serialize, Deserialize)]
struct DomainWire {
    lower: f64,
    upper: f64,
}

#[derive(Serialize, Deserialize)]
struct SurfaceWire {
    dim: usize,
    degree: usize,
    domain: DomainWire,
    multi_indices: Vec<MultiIndex>,
    coefficients: Vec<f64>,
}

impl From<PolynomialSurface> for SurfaceWire {
    fn from(s: PolynomialSurface) -> Self {
        SurfaceWire {
            dim: s.domain.dim,
            degree: s.degree,
            domain: DomainWire {
                lower: s.domain.lower,
                upper: s.domain.upper,
            },
            multi_indices: s.basis,
            coefficients: s.coefficients,
        }
    }
}

impl TryFrom<SurfaceWire> for PolynomialSurface {
    type Error = PolyError;

    fn try_from(w: SurfaceWire) -> Result<Self, Self::Error> {
        let domain = Hypercube::new(w.domain.lower, w.domain.upper, w.dim)
            .map_err(|e| PolyError::InvalidParameter(e.to_string()))?;
        let s = PolynomialSurface::new(domain, w.degree, w.coefficients)?;
        if s.basis != w.multi_indices {
            return Err(PolyError::InvalidParameter(
                "multi_indices are not the graded-lex basis for this dimension and degree".into(),
            ));
        }
        Ok(s)
    }
}
