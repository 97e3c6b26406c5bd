//! Point clouds, labeled datasets, hypercube domains and their on-disk formats.

mod csv_io;
mod generate;
mod hsm;

pub use csv_io::{load_csv, load_csv_unlabeled, save_csv, save_csv_unlabeled, LabelColumn};
pub use generate::{
    diagonal_blobs, gaussian_blobs, gaussian_cloud, uniform_box, xor_dataset, DiagonalBlobs,
};
pub use hsm::{decode_matrix, encode_matrix, load_matrix, save_matrix, HSM1_HEADER_LEN, HSM1_MAGIC};

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ArrayError {
    #[error("failed to access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("no data rows")]
    NoDataRows,
    #[error("row {row}: expected {expected} columns, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}, column '{column}': cannot parse {value:?} as a number")]
    NonNumeric {
        row: usize,
        column: String,
        value: String,
    },
    #[error("row {row}, column '{column}': label {value:?} is not a nonnegative integer")]
    BadLabel {
        row: usize,
        column: String,
        value: String,
    },
    #[error("unknown label column {0}")]
    UnknownLabelColumn(String),
    #[error("row {row}, column {column}: non-finite value")]
    NonFinite { row: usize, column: usize },
    #[error("empty matrix not allowed")]
    EmptyMatrix,
    #[error("bad magic bytes {0:?}, expected \"HSM1\"")]
    BadMagic([u8; 4]),
    #[error("reserved header bytes must be zero")]
    ReservedNonZero,
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("trailing bytes after payload: expected {expected} bytes, found {found}")]
    TrailingBytes { expected: usize, found: usize },
    #[error("matrix dimensions {rows}x{cols} overflow the format")]
    DimensionOverflow { rows: usize, cols: usize },
    #[error("data length {len} does not match shape {rows}x{cols}")]
    ShapeMismatch { rows: usize, cols: usize, len: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("labels length {labels} does not match {points} points")]
    LabelCount { points: usize, labels: usize },
    #[error("empty class")]
    EmptyClass,
    #[error("at least one center is required")]
    NoCenters,
    #[error("standard deviation must be positive, got {0}")]
    NonPositiveStd(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid box: lower {lower} must be below upper {upper} and dim >= 1 (dim {dim})")]
    InvalidBox { lower: f64, upper: f64, dim: usize },
}

/// Dense row-major matrix of doubles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, ArrayError> {
        if rows.checked_mul(cols) != Some(data.len()) {
            return Err(ArrayError::ShapeMismatch {
                rows,
                cols,
                len: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds a matrix from equally sized rows. An empty slice gives a 0x0 matrix.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, ArrayError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(ArrayError::DimensionMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn iter_rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn vstack(&self, other: &Matrix) -> Result<Matrix, ArrayError> {
        if self.rows == 0 {
            return Ok(other.clone());
        }
        if other.rows == 0 {
            return Ok(self.clone());
        }
        if self.cols != other.cols {
            return Err(ArrayError::DimensionMismatch {
                expected: self.cols,
                found: other.cols,
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    pub fn select_rows(&self, indices: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }
}

/// Labeled point cloud. Labels are dense class ids starting at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    points: Matrix,
    labels: Vec<usize>,
}

impl Dataset {
    pub fn new(points: Matrix, labels: Vec<usize>) -> Result<Self, ArrayError> {
        if points.is_empty() {
            return Err(ArrayError::NoDataRows);
        }
        if labels.len() != points.rows() {
            return Err(ArrayError::LabelCount {
                points: points.rows(),
                labels: labels.len(),
            });
        }
        for (i, row) in points.iter_rows().enumerate() {
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(ArrayError::NonFinite { row: i, column: j });
            }
        }
        Ok(Self { points, labels })
    }

    /// Wraps a point matrix with every label set to zero.
    pub fn unlabeled(points: Matrix) -> Result<Self, ArrayError> {
        let n = points.rows();
        Self::new(points, vec![0; n])
    }

    pub fn points(&self) -> &Matrix {
        &self.points
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n(&self) -> usize {
        self.points.rows()
    }

    pub fn d(&self) -> usize {
        self.points.cols()
    }

    pub fn n_classes(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }

    pub fn point(&self, i: usize) -> &[f64] {
        self.points.row(i)
    }

    /// Points carrying `label`, in dataset order.
    pub fn class_points(&self, label: usize) -> Matrix {
        let idx: Vec<usize> = (0..self.n()).filter(|&i| self.labels[i] == label).collect();
        self.points.select_rows(&idx)
    }
}

/// The hypercube `[lower, upper]^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hypercube {
    pub lower: f64,
    pub upper: f64,
    pub dim: usize,
}

impl Hypercube {
    pub fn new(lower: f64, upper: f64, dim: usize) -> Result<Self, ArrayError> {
        if !(lower.is_finite() && upper.is_finite() && lower < upper && dim >= 1) {
            return Err(ArrayError::InvalidBox { lower, upper, dim });
        }
        Ok(Self { lower, upper, dim })
    }

    /// `[-1, 1]^dim`, where scaled and raw coordinates coincide.
    pub fn symmetric_unit(dim: usize) -> Self {
        Self {
            lower: -1.0,
            upper: 1.0,
            dim,
        }
    }

    /// Smallest cube containing every point, widened by `pad` times its side on each end.
    pub fn enclosing(points: &Matrix, pad: f64) -> Result<Self, ArrayError> {
        if points.is_empty() {
            return Err(ArrayError::EmptyMatrix);
        }
        let lo = points.as_slice().iter().copied().fold(f64::INFINITY, f64::min);
        let hi = points
            .as_slice()
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        let side = if hi > lo { hi - lo } else { 1.0 };
        Self::new(lo - pad * side, hi + pad * side, points.cols())
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn diameter(&self) -> f64 {
        self.width() * (self.dim as f64).sqrt()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim && x.iter().all(|&v| v >= self.lower && v <= self.upper)
    }

    /// Affine map of one coordinate onto `[-1, 1]`.
    pub fn to_unit(&self, v: f64) -> f64 {
        (2.0 * v - (self.lower + self.upper)) / self.width()
    }

    pub fn from_unit(&self, t: f64) -> f64 {
        0.5 * (t * self.width() + self.lower + self.upper)
    }

    pub fn corners(&self) -> Vec<Vec<f64>> {
        (0..1usize << self.dim)
            .map(|mask| {
                (0..self.dim)
                    .map(|i| {
                        if mask >> i & 1 == 1 {
                            self.upper
                        } else {
                            self.lower
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_rejects_non_finite() {
        let m = Matrix::new(2, 1, vec![0.0, f64::NAN]).unwrap();
        assert!(matches!(
            Dataset::new(m, vec![0, 1]),
            Err(ArrayError::NonFinite { row: 1, column: 0 })
        ));
    }

    #[test]
    fn dataset_rejects_label_count() {
        let m = Matrix::new(2, 1, vec![0.0, 1.0]).unwrap();
        assert!(Dataset::new(m, vec![0]).is_err());
    }

    #[test]
    fn box_scaling_round_trips() {
        let b = Hypercube::new(-3.0, 5.0, 2).unwrap();
        assert_eq!(b.to_unit(-3.0), -1.0);
        assert_eq!(b.to_unit(5.0), 1.0);
        assert_eq!(b.to_unit(1.0), 0.0);
        assert!((b.from_unit(b.to_unit(2.25)) - 2.25).abs() < 1e-15);
        assert!(Hypercube::new(1.0, 1.0, 2).is_err());
        assert!(Hypercube::new(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn class_points_keeps_order() {
        let m = Matrix::from_rows(&[[0.0], [1.0], [2.0]]).unwrap();
        let ds = Dataset::new(m, vec![1, 0, 1]).unwrap();
        assert_eq!(ds.class_points(1).as_slice(), &[0.0, 2.0]);
        assert_eq!(ds.n_classes(), 2);
    }
}
