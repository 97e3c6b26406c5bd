//! "HSM1" binary matrix container.
//!
//! Layout: magic `HSM1`, rows (u32 LE), cols (u32 LE), four reserved zero
//! bytes, then `rows * cols` little-endian f64 values in row-major order.

use std::path::Path;

use super::{ArrayError, Matrix};

pub const HSM1_MAGIC: [u8; 4] = *b"HSM1";
pub const HSM1_HEADER_LEN: usize = 16;

pub fn encode_matrix(m: &Matrix) -> Result<Vec<u8>, ArrayError> {
    if m.is_empty() {
        return Err(ArrayError::EmptyMatrix);
    }
    let overflow = ArrayError::DimensionOverflow {
        rows: m.rows(),
        cols: m.cols(),
    };
    let rows = u32::try_from(m.rows()).map_err(|_| overflow)?;
    let cols = u32::try_from(m.cols()).map_err(|_| ArrayError::DimensionOverflow {
        rows: m.rows(),
        cols: m.cols(),
    })?;
    if let Some(pos) = m.as_slice().iter().position(|v| !v.is_finite()) {
        return Err(ArrayError::NonFinite {
            row: pos / m.cols(),
            column: pos % m.cols(),
        });
    }
    let mut out = Vec::with_capacity(HSM1_HEADER_LEN + 8 * m.as_slice().len());
    out.extend_from_slice(&HSM1_MAGIC);
    out.extend_from_slice(&rows.to_le_bytes());
    out.extend_from_slice(&cols.to_le_bytes());
    out.extend_from_slice(&[0u8; 4]);
    for v in m.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn decode_matrix(bytes: &[u8]) -> Result<Matrix, ArrayError> {
    if bytes.len() < HSM1_HEADER_LEN {
        return Err(ArrayError::Truncated {
            expected: HSM1_HEADER_LEN,
            found: bytes.len(),
        });
    }
    let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
    if magic != HSM1_MAGIC {
        return Err(ArrayError::BadMagic(magic));
    }
    let rows = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    if bytes[12..16] != [0u8; 4] {
        return Err(ArrayError::ReservedNonZero);
    }
    if rows == 0 || cols == 0 {
        return Err(ArrayError::EmptyMatrix);
    }
    let expected = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(8))
        .and_then(|n| n.checked_add(HSM1_HEADER_LEN))
        .ok_or(ArrayError::DimensionOverflow { rows, cols })?;
    if bytes.len() < expected {
        return Err(ArrayError::Truncated {
            expected,
            found: bytes.len(),
        });
    }
    if bytes.len() > expected {
        return Err(ArrayError::TrailingBytes {
            expected,
            found: bytes.len(),
        });
    }
    let data = bytes[HSM1_HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Matrix::new(rows, cols, data)
}

pub fn save_matrix(path: impl AsRef<Path>, m: &Matrix) -> Result<(), ArrayError> {
    let path = path.as_ref();
    let bytes = encode_matrix(m)?;
    std::fs::write(path, bytes).map_err(|source| ArrayError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<Matrix, ArrayError> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| ArrayError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    decode_matrix(&bytes)
}
