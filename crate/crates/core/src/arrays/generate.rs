//! Seeded synthetic datasets. Every generator is a pure function of its
//! arguments; ChaCha8 keeps the streams stable across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{ArrayError, Dataset, Hypercube, Matrix};

/// Isotropic Gaussian blobs, one class per center, emitted class by class.
pub fn gaussian_blobs(
    n_per_class: usize,
    d: usize,
    centers: &[Vec<f64>],
    std: f64,
    seed: u64,
) -> Result<Dataset, ArrayError> {
    if centers.is_empty() {
        return Err(ArrayError::NoCenters);
    }
    if n_per_class == 0 {
        return Err(ArrayError::EmptyClass);
    }
    if !(std > 0.0) || !std.is_finite() {
        return Err(ArrayError::NonPositiveStd(std));
    }
    if let Some(c) = centers.iter().find(|c| c.len() != d) {
        return Err(ArrayError::DimensionMismatch {
            expected: d,
            found: c.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(centers.len() * n_per_class * d);
    let mut labels = Vec::with_capacity(centers.len() * n_per_class);
    for (label, center) in centers.iter().enumerate() {
        for _ in 0..n_per_class {
            for &c in center {
                let z: f64 = rng.sample(StandardNormal);
                data.push(c + std * z);
            }
            labels.push(label);
        }
    }
    Dataset::new(Matrix::new(labels.len(), d, data)?, labels)
}

/// Four quadrant clusters around `(±1, ±1)`; same-sign quadrants get label 0.
pub fn xor_dataset(n_per_quadrant: usize, noise_std: f64, seed: u64) -> Result<Dataset, ArrayError> {
    if n_per_quadrant == 0 {
        return Err(ArrayError::EmptyClass);
    }
    if !(noise_std >= 0.0) || !noise_std.is_finite() {
        return Err(ArrayError::InvalidParameter(format!(
            "noise_std must be >= 0, got {noise_std}"
        )));
    }
    const QUADRANTS: [([f64; 2], usize); 4] = [
        ([1.0, 1.0], 0),
        ([-1.0, 1.0], 1),
        ([-1.0, -1.0], 0),
        ([1.0, -1.0], 1),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(8 * n_per_quadrant);
    let mut labels = Vec::with_capacity(4 * n_per_quadrant);
    for (center, label) in QUADRANTS {
        for _ in 0..n_per_quadrant {
            for c in center {
                let z: f64 = rng.sample(StandardNormal);
                data.push(c + noise_std * z);
            }
            labels.push(label);
        }
    }
    Dataset::new(Matrix::new(labels.len(), 2, data)?, labels)
}

/// `n` standard-normal points in `d` dimensions.
pub fn gaussian_cloud(n: usize, d: usize, seed: u64) -> Result<Matrix, ArrayError> {
    if n == 0 || d == 0 {
        return Err(ArrayError::EmptyMatrix);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n * d).map(|_| rng.sample(StandardNormal)).collect();
    Matrix::new(n, d, data)
}

/// `n` points drawn uniformly from the cube.
pub fn uniform_box(n: usize, domain: &Hypercube, seed: u64) -> Result<Matrix, ArrayError> {
    if n == 0 {
        return Err(ArrayError::EmptyMatrix);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n * domain.dim)
        .map(|_| rng.random_range(domain.lower..=domain.upper))
        .collect();
    Matrix::new(n, domain.dim, data)
}

/// Two parallel elongated 2-D clusters running along the anti-diagonal.
///
/// Class 0 sits on the line `(x0 + x1)/sqrt(2) = center + gap/2`, class 1 on
/// `center - gap/2`. With `center` well away from zero and long clusters, the
/// classes overlap in each single coordinate and no line through the origin
/// separates them, so every separating line needs both weights and a bias.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalBlobs {
    pub n_per_class: usize,
    pub center: f64,
    pub gap: f64,
    pub half_length: f64,
    pub noise_std: f64,
}

impl Default for DiagonalBlobs {
    fn default() -> Self {
        Self {
            n_per_class: 40,
            center: 2.0,
            gap: 1.0,
            half_length: 2.5,
            noise_std: 0.05,
        }
    }
}

pub fn diagonal_blobs(cfg: &DiagonalBlobs, seed: u64) -> Result<Dataset, ArrayError> {
    if cfg.n_per_class == 0 {
        return Err(ArrayError::EmptyClass);
    }
    if !(cfg.noise_std >= 0.0 && cfg.half_length >= 0.0 && cfg.gap > 0.0) {
        return Err(ArrayError::InvalidParameter(
            "diagonal blobs need gap > 0, half_length >= 0, noise_std >= 0".into(),
        ));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(4 * cfg.n_per_class);
    let mut labels = Vec::with_capacity(2 * cfg.n_per_class);
    for (label, offset) in [(0usize, cfg.gap / 2.0), (1, -cfg.gap / 2.0)] {
        let across = cfg.center + offset;
        for _ in 0..cfg.n_per_class {
            let along = if cfg.half_length > 0.0 {
                rng.random_range(-cfg.half_length..=cfg.half_length)
            } else {
                0.0
            };
            let z0: f64 = rng.sample(StandardNormal);
            let z1: f64 = rng.sample(StandardNormal);
            data.push(s * (across + along) + cfg.noise_std * z0);
            data.push(s * (across - along) + cfg.noise_std * z1);
            labels.push(label);
        }
    }
    Dataset::new(Matrix::new(labels.len(), 2, data)?, labels)
}
