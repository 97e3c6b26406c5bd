use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::fit::functional_margin;
use super::{PolyError, PolynomialSurface};
use crate::arrays::{Hypercube, Matrix};

/// Default sample count for epsilon-equality certificates.
pub const DEFAULT_SAMPLES: usize = 10_000;

/// Bounded region over which two surfaces are compared.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Box(Hypercube),
    /// Convex hull of the rows.
    Hull(Matrix),
}

impl Region {
    pub fn dim(&self) -> usize {
        match self {
            Region::Box(b) => b.dim,
            Region::Hull(m) => m.cols(),
        }
    }

    pub fn summary(&self) -> RegionSummary {
        match self {
            Region::Box(b) => RegionSummary::Box {
                lower: b.lower,
                upper: b.upper,
                dim: b.dim,
            },
            Region::Hull(m) => RegionSummary::Hull {
                n_points: m.rows(),
                dim: m.cols(),
            },
        }
    }

    pub fn sampler(&self, seed: u64) -> RegionSampler<'_> {
        RegionSampler {
            region: self,
            rng: ChaCha8Rng::seed_from_u64(seed),
            emitted: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RegionSummary {
    Box { lower: f64, upper: f64, dim: usize },
    Hull { n_points: usize, dim: usize },
}

/// Deterministic point stream over a region.
///
/// Boxes are sampled uniformly. Hulls yield their generating points first and
/// then random convex combinations: a uniformly chosen subset of at most
/// `d + 1` points weighted by a flat Dirichlet draw.
pub struct RegionSampler<'a> {
    region: &'a Region,
    rng: ChaCha8Rng,
    emitted: usize,
}

impl RegionSampler<'_> {
    pub fn next_point(&mut self) -> Vec<f64> {
        let i = self.emitted;
        self.emitted += 1;
        match self.region {
            Region::Box(b) => (0..b.dim).map(|_| self.rng.random_range(b.lower..=b.upper)).collect(),
            Region::Hull(m) => {
                if i < m.rows() {
                    return m.row(i).to_vec();
                }
                let n = m.rows();
                let size = self.rng.random_range(1..=n.min(m.cols() + 1));
                let chosen = sample_indices(&mut self.rng, n, size);
                let weights: Vec<f64> = (0..size).map(|_| -(1.0 - self.rng.random::<f64>()).ln()).collect();
                let total: f64 = weights.iter().sum();
                let mut x = vec![0.0; m.cols()];
                for (w, idx) in weights.iter().zip(chosen.iter()) {
                    for (xt, v) in x.iter_mut().zip(m.row(idx)) {
                        *xt += w / total * v;
                    }
                }
                x
            }
        }
    }

    pub fn take_matrix(&mut self, n: usize) -> Matrix {
        let d = self.region.dim();
        let mut data = Vec::with_capacity(n * d);
        for _ in 0..n {
            data.extend(self.next_point());
        }
        Matrix::new(n, d, data).expect("sampler emits finite points")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    EpsilonEqual,
    NotEpsilonEqual { witness: Vec<f64>, deviation: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonCertificate {
    pub epsilon: f64,
    pub region: RegionSummary,
    /// Samples actually evaluated (fewer than requested after an early violation).
    pub n_samples: usize,
    pub seed: u64,
    pub max_observed_deviation: f64,
    pub verdict: Verdict,
}

impl EpsilonCertificate {
    pub fn is_equal(&self) -> bool {
        matches!(self.verdict, Verdict::EpsilonEqual)
    }
}

/// Sample-based check that `|f - g| < epsilon` over `region`.
///
/// Stops at the first violating sample. Passing is evidence, not a proof.
pub fn epsilon_equal(
    f: &PolynomialSurface,
    g: &PolynomialSurface,
    region: &Region,
    epsilon: f64,
    n_samples: usize,
    seed: u64,
) -> Result<EpsilonCertificate, PolyError> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(PolyError::InvalidParameter(format!("epsilon must be > 0, got {epsilon}")));
    }
    if n_samples == 0 {
        return Err(PolyError::InvalidParameter("n_samples must be at least 1".into()));
    }
    for dim in [g.dim(), region.dim()] {
        if dim != f.dim() {
            return Err(PolyError::DimensionMismatch {
                expected: f.dim(),
                found: dim,
            });
        }
    }
    if let Region::Hull(m) = region {
        if m.rows() == 0 {
            return Err(PolyError::EmptyPointSet("hull"));
        }
    }
    let mut sampler = region.sampler(seed);
    let mut max_dev = 0.0f64;
    for i in 0..n_samples {
        let x = sampler.next_point();
        let dev = (f.eval(&x) - g.eval(&x)).abs();
        max_dev = max_dev.max(dev);
        if !(dev < epsilon) {
            return Ok(EpsilonCertificate {
                epsilon,
                region: region.summary(),
                n_samples: i + 1,
                seed,
                max_observed_deviation: max_dev,
                verdict: Verdict::NotEpsilonEqual { witness: x, deviation: dev },
            });
        }
    }
    Ok(EpsilonCertificate {
        epsilon,
        region: region.summary(),
        n_samples,
        seed,
        max_observed_deviation: max_dev,
        verdict: Verdict::EpsilonEqual,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma2Entry {
    pub index: usize,
    pub certified_equal: bool,
    pub max_observed_deviation: f64,
    /// Only meaningful when `certified_equal`.
    pub same_signs: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma2Report {
    pub margin: f64,
    pub epsilon: f64,
    pub entries: Vec<Lemma2Entry>,
    /// Indices of certified-equal surfaces whose signs differ from `f` somewhere
    /// on the data.
    pub violations: Vec<usize>,
}

/// For every `g` that is sample-certified epsilon-equal to `f` on the hull of
/// `x ∪ y`, checks that `g` assigns the same sign as `f` to every data point.
pub fn lemma2_check(
    f: &PolynomialSurface,
    gs: &[PolynomialSurface],
    x: &Matrix,
    y: &Matrix,
    epsilon: f64,
    n_samples: usize,
    seed: u64,
) -> Result<Lemma2Report, PolyError> {
    let margin = functional_margin(f, x, y)?;
    if !(epsilon < margin) {
        return Err(PolyError::EpsilonAboveMargin { epsilon, margin });
    }
    let region = Region::Hull(x.vstack(y).map_err(|_| PolyError::DimensionMismatch {
        expected: x.cols(),
        found: y.cols(),
    })?);
    let mut entries = Vec::with_capacity(gs.len());
    let mut violations = Vec::new();
    for (index, g) in gs.iter().enumerate() {
        let cert = epsilon_equal(f, g, &region, epsilon, n_samples, seed)?;
        let certified_equal = cert.is_equal();
        let same_signs = x.iter_rows().all(|p| g.eval(p) > 0.0) && y.iter_rows().all(|p| g.eval(p) < 0.0);
        if certified_equal && !same_signs {
            violations.push(index);
        }
        entries.push(Lemma2Entry {
            index,
            certified_equal,
            max_observed_deviation: cert.max_observed_deviation,
            same_signs,
        });
    }
    Ok(Lemma2Report {
        margin,
        epsilon,
        entries,
        violations,
    })
}
