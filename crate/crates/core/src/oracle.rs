//! Independent reference computations used to check the solvers.
//!
//! Nothing here calls into the production code paths: hull distances are
//! recomputed by face enumeration or a primal active-set QP, singular values by
//! power iteration, gradients by central differences and polynomials term by
//! term. Compiled for tests and behind the `oracles` feature.

#![allow(clippy::needless_range_loop)]

use rand::Rng;
use rand_distr::StandardNormal;

use crate::arrays::{Hypercube, Matrix};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Projection of `q` onto the affine hull of the selected rows.
///
/// Returns affine weights (summing to one, possibly negative) and the squared
/// distance. Columns `v_j - v_0` are orthonormalised with modified Gram-Schmidt;
/// dependent columns get weight zero.
pub fn affine_projection(q: &[f64], points: &Matrix, subset: &[usize]) -> (Vec<f64>, f64) {
    let d = points.cols();
    let v0 = points.row(subset[0]);
    let k = subset.len() - 1;
    let scale = 1.0 + subset.iter().map(|&i| dot(points.row(i), points.row(i)).sqrt()).fold(0.0, f64::max);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    // r_cols[j] holds the coefficients of column j in the orthonormal basis.
    let mut r_cols: Vec<Vec<f64>> = Vec::new();
    let mut kept: Vec<usize> = Vec::new();
    for j in 0..k {
        let mut e: Vec<f64> = points.row(subset[j + 1]).iter().zip(v0).map(|(a, b)| a - b).collect();
        let mut coeffs = Vec::new();
        for b in &basis {
            let c = dot(b, &e);
            for t in 0..d {
                e[t] -= c * b[t];
            }
            coeffs.push(c);
        }
        let len = dot(&e, &e).sqrt();
        if len > 1e-10 * scale {
            e.iter_mut().for_each(|x| *x /= len);
            coeffs.push(len);
            basis.push(e);
            r_cols.push(coeffs);
            kept.push(j);
        }
    }
    let target: Vec<f64> = q.iter().zip(v0).map(|(a, b)| a - b).collect();
    let qt: Vec<f64> = basis.iter().map(|b| dot(b, &target)).collect();
    // Back-substitution on the upper-triangular factor.
    let m = basis.len();
    let mut beta = vec![0.0; m];
    for row in (0..m).rev() {
        let mut acc = qt[row];
        for col in row + 1..m {
            acc -= r_cols[col][row] * beta[col];
        }
        beta[row] = acc / r_cols[row][row];
    }
    let mut weights = vec![0.0; subset.len()];
    for (b, &j) in beta.iter().zip(&kept) {
        weights[j + 1] = *b;
    }
    weights[0] = 1.0 - weights[1..].iter().sum::<f64>();
    let mut x = vec![0.0; d];
    for (w, &i) in weights.iter().zip(subset) {
        for t in 0..d {
            x[t] += w * points.row(i)[t];
        }
    }
    let dist2 = x.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
    (weights, dist2)
}

/// Exact hull distance by enumerating every affinely independent support of
/// size at most `d + 1` (Caratheodory) and keeping feasible projections.
/// Exponential in `n`; meant for `n <= 12`.
pub fn hull_distance_enumeration(q: &[f64], points: &Matrix) -> f64 {
    let n = points.rows();
    let max_size = n.min(points.cols() + 1);
    let mut best = f64::INFINITY;
    for mask in 1u32..(1u32 << n) {
        if mask.count_ones() as usize > max_size {
            continue;
        }
        let subset: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let (w, dist2) = affine_projection(q, points, &subset);
        if w.iter().all(|&x| x >= -1e-12) {
            best = best.min(dist2);
        }
    }
    best.max(0.0).sqrt()
}

/// Hull distance by a primal active-set method for
/// `min |P^T l - q|^2, sum l = 1, l >= 0` (Lawson-Hanson on the simplex).
pub fn hull_distance_active_set(q: &[f64], points: &Matrix) -> f64 {
    let n = points.rows();
    let d = points.cols();
    let dist2 = |i: usize| points.row(i).iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    let start = (0..n).min_by(|&a, &b| dist2(a).total_cmp(&dist2(b))).unwrap();
    let mut lambda = vec![0.0; n];
    lambda[start] = 1.0;
    let mut active = vec![start];
    let scale = 1.0 + (0..n).map(|i| dot(points.row(i), points.row(i))).fold(0.0, f64::max);

    for _outer in 0..20 * n + 100 {
        // Inner loop: move toward the affine solution on the active set,
        // dropping points whose weight would go negative.
        for _inner in 0..n + 1 {
            let (mu, _) = affine_projection(q, points, &active);
            if mu.iter().all(|&m| m > 0.0) {
                for (&i, &m) in active.iter().zip(&mu) {
                    lambda[i] = m;
                }
                break;
            }
            let mut alpha = 1.0;
            for (&i, &m) in active.iter().zip(&mu) {
                if m <= 0.0 {
                    let denom = lambda[i] - m;
                    if denom > 0.0 {
                        alpha = f64::min(alpha, lambda[i] / denom);
                    }
                }
            }
            for (&i, &m) in active.iter().zip(&mu) {
                lambda[i] += alpha * (m - lambda[i]);
            }
            let before = active.len();
            active.retain(|&i| lambda[i] > 1e-15);
            if active.len() == before {
                // Guarantee progress by removing the smallest weight.
                let (pos, _) = active
                    .iter()
                    .enumerate()
                    .min_by(|a, b| lambda[*a.1].total_cmp(&lambda[*b.1]))
                    .unwrap();
                active.remove(pos);
            }
            for i in 0..n {
                if !active.contains(&i) {
                    lambda[i] = 0.0;
                }
            }
            let total: f64 = active.iter().map(|&i| lambda[i]).sum();
            active.iter().for_each(|&i| lambda[i] /= total);
        }

        let mut x = vec![0.0; d];
        for &i in &active {
            for t in 0..d {
                x[t] += lambda[i] * points.row(i)[t];
            }
        }
        let r: Vec<f64> = x.iter().zip(q).map(|(a, b)| a - b).collect();
        let level = dot(&r, &x);
        let candidate = (0..n)
            .filter(|i| !active.contains(i))
            .map(|i| (i, dot(points.row(i), &r)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match candidate {
            Some((t, g)) if g < level - 1e-14 * scale => active.push(t),
            _ => return dot(&r, &r).sqrt(),
        }
    }
    panic!("active-set oracle did not terminate");
}

/// Uniformly random orthogonal matrix (row-major) via Gram-Schmidt.
pub fn random_rotation<R: Rng>(d: usize, rng: &mut R) -> Vec<f64> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(d);
    while rows.len() < d {
        let mut v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        for r in &rows {
            let c = dot(r, &v);
            for t in 0..d {
                v[t] -= c * r[t];
            }
        }
        let len = dot(&v, &v).sqrt();
        if len > 1e-8 {
            v.iter_mut().for_each(|x| *x /= len);
            rows.push(v);
        }
    }
    rows.concat()
}

/// Largest singular value of `a` and its right singular vector, by power
/// iteration on `A^T A` until the Rayleigh quotient stops moving.
pub fn power_iteration(a: &Matrix, max_iter: usize) -> (f64, Vec<f64>) {
    let (k, d) = (a.rows(), a.cols());
    let mut v = vec![1.0; d];
    for (i, x) in v.iter_mut().enumerate() {
        *x += 0.01 * i as f64;
    }
    let mut sigma = 0.0;
    for _ in 0..max_iter {
        let len = dot(&v, &v).sqrt();
        v.iter_mut().for_each(|x| *x /= len);
        let av: Vec<f64> = (0..k).map(|i| dot(a.row(i), &v)).collect();
        let mut atav = vec![0.0; d];
        for i in 0..k {
            for j in 0..d {
                atav[j] += a.get(i, j) * av[i];
            }
        }
        let next = dot(&av, &av).sqrt();
        v = atav;
        if (next - sigma).abs() <= 1e-15 * next {
            sigma = next;
            break;
        }
        sigma = next;
    }
    let len = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= len);
    (sigma, v)
}

/// Central finite differences of a scalar function.
pub fn central_difference<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = probe[i];
            probe[i] = orig + h;
            let up = f(&probe);
            probe[i] = orig - h;
            let down = f(&probe);
            probe[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Term-by-term monomial evaluation in the cube's `[-1, 1]` coordinates.
pub fn polynomial_term_sum(multi_indices: &[Vec<u32>], coefficients: &[f64], domain: &Hypercube, x: &[f64]) -> f64 {
    let t: Vec<f64> = x
        .iter()
        .map(|&v| (2.0 * v - domain.lower - domain.upper) / (domain.upper - domain.lower))
        .collect();
    multi_indices
        .iter()
        .zip(coefficients)
        .map(|(alpha, c)| c * alpha.iter().zip(&t).map(|(&e, &ti)| ti.powi(e as i32)).product::<f64>())
        .sum()
}
