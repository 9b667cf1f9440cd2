//! Operator-norm estimation for sparse complex matrices.
//!
//! The largest singular value is the square root of the top eigenvalue of the
//! Gram matrix `A*A`. [`op_norm`] runs Lanczos with full reorthogonalization
//! on the Gram matrix; [`op_norm_power`] is plain power iteration, and
//! [`dense_norm`] a full SVD used as an independent check on small grids.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::basis::SparseMatrix;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub iterations: usize,
    /// False when `max_iter` was exhausted; `value` is then the last estimate.
    pub converged: bool,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn start_vector(dim: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..dim)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

struct Gram<'a> {
    m: &'a SparseMatrix,
    tmp: Vec<Complex64>,
}

impl Gram<'_> {
    fn apply(&mut self, x: &[Complex64], out: &mut [Complex64]) {
        self.m.mul_vec(x, &mut self.tmp);
        self.m.adjoint_mul_vec(&self.tmp, out);
    }
}

/// Largest eigenvalue of the symmetric tridiagonal matrix with diagonal
/// `alpha` and off-diagonal `beta`, with the last component of its
/// eigenvector.
fn top_ritz(alpha: &[f64], beta: &[f64]) -> (f64, f64) {
    let k = alpha.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let (idx, &theta) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty tridiagonal");
    (theta, eig.eigenvectors[(k - 1, idx)])
}

/// Largest singular value of `m` to relative tolerance `tol`.
///
/// Stops when the residual bound of the top Ritz pair falls below
/// `tol · θ`, or when the Krylov space becomes invariant.
pub fn op_norm(m: &SparseMatrix, tol: f64, max_iter: usize) -> NormEstimate {
    op_norm_seeded(m, tol, max_iter, DEFAULT_SEED)
}

pub fn op_norm_seeded(m: &SparseMatrix, tol: f64, max_iter: usize, seed: u64) -> NormEstimate {
    let dim = m.dim;
    if dim == 0 || m.nnz() == 0 {
        return NormEstimate { value: 0.0, iterations: 0, converged: true };
    }
    let mut gram = Gram { m, tmp: vec![Complex64::new(0.0, 0.0); dim] };
    let mut q = start_vector(dim, seed);
    let n0 = norm(&q);
    q.iter_mut().for_each(|v| *v /= n0);
    let mut basis: Vec<Vec<Complex64>> = vec![q];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    let mut theta = 0.0;
    let limit = max_iter.max(1).min(dim);
    for it in 1..=limit {
        let qk = basis.last().expect("basis is nonempty");
        gram.apply(qk, &mut w);
        alpha.push(dot(qk, &w).re);
        // Two passes of classical Gram-Schmidt against the whole basis.
        for _ in 0..2 {
            for b in &basis {
                let c = dot(b, &w);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let (t, last) = top_ritz(&alpha, &beta);
        theta = t.max(0.0);
        let b = norm(&w);
        let scale = theta.max(f64::MIN_POSITIVE);
        if b <= 1e-14 * scale.max(alpha.iter().fold(0.0f64, |a, x| a.max(x.abs())))
            || (b * last).abs() <= tol * scale
        {
            return NormEstimate { value: theta.sqrt(), iterations: it, converged: true };
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    NormEstimate { value: theta.sqrt(), iterations: limit, converged: limit == dim }
}

/// Power iteration on the Gram matrix; stops when successive eigenvalue
/// estimates agree to relative tolerance `tol`.
pub fn op_norm_power(m: &SparseMatrix, tol: f64, max_iter: usize) -> NormEstimate {
    let dim = m.dim;
    if dim == 0 || m.nnz() == 0 {
        return NormEstimate { value: 0.0, iterations: 0, converged: true };
    }
    let mut gram = Gram { m, tmp: vec![Complex64::new(0.0, 0.0); dim] };
    let mut v = start_vector(dim, DEFAULT_SEED);
    let n0 = norm(&v);
    v.iter_mut().for_each(|x| *x /= n0);
    let mut w = vec![Complex64::new(0.0, 0.0); dim];
    let mut lambda = 0.0;
    for it in 1..=max_iter.max(1) {
        gram.apply(&v, &mut w);
        let next = norm(&w);
        if next == 0.0 {
            return NormEstimate { value: 0.0, iterations: it, converged: true };
        }
        let done = (next - lambda).abs() <= tol * next;
        lambda = next;
        v.iter_mut().zip(&w).for_each(|(x, y)| *x = y / next);
        if done {
            return NormEstimate { value: lambda.sqrt(), iterations: it, converged: true };
        }
    }
    NormEstimate { value: lambda.sqrt(), iterations: max_iter.max(1), converged: false }
}

/// Largest singular value from a dense SVD.
pub fn dense_norm(m: &SparseMatrix) -> f64 {
    let d = m.to_dense();
    d.singular_values().iter().fold(0.0f64, |a, &s| a.max(s))
}
