//! Hermitian eigen-solves and small matrix utilities.
//!
//! Complex Hermitian matrices are reduced to the real symmetric embedding
//! `[[Re, -Im], [Im, Re]]` of twice the size; every eigenvalue of the original
//! appears twice in the embedding.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Accepted deviation from Hermiticity before symmetrization.
pub const HERMITIAN_TOL: f64 = 1e-10;

pub fn hermitian_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn checked_symmetrize(m: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(m.nrows(), m.ncols()));
    }
    let dev = hermitian_deviation(m);
    if !(dev <= HERMITIAN_TOL) {
        return Err(Error::NotHermitian(dev));
    }
    Ok((m + m.adjoint()) * Complex64::new(0.5, 0.0))
}

fn real_embedding(m: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = m[(r % n, c % n)];
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Sorted eigenvalues of a Hermitian matrix (each once).
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let h = checked_symmetrize(m)?;
    let mut vals: Vec<f64> = real_embedding(&h).symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    Ok(vals.into_iter().step_by(2).collect())
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &DMatrix<Complex64>) -> Result<f64> {
    let h = checked_symmetrize(m)?;
    Ok(real_embedding(&h)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min))
}

/// Eigenvalues closer than this to the minimum count as degenerate with it.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Smallest eigenvalue with a deterministic unit eigenvector.
///
/// The eigenvector is the normalized projection of the first basis vector
/// `e_k` with a nonzero projection onto the (possibly degenerate) minimal
/// eigenspace. It maximizes `|v_k|` within that space and has `v_k` real and
/// positive.
pub fn min_eigenpair(m: &DMatrix<Complex64>) -> Result<(f64, DVector<Complex64>)> {
    let h = checked_symmetrize(m)?;
    let n = h.nrows();
    if n == 0 {
        return Err(Error::DimensionMismatch(0, 0));
    }
    let eig = real_embedding(&h).symmetric_eigen();
    let lambda = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let mut basis: Vec<DVector<Complex64>> = Vec::new();
    for (idx, &val) in eig.eigenvalues.iter().enumerate() {
        if val > lambda + DEGENERACY_TOL {
            continue;
        }
        let col = eig.eigenvectors.column(idx);
        let mut u = DVector::from_fn(n, |i, _| Complex64::new(col[i], col[i + n]));
        for b in &basis {
            let overlap = b.dotc(&u);
            u -= b * overlap;
        }
        let norm = u.norm();
        if norm > 1e-8 {
            basis.push(u / Complex64::new(norm, 0.0));
        }
    }
    for k in 0..n {
        let v = basis
            .iter()
            .fold(DVector::zeros(n), |acc: DVector<Complex64>, b| acc + b * b[k].conj());
        let norm = v.norm();
        if norm > 1e-8 {
            return Ok((lambda, v / Complex64::new(norm, 0.0)));
        }
    }
    Err(Error::NoConvergence(n))
}

/// Determinant of a 3x3 Hermitian matrix (real by construction).
pub fn det3_hermitian(m: &DMatrix<Complex64>) -> f64 {
    let (a, b, c) = (m[(0, 0)].re, m[(1, 1)].re, m[(2, 2)].re);
    let (x, y, z) = (m[(0, 1)], m[(1, 2)], m[(0, 2)]);
    a * b * c + 2.0 * (x * y * z.conj()).re - a * y.norm_sqr() - b * z.norm_sqr() - c * x.norm_sqr()
}

/// Partial transpose on the first factor of a `d1 x d2` bipartite matrix:
/// `[A^G]_{(i,j),(k,l)} = A_{(k,j),(i,l)}` with index `(i, j) -> d2 * i + j`.
pub fn partial_transpose_first(m: &DMatrix<Complex64>, d1: usize, d2: usize) -> DMatrix<Complex64> {
    assert_eq!(m.nrows(), d1 * d2);
    assert_eq!(m.ncols(), d1 * d2);
    DMatrix::from_fn(d1 * d2, d1 * d2, |r, c| {
        let (i, j) = (r / d2, r % d2);
        let (k, l) = (c / d2, c % d2);
        m[(k * d2 + j, i * d2 + l)]
    })
}

pub fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b)
}
