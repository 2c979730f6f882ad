//! Small dense linear-algebra helpers shared across modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type RMatrix = DMatrix<f64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sup_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Kronecker product of two real vectors, `a` as the slow index.
pub fn kron_vec(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Eigen-decomposition of a Hermitian matrix: (eigenvalues, eigenvectors as columns).
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = h.symmetric_eigen();
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(0.0)
}

pub fn max_eigenvalue(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).last().copied().unwrap_or(0.0)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Largest absolute entry of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_hermitian(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && max_abs_diff(m, &m.adjoint()) <= tol
}

/// Singular values of a real matrix, descending.
pub fn singular_values(m: &RMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Numerical rank with a relative cutoff.
pub fn rank(m: &RMatrix, rel_tol: f64) -> usize {
    let s = singular_values(m);
    match s.first() {
        None => 0,
        Some(&0.0) => 0,
        Some(&top) => s.iter().filter(|&&v| v > rel_tol * top).count(),
    }
}

pub fn rows_to_matrix(rows: &[Vec<f64>], ncols: usize) -> RMatrix {
    RMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j])
}

pub fn mat_vec(m: &RMatrix, v: &[f64]) -> Vec<f64> {
    (m * DVector::from_column_slice(v)).iter().copied().collect()
}

pub fn outer(psi: &[Complex64]) -> CMatrix {
    let n = psi.len();
    CMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj())
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

pub fn paulis() -> [CMatrix; 3] {
    [pauli_x(), pauli_y(), pauli_z()]
}
