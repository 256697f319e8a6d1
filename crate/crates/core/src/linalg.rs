//! Dense complex helpers shared by the algebra engine and the integrator.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

/// Column-major flattening; the trace inner product becomes the Euclidean one.
pub fn flatten(m: &DMatrix<C64>) -> DVector<C64> {
    DVector::from_column_slice(m.as_slice())
}

pub fn unflatten(v: &[C64], n: usize) -> DMatrix<C64> {
    DMatrix::from_column_slice(n, n, v)
}

pub fn trace_norm(m: &DMatrix<C64>) -> f64 {
    if m.iter().all(|z| z.norm() == 0.0) {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.iter().sum()
}

/// Orthonormal basis of the column space, rank decided by `σ > rank_tol·σ_max`.
pub fn orthonormal_columns(m: &DMatrix<C64>, rank_tol: f64) -> DMatrix<C64> {
    let rows = m.nrows();
    if m.ncols() == 0 || m.iter().all(|z| z.norm() == 0.0) {
        return DMatrix::zeros(rows, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("u requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> =
        (0..svd.singular_values.len()).filter(|&k| svd.singular_values[k] > rank_tol * smax).collect();
    DMatrix::from_fn(rows, keep.len(), |i, j| u[(i, keep[j])])
}

/// Orthonormal basis of `{x : m x = 0}` with singular values `≤ tol·max(σ_max, 1)`
/// treated as zero; the floor keeps round-off maps from counting as full rank.
pub fn null_space(m: &DMatrix<C64>, tol: f64) -> DMatrix<C64> {
    null_space_by(m, |s, smax| s <= tol * smax.max(1.0))
}

/// Null space with singular values `≤ tol` treated as zero.
pub fn null_space_abs(m: &DMatrix<C64>, tol: f64) -> DMatrix<C64> {
    null_space_by(m, |s, _| s <= tol)
}

fn null_space_by(m: &DMatrix<C64>, is_zero: impl Fn(f64, f64) -> bool) -> DMatrix<C64> {
    let cols = m.ncols();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    if m.iter().all(|z| z.norm() == 0.0) {
        return DMatrix::identity(cols, cols);
    }
    let rows = m.nrows().max(cols);
    let mut padded = DMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("v requested");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let null: Vec<usize> = (0..svd.singular_values.len()).filter(|&k| is_zero(svd.singular_values[k], smax)).collect();
    DMatrix::from_fn(cols, null.len(), |i, j| v_t[(null[j], i)].conj())
}

/// Eigenvalues ascending with matching eigenvector columns for a Hermitian matrix.
pub fn hermitian_eigen(h: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let sym = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// `exp(i t H)` for Hermitian `H`.
pub fn exp_i_hermitian(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let (vals, vecs) = hermitian_eigen(h);
    let n = vals.len();
    let phases =
        DMatrix::from_fn(n, n, |i, j| if i == j { C64::from_polar(1.0, vals[i] * t) } else { C64::new(0.0, 0.0) });
    &vecs * phases * vecs.adjoint()
}

/// Unitary factor of the polar decomposition.
pub fn polar_unitary(m: &DMatrix<C64>) -> DMatrix<C64> {
    let svd = m.clone().svd(true, true);
    svd.u.expect("u requested") * svd.v_t.expect("v requested")
}

/// `max_ij |(U†U − 1)_ij|`.
pub fn unitarity_defect(u: &DMatrix<C64>) -> f64 {
    let n = u.nrows();
    let g = u.adjoint() * u - DMatrix::<C64>::identity(n, n);
    g.iter().fold(0.0f64, |m, z| m.max(z.norm()))
}
