//! Small dense helpers on Hermitian matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::CMatrix;

/// Indices of rows that are not identically zero.
///
/// For a positive semidefinite matrix a zero row implies a zero column, so
/// restricting to these indices removes only zero eigenvalues.
pub(crate) fn support(m: &CMatrix) -> Vec<usize> {
    // Hermitian input, so scanning columns is equivalent to scanning rows
    (0..m.ncols())
        .filter(|&j| m.column(j).iter().any(|z| z.re != 0.0 || z.im != 0.0))
        .collect()
}

pub(crate) fn submatrix(m: &CMatrix, idx: &[usize]) -> CMatrix {
    DMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// Eigenvalues in descending order, including the zeros of the dropped
/// null rows.
pub(crate) fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let n = m.nrows();
    let idx = support(m);
    let mut vals: Vec<f64> = if idx.is_empty() {
        Vec::new()
    } else if idx.len() == n {
        m.symmetric_eigenvalues().iter().copied().collect()
    } else {
        submatrix(m, &idx)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect()
    };
    vals.resize(n, 0.0);
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

/// Full eigendecomposition, eigenpairs sorted by descending eigenvalue.
pub(crate) fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

pub(crate) fn trace(m: &CMatrix) -> Complex64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

/// `max |M − M†|` over all entries.
pub(crate) fn hermiticity_error(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut err: f64 = 0.0;
    for j in 0..n {
        for i in 0..=j {
            err = err.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    err
}

pub(crate) fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `max |U U† − 1|`.
pub(crate) fn unitarity_error(u: &CMatrix) -> f64 {
    let n = u.nrows();
    let prod = u * u.adjoint();
    max_abs_diff(&prod, &CMatrix::identity(n, n))
}

/// Shannon / von Neumann entropy in bits of a list of weights.
///
/// Weights in `[-floor, 0)` are treated as zero; anything below `-floor` is
/// reported through the `Err` variant with the offending value.
pub(crate) fn entropy_bits(weights: impl IntoIterator<Item = f64>, floor: f64) -> Result<f64, f64> {
    let mut s = 0.0;
    for w in weights {
        if w < -floor {
            return Err(w);
        }
        if w > 0.0 {
            s -= w * w.log2();
        }
    }
    Ok(s.max(0.0))
}
