//! Kronecker products, column stacking and the vec-transpose permutation.

use super::mat::Mat;
use crate::error::{Error, Result};

/// Default limit on the number of entries of a materialized Kronecker-sized matrix.
pub const DEFAULT_SIZE_CAP: usize = 10_000_000;

/// Fails with `SizeOverflow` if a `rows × cols` matrix would exceed `cap` entries.
pub fn check_size(rows: usize, cols: usize, cap: usize) -> Result<()> {
    match rows.checked_mul(cols) {
        Some(e) if e <= cap => Ok(()),
        Some(e) => Err(Error::SizeOverflow { entries: e, cap }),
        None => Err(Error::SizeOverflow { entries: usize::MAX, cap }),
    }
}

/// `a ⊗ b` under the default size cap.
pub fn kron(a: &Mat, b: &Mat) -> Result<Mat> {
    kron_with_cap(a, b, DEFAULT_SIZE_CAP)
}

pub fn kron_with_cap(a: &Mat, b: &Mat, cap: usize) -> Result<Mat> {
    let (m, n) = a.shape();
    let (p, q) = b.shape();
    check_size(m * p, n * q, cap)?;
    Ok(Mat::from_fn(m * p, n * q, |i, j| a[(i / p, j / q)] * b[(i % p, j % q)]))
}

/// Stacks the columns of `a` into an `(rows·cols) × 1` matrix.
pub fn vec(a: &Mat) -> Mat {
    Mat::column(&vec_entries(a))
}

pub(crate) fn vec_entries(a: &Mat) -> Vec<f64> {
    let (r, c) = a.shape();
    let mut out = Vec::with_capacity(r * c);
    for j in 0..c {
        for i in 0..r {
            out.push(a[(i, j)]);
        }
    }
    out
}

/// Source positions of the vec-transpose permutation: for `B` of shape
/// `m × n`, `vec(Bᵀ)[k] = vec(B)[idx[k]]`.
pub fn vec_transpose_indices(m: usize, n: usize) -> Vec<usize> {
    let mut idx = Vec::with_capacity(m * n);
    for i in 0..m {
        for j in 0..n {
            idx.push(j * m + i);
        }
    }
    idx
}

/// The 0/1 matrix `P` with `vec(Bᵀ) = P vec(B)` for every `m × n` matrix `B`.
pub fn vec_transpose_permutation(m: usize, n: usize) -> Result<Mat> {
    check_size(m * n, m * n, DEFAULT_SIZE_CAP)?;
    let mut p = Mat::zeros(m * n, m * n);
    for (k, &src) in vec_transpose_indices(m, n).iter().enumerate() {
        p[(k, src)] = 1.0;
    }
    Ok(p)
}
