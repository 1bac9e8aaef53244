//! Cholesky factorization and SPD solves.

use super::mat::{dot, Mat};
use crate::error::{Error, Result};

/// Lower triangular `L` with `L Lᵀ = m`. Only the lower triangle of `m` is read.
pub fn cholesky(m: &Mat) -> Result<Mat> {
    let n = m.rows();
    if m.cols() != n {
        return Err(Error::DimensionMismatch(format!("cholesky of a {}x{} matrix", n, m.cols())));
    }
    let mut l = Mat::zeros(n, n);
    for j in 0..n {
        let lj = l.row(j)[..j].to_vec();
        let d = m[(j, j)] - dot(&lj, &lj);
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: j, value: d });
        }
        let djj = d.sqrt();
        l[(j, j)] = djj;
        for i in j + 1..n {
            let val = (m[(i, j)] - dot(&l.row(i)[..j], &lj)) / djj;
            l[(i, j)] = val;
        }
    }
    Ok(l)
}

/// Solves `L Lᵀ X = rhs` given the Cholesky factor.
pub fn cholesky_solve(l: &Mat, rhs: &Mat) -> Mat {
    let n = l.rows();
    assert_eq!(rhs.rows(), n, "rhs row count");
    let k = rhs.cols();
    let mut x = rhs.clone();
    // forward: L Y = rhs, row by row so every update is a contiguous axpy
    for i in 0..n {
        let inv = 1.0 / l[(i, i)];
        for p in 0..i {
            let lip = l[(i, p)];
            if lip != 0.0 {
                let (done, rest) = x.as_mut_slice().split_at_mut(i * k);
                let src = &done[p * k..(p + 1) * k];
                for (d, s) in rest[..k].iter_mut().zip(src) {
                    *d -= lip * s;
                }
            }
        }
        x.row_mut(i).iter_mut().for_each(|v| *v *= inv);
    }
    // backward: Lᵀ X = Y
    for i in (0..n).rev() {
        let inv = 1.0 / l[(i, i)];
        x.row_mut(i).iter_mut().for_each(|v| *v *= inv);
        let (head, tail) = x.as_mut_slice().split_at_mut(i * k);
        let xi = &tail[..k];
        for p in 0..i {
            let lip = l[(i, p)];
            if lip != 0.0 {
                for (d, s) in head[p * k..(p + 1) * k].iter_mut().zip(xi) {
                    *d -= lip * s;
                }
            }
        }
    }
    x
}

/// Solves `m X = rhs` for symmetric positive definite `m`. No regularization
/// is applied; an ill-conditioned `m` gives a correspondingly inaccurate `X`.
pub fn solve_spd(m: &Mat, rhs: &Mat) -> Result<Mat> {
    if rhs.rows() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "solve_spd: matrix has {} rows, rhs has {}",
            m.rows(),
            rhs.rows()
        )));
    }
    let l = cholesky(m)?;
    Ok(cholesky_solve(&l, rhs))
}
