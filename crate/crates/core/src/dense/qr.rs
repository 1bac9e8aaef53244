//! Householder QR.

use super::mat::{axpy, dot, Mat};

/// Column-major Householder factorization kept in compact form: reflector
/// vectors below the diagonal (with implicit unit head), R on and above it.
pub(crate) struct CompactQr {
    m: usize,
    n: usize,
    /// column-major m×n
    a: Vec<f64>,
    /// reflector tails v[j+1..m] stored in `a`, heads and scalars here
    beta: Vec<f64>,
}

impl CompactQr {
    /// Factors a column-major `m × n` buffer with `m >= n`.
    pub(crate) fn factor(mut a: Vec<f64>, m: usize, n: usize) -> Self {
        assert!(m >= n, "QR needs rows >= cols");
        assert_eq!(a.len(), m * n);
        let mut beta = vec![0.0; n];
        for j in 0..n {
            let (head, tail) = a.split_at_mut((j + 1) * m);
            let col = &mut head[j * m + j..(j + 1) * m];
            let (b, alpha) = make_reflector(col);
            beta[j] = b;
            if b == 0.0 {
                continue;
            }
            // col now holds v with v[0] = 1; apply H = I - b v vᵀ to the trailing columns
            for k in 0..(n - j - 1) {
                let target = &mut tail[k * m + j..(k + 1) * m];
                let w = b * dot(col, target);
                axpy(-w, col, target);
            }
            col[0] = alpha;
        }
        CompactQr { m, n, a, beta }
    }

    /// Upper triangular `n × n` factor.
    pub(crate) fn r(&self) -> Mat {
        let (m, n) = (self.m, self.n);
        Mat::from_fn(n, n, |i, j| if i <= j { self.a[j * m + i] } else { 0.0 })
    }

    /// Thin `m × n` orthonormal factor, column-major.
    pub(crate) fn q_colmajor(&self) -> Vec<f64> {
        let (m, n) = (self.m, self.n);
        let mut q = vec![0.0; m * n];
        for j in 0..n {
            q[j * m + j] = 1.0;
        }
        let mut v = vec![0.0; m];
        for j in (0..n).rev() {
            let b = self.beta[j];
            if b == 0.0 {
                continue;
            }
            let len = m - j;
            v[0] = 1.0;
            v[1..len].copy_from_slice(&self.a[j * m + j + 1..(j + 1) * m]);
            let v = &v[..len];
            // Only columns j.. of Q are touched by H_j at this stage.
            for k in j..n {
                let target = &mut q[k * m + j..(k + 1) * m];
                let w = b * dot(v, target);
                axpy(-w, v, target);
            }
        }
        q
    }

    pub(crate) fn q(&self) -> Mat {
        colmajor_to_mat(&self.q_colmajor(), self.m, self.n)
    }
}

/// Overwrites `x` with a Householder vector (unit head) and returns
/// `(beta, alpha)` such that `(I - beta v vᵀ) x = alpha e1`.
fn make_reflector(x: &mut [f64]) -> (f64, f64) {
    let norm = super::mat::norm2(x);
    if norm == 0.0 {
        return (0.0, 0.0);
    }
    let x0 = x[0];
    let alpha = if x0 >= 0.0 { -norm } else { norm };
    let v0 = x0 - alpha;
    for xi in x[1..].iter_mut() {
        *xi /= v0;
    }
    x[0] = 1.0;
    let beta = -v0 / alpha;
    (beta, alpha)
}

pub(crate) fn mat_to_colmajor(m: &Mat) -> Vec<f64> {
    let (r, c) = m.shape();
    let mut out = vec![0.0; r * c];
    for i in 0..r {
        for (j, &x) in m.row(i).iter().enumerate() {
            out[j * r + i] = x;
        }
    }
    out
}

pub(crate) fn colmajor_to_mat(buf: &[f64], rows: usize, cols: usize) -> Mat {
    Mat::from_fn(rows, cols, |i, j| buf[j * rows + i])
}

/// Thin Householder QR of a `rows × cols` matrix with `rows >= cols`:
/// `q` has orthonormal columns and `r` is upper triangular. Rank deficiency
/// shows up as (near) zero diagonal entries of `r`.
pub fn householder_qr(y: &Mat) -> (Mat, Mat) {
    let (m, n) = y.shape();
    let f = CompactQr::factor(mat_to_colmajor(y), m, n);
    (f.q(), f.r())
}
