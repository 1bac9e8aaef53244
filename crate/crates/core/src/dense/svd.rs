//! Thin SVD by one-sided (Hestenes) Jacobi on a QR-preconditioned factor.
//!
//! For a tall matrix `M = Q R` the rotations are applied to the columns of
//! `X = Rᵀ`; for a wide one `Mᵀ = Q R` and `X = R`. In both cases `X J = N Σ`
//! with `N` the normalized converged columns, so the right singular vectors
//! come out of `N` without accumulating `J`, and `J` is only formed when the
//! left singular vectors are requested:
//!
//! * tall: `M = (Q J) Σ Nᵀ`, so `U = Q J`, `V = N`
//! * wide: `M = J Σ (Q N)ᵀ`, so `U = J`, `V = Q N`

use super::mat::{axpy, dot, norm2, Mat};
use super::qr::{colmajor_to_mat, mat_to_colmajor, CompactQr};
use crate::error::{Error, Result};

/// Maximum number of cyclic sweeps before giving up.
pub const MAX_SWEEPS: usize = 60;

/// Columns whose norm falls below this multiple of `‖M‖_F` are treated as
/// numerically zero: they are not rotated, their singular values are reported
/// as exactly zero and their singular vectors are rebuilt as an orthonormal
/// completion.
pub const NEGLIGIBLE_COLUMN: f64 = 1e-14;

/// Thin SVD `M = U diag(s) Vᵀ`, `t = min(rows, cols)`.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    /// `rows × t`, orthonormal columns
    pub u: Mat,
    /// descending, nonnegative
    pub s: Vec<f64>,
    /// `cols × t`, orthonormal columns
    pub v: Mat,
}

impl SvdFactors {
    pub fn rank(&self, tol: f64) -> usize {
        self.s.iter().take_while(|&&x| x > tol).count()
    }

    /// `U diag(s) Vᵀ`.
    pub fn reconstruct(&self) -> Mat {
        let mut us = self.u.clone();
        for i in 0..us.rows() {
            for (j, x) in us.row_mut(i).iter_mut().enumerate() {
                *x *= self.s[j];
            }
        }
        us.matmul_t(&self.v)
    }
}

/// Full thin SVD with both singular vector sets.
pub fn svd(m: &Mat) -> Result<SvdFactors> {
    let out = jacobi_svd(m, true)?;
    Ok(SvdFactors { u: out.u.expect("left vectors requested"), s: out.s, v: out.v })
}

/// Singular values and right singular vectors only (`cols × t`).
pub fn svd_right(m: &Mat) -> Result<(Vec<f64>, Mat)> {
    let out = jacobi_svd(m, false)?;
    Ok((out.s, out.v))
}

/// Singular values only, descending.
pub fn singular_values(m: &Mat) -> Result<Vec<f64>> {
    Ok(jacobi_svd(m, false)?.s)
}

/// Spectral norm, i.e. the largest singular value.
pub fn spectral_norm(m: &Mat) -> Result<f64> {
    if m.is_empty() {
        return Ok(0.0);
    }
    // A wide or tall matrix reduces to its small Gram-free triangular factor.
    Ok(singular_values(m)?.first().copied().unwrap_or(0.0))
}

struct JacobiOutput {
    u: Option<Mat>,
    s: Vec<f64>,
    v: Mat,
}

fn jacobi_svd(m: &Mat, want_u: bool) -> Result<JacobiOutput> {
    let (rows, cols) = m.shape();
    assert!(rows > 0 && cols > 0, "svd of an empty matrix");
    let tall = rows >= cols;
    let t = rows.min(cols);
    let fro = m.fro_norm();

    // Triangular factor R (t × t) of M (tall) or Mᵀ (wide).
    let qr = if tall {
        CompactQr::factor(mat_to_colmajor(m), rows, cols)
    } else {
        CompactQr::factor(mat_to_colmajor(&m.transpose()), cols, rows)
    };
    let r = qr.r();

    // X stored column-major; its columns are the rotated vectors.
    // tall: X = Rᵀ, so column j of X is row j of R.
    // wide: X = R.
    let mut x = vec![0.0; t * t];
    for i in 0..t {
        for j in 0..t {
            let val = r[(i, j)];
            if tall {
                x[i * t + j] = val;
            } else {
                x[j * t + i] = val;
            }
        }
    }
    let mut acc = if want_u {
        let mut id = vec![0.0; t * t];
        for i in 0..t {
            id[i * t + i] = 1.0;
        }
        Some(id)
    } else {
        None
    };

    rotate_to_convergence(&mut x, acc.as_deref_mut(), t, fro)?;

    let mut sigma: Vec<f64> = (0..t).map(|j| norm2(&x[j * t..(j + 1) * t])).collect();
    let floor = NEGLIGIBLE_COLUMN * fro;
    let mut negligible = vec![false; t];
    for j in 0..t {
        let col = &mut x[j * t..(j + 1) * t];
        if sigma[j] > floor && sigma[j] > 0.0 {
            let inv = 1.0 / sigma[j];
            col.iter_mut().for_each(|v| *v *= inv);
        } else {
            negligible[j] = true;
            sigma[j] = 0.0;
        }
    }

    // Descending order.
    let mut order: Vec<usize> = (0..t).collect();
    order.sort_by(|&a, &b| sigma[b].partial_cmp(&sigma[a]).unwrap_or(std::cmp::Ordering::Equal));
    let mut n_sorted = vec![0.0; t * t];
    let mut j_sorted = acc.as_ref().map(|_| vec![0.0; t * t]);
    let mut neg_sorted = vec![false; t];
    let mut s_sorted = vec![0.0; t];
    for (dst, &src) in order.iter().enumerate() {
        n_sorted[dst * t..(dst + 1) * t].copy_from_slice(&x[src * t..(src + 1) * t]);
        if let (Some(js), Some(a)) = (j_sorted.as_mut(), acc.as_ref()) {
            js[dst * t..(dst + 1) * t].copy_from_slice(&a[src * t..(src + 1) * t]);
        }
        neg_sorted[dst] = negligible[src];
        s_sorted[dst] = sigma[src];
    }
    sigma = s_sorted;

    // Negligible columns carry no direction information; replace them by an
    // orthonormal completion of the accepted ones.
    if neg_sorted.iter().any(|&b| b) {
        complete_columns(&mut n_sorted, t, t, &neg_sorted);
    }

    // Assemble V (cols × t) and optionally U (rows × t).
    let n_mat = colmajor_to_mat(&n_sorted, t, t);
    let mut v = if tall {
        n_mat
    } else {
        colmajor_to_mat(&qr.q_colmajor(), cols, t).matmul(&n_mat)
    };
    let mut u = j_sorted.map(|js| {
        let j_mat = colmajor_to_mat(&js, t, t);
        if tall {
            colmajor_to_mat(&qr.q_colmajor(), rows, t).matmul(&j_mat)
        } else {
            j_mat
        }
    });

    // Sign convention: largest-magnitude entry of each right vector positive.
    for j in 0..t {
        let mut best = 0.0f64;
        for i in 0..v.rows() {
            let val = v[(i, j)];
            if val.abs() > best.abs() {
                best = val;
            }
        }
        if best < 0.0 {
            for i in 0..v.rows() {
                v[(i, j)] = -v[(i, j)];
            }
            if let Some(u) = u.as_mut() {
                for i in 0..u.rows() {
                    u[(i, j)] = -u[(i, j)];
                }
            }
        }
    }

    Ok(JacobiOutput { u, s: sigma, v })
}

/// Cyclic one-sided Jacobi on the `t` columns (length `t`) of `x`.
fn rotate_to_convergence(x: &mut [f64], mut acc: Option<&mut [f64]>, t: usize, fro: f64) -> Result<()> {
    if t < 2 {
        return Ok(());
    }
    let tol = f64::EPSILON * (t as f64).sqrt();
    let floor_sq = (NEGLIGIBLE_COLUMN * fro).powi(2);
    let mut norms = vec![0.0; t];

    for _sweep in 0..MAX_SWEEPS {
        for (j, nj) in norms.iter_mut().enumerate() {
            let c = &x[j * t..(j + 1) * t];
            *nj = dot(c, c);
        }
        let mut rotated = false;
        for i in 0..t - 1 {
            for j in i + 1..t {
                let a = norms[i];
                let b = norms[j];
                // Negligible columns are replaced by a completion afterwards;
                // rotating them against anything only chases rounding noise.
                if a <= floor_sq || b <= floor_sq {
                    continue;
                }
                let (head, tail) = x.split_at_mut(j * t);
                let ci = &mut head[i * t..(i + 1) * t];
                let cj = &mut tail[..t];
                let d = dot(ci, cj);
                if d.abs() <= tol * a.sqrt() * b.sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (b - a) / (2.0 * d);
                let tan = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cos = 1.0 / (1.0 + tan * tan).sqrt();
                let sin = cos * tan;
                rotate(ci, cj, cos, sin);
                let mut na = a - tan * d;
                let mut nb = b + tan * d;
                // The updates cancel badly once a column has shrunk a lot.
                if na < 1e-2 * a {
                    na = dot(ci, ci);
                }
                if nb < 1e-2 * b {
                    nb = dot(cj, cj);
                }
                norms[i] = na;
                norms[j] = nb;
                if let Some(acc) = acc.as_deref_mut() {
                    let (h, tl) = acc.split_at_mut(j * t);
                    rotate(&mut h[i * t..(i + 1) * t], &mut tl[..t], cos, sin);
                }
            }
        }
        if !rotated {
            return Ok(());
        }
    }
    Err(Error::ConvergenceFailure { sweeps: MAX_SWEEPS })
}

#[inline]
fn rotate(ci: &mut [f64], cj: &mut [f64], cos: f64, sin: f64) {
    for (p, q) in ci.iter_mut().zip(cj.iter_mut()) {
        let xi = *p;
        let xj = *q;
        *p = cos * xi - sin * xj;
        *q = sin * xi + cos * xj;
    }
}

/// Replaces the flagged columns of a column-major `len × ncols` buffer with
/// unit vectors orthogonal to every other column.
fn complete_columns(buf: &mut [f64], len: usize, ncols: usize, flagged: &[bool]) {
    let mut next_candidate = 0usize;
    for j in 0..ncols {
        if !flagged[j] {
            continue;
        }
        loop {
            let mut cand = vec![0.0; len];
            // Walk canonical directions; one of them always survives projection.
            cand[next_candidate % len] = 1.0;
            next_candidate += 1;
            // two passes of Gram–Schmidt against all accepted columns
            for _ in 0..2 {
                for k in 0..ncols {
                    if k == j || (flagged[k] && k > j) {
                        continue;
                    }
                    let col = &buf[k * len..(k + 1) * len];
                    let c = dot(col, &cand);
                    axpy(-c, col, &mut cand);
                }
            }
            let nrm = norm2(&cand);
            if nrm > 0.5 {
                buf[j * len..(j + 1) * len].iter_mut().zip(&cand).for_each(|(d, s)| *d = s / nrm);
                break;
            }
            if next_candidate > 2 * len + ncols {
                // Unreachable for orthonormal accepted columns; keep the last attempt.
                let nrm = nrm.max(f64::MIN_POSITIVE);
                buf[j * len..(j + 1) * len].iter_mut().zip(&cand).for_each(|(d, s)| *d = s / nrm);
                break;
            }
        }
    }
}

/// Extends a matrix with orthonormal columns (`n × t`, `t <= n`) to a square
/// orthogonal `n × n` matrix.
pub fn complete_orthonormal(v: &Mat) -> Mat {
    let (n, t) = v.shape();
    if t == n {
        return v.clone();
    }
    let mut buf = mat_to_colmajor(v);
    buf.resize(n * n, 0.0);
    let flagged: Vec<bool> = (0..n).map(|j| j >= t).collect();
    complete_columns(&mut buf, n, n, &flagged);
    colmajor_to_mat(&buf, n, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{gaussian_matrix, RngSeed};

    fn check_factors(m: &Mat, f: &SvdFactors) {
        let t = m.rows().min(m.cols());
        assert_eq!(f.s.len(), t);
        assert_eq!(f.u.shape(), (m.rows(), t));
        assert_eq!(f.v.shape(), (m.cols(), t));
        for w in f.s.windows(2) {
            assert!(w[0] >= w[1] && w[1] >= 0.0);
        }
        let eye = Mat::identity(t);
        assert!(f.u.t_matmul(&f.u).sub(&eye).max_abs() <= 1e-12, "U not orthonormal");
        assert!(f.v.t_matmul(&f.v).sub(&eye).max_abs() <= 1e-12, "V not orthonormal");
        let err = f.reconstruct().sub(m).fro_norm();
        assert!(err <= 1e-12 * m.fro_norm().max(1.0), "reconstruction error {err:e}");
    }

    #[test]
    fn diagonal() {
        let m = Mat::diag(&[3.0, 1.0]);
        let f = svd(&m).unwrap();
        assert!((f.s[0] - 3.0).abs() < 1e-15 && (f.s[1] - 1.0).abs() < 1e-15);
        check_factors(&m, &f);
    }

    #[test]
    fn golden_ratio_matrix() {
        let m = Mat::from_rows(&[[1.0, 1.0], [1.0, 0.0]]);
        let f = svd(&m).unwrap();
        let s5 = 5f64.sqrt();
        assert!((f.s[0] - ((3.0 + s5) / 2.0).sqrt()).abs() < 1e-14);
        assert!((f.s[1] - ((3.0 - s5) / 2.0).sqrt()).abs() < 1e-14);
        check_factors(&m, &f);
    }

    #[test]
    fn wide_and_tall_and_rank_deficient() {
        for (k, &(r, c)) in [(7usize, 3usize), (3, 7), (10, 10), (1, 5), (5, 1)].iter().enumerate() {
            let m = gaussian_matrix(r, c, RngSeed(100 + k as u64));
            check_factors(&m, &svd(&m).unwrap());
        }
        let thin = gaussian_matrix(12, 2, RngSeed(5)).matmul(&gaussian_matrix(2, 9, RngSeed(6)));
        let f = svd(&thin).unwrap();
        check_factors(&thin, &f);
        assert!(f.s[2] < 1e-13 * f.s[0]);
    }

    #[test]
    fn zero_matrix() {
        let z = Mat::zeros(3, 4);
        let f = svd(&z).unwrap();
        assert!(f.s.iter().all(|&s| s == 0.0));
        check_factors(&z, &f);
    }

    #[test]
    fn sign_convention() {
        let m = gaussian_matrix(6, 4, RngSeed(77));
        let f = svd(&m).unwrap();
        for j in 0..4 {
            let col = f.v.col(j);
            let big = col.iter().cloned().fold(0.0f64, |b, x| if x.abs() > b.abs() { x } else { b });
            assert!(big > 0.0);
        }
    }

    #[test]
    fn right_only_matches_full() {
        let m = gaussian_matrix(9, 13, RngSeed(8));
        let f = svd(&m).unwrap();
        let (s, v) = svd_right(&m).unwrap();
        for (a, b) in s.iter().zip(&f.s) {
            assert!((a - b).abs() <= 1e-13 * f.s[0]);
        }
        assert!(v.sub(&f.v).max_abs() < 1e-10);
    }

    #[test]
    fn completion_is_orthogonal() {
        let m = gaussian_matrix(4, 7, RngSeed(2));
        let (_, v) = svd_right(&m).unwrap();
        let full = complete_orthonormal(&v);
        assert_eq!(full.shape(), (7, 7));
        assert!(full.t_matmul(&full).sub(&Mat::identity(7)).max_abs() < 1e-13);
        assert!(full.columns(0, 4).sub(&v).max_abs() == 0.0);
    }
}
