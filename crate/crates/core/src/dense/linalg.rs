//! Pseudoinverse and matrix norms.

use super::mat::Mat;
use super::svd::{singular_values, svd};
use crate::error::Result;

/// Moore–Penrose pseudoinverse. Singular values below
/// `max(rows, cols) · ε · σ₁` are treated as zero.
pub fn pinv(m: &Mat) -> Result<Mat> {
    let (r, c) = m.shape();
    // A single row or column has a closed form and skips the SVD.
    if r == 1 || c == 1 {
        let nrm2 = m.as_slice().iter().map(|x| x * x).sum::<f64>();
        if nrm2 == 0.0 {
            return Ok(Mat::zeros(c, r));
        }
        return Ok(m.transpose().scaled(1.0 / nrm2));
    }
    let f = svd(m)?;
    let tol = r.max(c) as f64 * f64::EPSILON * f.s.first().copied().unwrap_or(0.0);
    let mut out = Mat::zeros(c, r);
    for (k, &s) in f.s.iter().enumerate() {
        if s <= tol || s == 0.0 {
            break;
        }
        let inv = 1.0 / s;
        for i in 0..c {
            let vik = f.v[(i, k)] * inv;
            if vik == 0.0 {
                continue;
            }
            for j in 0..r {
                out[(i, j)] += vik * f.u[(j, k)];
            }
        }
    }
    Ok(out)
}

/// Spectral, Frobenius and infinity norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norms {
    pub two: f64,
    pub fro: f64,
    pub inf: f64,
}

pub fn norms(m: &Mat) -> Result<Norms> {
    let two = if m.is_empty() { 0.0 } else { singular_values(m)?[0] };
    Ok(Norms { two, fro: m.fro_norm(), inf: m.inf_norm() })
}
