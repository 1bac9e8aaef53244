//! Synthetic problems with known spectra.

use crate::dense::{Mat, RngSeed};
use crate::error::{Error, Result};
use crate::tls::TlsProblem;

/// `[A, b] = Y [D; 0] Zᵀ` with Householder reflectors `Y = I − 2yyᵀ`,
/// `Z = I − 2zzᵀ` built from seeded random unit vectors and
/// `D = diag(n, n−1, …, 1, 1 − eps_p)`, so `σ_n − σ_{n+1} = eps_p`.
pub fn example1(m: usize, n: usize, eps_p: f64, seed: RngSeed) -> Result<TlsProblem> {
    if n == 0 || m < n + 1 {
        return Err(Error::BadSize(format!("example1 needs m >= n + 1 and n >= 1, got m = {m}, n = {n}")));
    }
    if !(eps_p > 0.0 && eps_p < 1.0) {
        return Err(Error::InvalidArgument(format!("eps_p must lie in (0, 1), got {eps_p}")));
    }
    let mut stream = seed.stream();
    let y = stream.unit_vec(m);
    let z = stream.unit_vec(n + 1);
    let mut d: Vec<f64> = (1..=n).rev().map(|v| v as f64).collect();
    d.push(1.0 - eps_p);

    // Rows of [D; 0] Zᵀ: row i is d_i times column i of the symmetric Z.
    let mut c = Mat::zeros(m, n + 1);
    for (i, &di) in d.iter().enumerate() {
        let row = c.row_mut(i);
        for (j, v) in row.iter_mut().enumerate() {
            let zij = if i == j { 1.0 } else { 0.0 } - 2.0 * z[i] * z[j];
            *v = di * zij;
        }
    }
    // Apply Y from the left: C ← C − 2 y (yᵀ C).
    let ytc = c.t_matvec(&y);
    for (i, &yi) in y.iter().enumerate() {
        if yi != 0.0 {
            crate::dense::axpy(-2.0 * yi, &ytc, c.row_mut(i));
        }
    }
    let b = c.col(n);
    TlsProblem::new(c.columns(0, n), b)
}

/// The `m × (m−2)` problem with `A` equal to `m I − 11ᵀ` on its first
/// `m − 2` rows and `−1` on the last two, and `b = −1` except for `m − 1` in
/// the second-to-last entry. Its TLS solution is `x = −1` with
/// `σ_{n+1} = √m` and `σ̃_n = √(2m)`.
pub fn example2(m: usize) -> Result<TlsProblem> {
    if m < 3 {
        return Err(Error::BadSize(format!("example2 needs m >= 3, got {m}")));
    }
    let n = m - 2;
    let a = Mat::from_fn(m, n, |i, j| if i == j { (m - 1) as f64 } else { -1.0 });
    let mut b = vec![-1.0; m];
    b[m - 2] = (m - 1) as f64;
    Ok(TlsProblem::new(a, b)?.with_truth(vec![-1.0; n]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::singular_values;

    #[test]
    fn example1_spectrum() {
        let p = example1(12, 5, 0.25, RngSeed(3)).unwrap();
        let s = singular_values(&p.augmented()).unwrap();
        let expect = [5.0, 4.0, 3.0, 2.0, 1.0, 0.75];
        for (a, b) in s.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn example2_layout() {
        let p = example2(5).unwrap();
        assert_eq!(p.a.shape(), (5, 3));
        assert_eq!(p.a.row(0), &[4.0, -1.0, -1.0]);
        assert_eq!(p.a.row(4), &[-1.0, -1.0, -1.0]);
        assert_eq!(p.b, vec![-1.0, -1.0, -1.0, 4.0, -1.0]);
        assert!(crate::dense::norm2(&p.b) > 0.0);
        assert!(example2(2).is_err());
    }

    #[test]
    fn example1_rejects_bad_input() {
        assert!(example1(5, 5, 0.5, RngSeed(1)).is_err());
        assert!(example1(10, 5, 1.5, RngSeed(1)).is_err());
    }
}
