//! Classical and truncated total least squares.

use std::fmt;
use std::time::Instant;

use crate::dense::{axpy, cholesky, cholesky_solve, complete_orthonormal, norm2, singular_values, svd_right, Mat};
use crate::error::{Error, Result};

/// Relative genericity tolerance: the problem is generic when
/// `σ̃_n − σ_{n+1} > GENERICITY_TOL · σ₁`.
pub const GENERICITY_TOL: f64 = 1e3 * f64::EPSILON;

/// Absolute threshold below which the last-row block of `V` counts as zero.
pub const V22_TOL: f64 = 1e-10;

/// `min ‖[E, f]‖_F` subject to `(A + E) x = b + f`.
#[derive(Debug, Clone)]
pub struct TlsProblem {
    pub a: Mat,
    pub b: Vec<f64>,
    pub x_true: Option<Vec<f64>>,
}

impl TlsProblem {
    pub fn new(a: Mat, b: Vec<f64>) -> Result<Self> {
        if a.rows() == 0 || a.cols() == 0 {
            return Err(Error::DimensionMismatch("coefficient matrix is empty".into()));
        }
        if b.len() != a.rows() {
            return Err(Error::DimensionMismatch(format!(
                "A has {} rows but b has {} entries",
                a.rows(),
                b.len()
            )));
        }
        a.check_finite()?;
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("right-hand side contains NaN or Inf".into()));
        }
        Ok(TlsProblem { a, b, x_true: None })
    }

    pub fn with_truth(mut self, x: Vec<f64>) -> Self {
        assert_eq!(x.len(), self.n(), "true solution length");
        self.x_true = Some(x);
        self
    }

    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// `C = [A, b]`.
    pub fn augmented(&self) -> Mat {
        self.a.with_column(&self.b)
    }

    /// `b − A x`.
    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        let ax = self.a.matvec(x);
        self.b.iter().zip(&ax).map(|(b, v)| b - v).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    TlsSvd,
    TlsClosed,
    Ttls,
    Rtls,
    Rttls,
    Arttls,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::TlsSvd => "tls",
            Method::TlsClosed => "tls-closed",
            Method::Ttls => "ttls",
            Method::Rtls => "rtls",
            Method::Rttls => "rttls",
            Method::Arttls => "arttls",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone)]
pub struct TlsSolution {
    pub x: Vec<f64>,
    /// `σ_{n+1}` of `[A, b]`, or `σ_{k+1}` for truncated methods.
    pub sigma_small: f64,
    /// `b − A x`
    pub residual: Vec<f64>,
    pub method: Method,
    pub elapsed_seconds: f64,
}

impl TlsSolution {
    pub(crate) fn new(p: &TlsProblem, x: Vec<f64>, sigma_small: f64, method: Method, start: Instant) -> Self {
        let elapsed_seconds = start.elapsed().as_secs_f64();
        let residual = p.residual(&x);
        TlsSolution { x, sigma_small, residual, method, elapsed_seconds }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenericityReport {
    /// smallest singular value of `A`
    pub sigma_tilde_n: f64,
    /// smallest singular value of `[A, b]`, zero when `m = n`
    pub sigma_np1: f64,
    pub sigma_1: f64,
    pub gap: f64,
    pub generic: bool,
}

impl GenericityReport {
    pub(crate) fn from_values(sa: &[f64], sc: &[f64], n: usize) -> Self {
        let sigma_tilde_n = sa.get(n - 1).copied().unwrap_or(0.0);
        let sigma_np1 = sc.get(n).copied().unwrap_or(0.0);
        let sigma_1 = sc[0];
        let gap = sigma_tilde_n - sigma_np1;
        GenericityReport { sigma_tilde_n, sigma_np1, sigma_1, gap, generic: gap > GENERICITY_TOL * sigma_1 }
    }

    pub fn ensure(&self) -> Result<()> {
        if self.generic {
            Ok(())
        } else {
            Err(Error::NonGeneric { gap: self.gap, tolerance: GENERICITY_TOL * self.sigma_1 })
        }
    }
}

/// `V` split after column `q` and before its last row:
/// `V = [[v11, v12], [v21, v22]]` with `v11: n×q`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedV {
    pub v11: Mat,
    pub v12: Mat,
    pub v21: Mat,
    pub v22: Mat,
}

impl PartitionedV {
    pub fn split(v: &Mat, q: usize) -> Self {
        let (rows, cols) = v.shape();
        assert!(rows >= 1 && q <= cols);
        let n = rows - 1;
        PartitionedV {
            v11: v.submatrix(0, n, 0, q),
            v12: v.submatrix(0, n, q, cols),
            v21: v.submatrix(n, rows, 0, q),
            v22: v.submatrix(n, rows, q, cols),
        }
    }

    pub fn stack(&self) -> Mat {
        self.v11.hstack(&self.v12).vstack(&self.v21.hstack(&self.v22))
    }
}

fn require_tall(p: &TlsProblem) -> Result<()> {
    if p.m() < p.n() {
        return Err(Error::DimensionMismatch(format!(
            "TLS needs m >= n, got {}x{}",
            p.m(),
            p.n()
        )));
    }
    Ok(())
}

/// Compares the smallest singular value of `A` with that of `[A, b]`.
pub fn check_genericity(p: &TlsProblem) -> Result<GenericityReport> {
    require_tall(p)?;
    let sa = singular_values(&p.a)?;
    let sc = singular_values(&p.augmented())?;
    Ok(GenericityReport::from_values(&sa, &sc, p.n()))
}

/// Right singular vectors of `C` completed to a square orthogonal matrix, with
/// the singular values padded by zeros to length `n + 1`.
pub(crate) fn full_right_factor(c: &Mat) -> Result<(Vec<f64>, Mat)> {
    let (mut s, v) = svd_right(c)?;
    s.resize(c.cols(), 0.0);
    Ok((s, complete_orthonormal(&v)))
}

/// TLS solution from the last right singular vector of `[A, b]`.
pub fn tls_svd(p: &TlsProblem) -> Result<TlsSolution> {
    require_tall(p)?;
    let start = Instant::now();
    let n = p.n();
    let sa = singular_values(&p.a)?;
    let (sc, v) = full_right_factor(&p.augmented())?;
    GenericityReport::from_values(&sa, &sc, n).ensure()?;
    let v22 = v[(n, n)];
    if v22.abs() <= V22_TOL {
        return Err(Error::DegenerateV22 { value: v22.abs() });
    }
    let x = (0..n).map(|i| -v[(i, n)] / v22).collect();
    Ok(TlsSolution::new(p, x, sc[n], Method::TlsSvd, start))
}

/// TLS solution from `(AᵀA − σ²_{n+1} I) x = Aᵀb` by Cholesky.
pub fn tls_closed(p: &TlsProblem) -> Result<TlsSolution> {
    require_tall(p)?;
    let start = Instant::now();
    let n = p.n();
    let sa = singular_values(&p.a)?;
    let mut sc = singular_values(&p.augmented())?;
    sc.resize(n + 1, 0.0);
    GenericityReport::from_values(&sa, &sc, n).ensure()?;
    let sigma = sc[n];
    let l = cholesky(&shifted_gram(&p.a, sigma))?;
    let mut x = cholesky_solve(&l, &Mat::column(&p.a.t_matvec(&p.b))).into_vec();
    // one refinement step with the residual formed from A, not the Gram matrix
    let mut defect = p.a.t_matvec(&p.residual(&x));
    axpy(sigma * sigma, &x, &mut defect);
    let dx = cholesky_solve(&l, &Mat::column(&defect));
    axpy(1.0, dx.as_slice(), &mut x);
    Ok(TlsSolution::new(p, x, sigma, Method::TlsClosed, start))
}

/// `AᵀA − σ² I`.
pub(crate) fn shifted_gram(a: &Mat, sigma: f64) -> Mat {
    let mut g = a.t_matmul(a);
    for i in 0..a.cols() {
        g[(i, i)] -= sigma * sigma;
    }
    g
}

/// Minimum-norm truncated TLS solution `−V₁₂ v₂₂†` with the partition after
/// column `k` of the right singular vectors of `[A, b]`.
pub fn ttls(p: &TlsProblem, k: usize) -> Result<TlsSolution> {
    let n = p.n();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("truncation k = {k} outside 1..={n}")));
    }
    let start = Instant::now();
    let (s, v) = full_right_factor(&p.augmented())?;
    let x = ttls_from_factor(&v, k)?;
    Ok(TlsSolution::new(p, x, s[k], Method::Ttls, start))
}

/// The truncated solution from a square orthogonal right factor.
pub(crate) fn ttls_from_factor(v: &Mat, k: usize) -> Result<Vec<f64>> {
    let n = v.rows() - 1;
    let parts = PartitionedV::split(v, k);
    let v22 = parts.v22.as_slice();
    let v22_norm = norm2(v22);
    if v22_norm <= V22_TOL {
        return Err(Error::NonGenericTruncation { k, value: v22_norm });
    }
    let v22_sq = v22_norm * v22_norm;
    let x: Vec<f64> = parts.v12.matvec(v22).iter().map(|t| -t / v22_sq).collect();

    // Second form (V₁₁ᵀ)† v₂₁ᵀ. The rows of V are orthonormal, so
    // V₁₁ᵀV₁₁ = I − v₂₁ᵀv₂₁ and the pseudoinverse collapses to
    // V₁₁ v₂₁ᵀ / (1 − ‖v₂₁‖²) = V₁₁ v₂₁ᵀ / ‖v₂₂‖².
    let alt: Vec<f64> = parts.v11.matvec(parts.v21.as_slice()).iter().map(|t| t / v22_sq).collect();
    let diff = norm2(&crate::dense::sub_vec(&x, &alt));
    let tol = 1e-8 * (1.0 + norm2(&x));
    if diff > tol {
        log::warn!("ttls: the two solution forms differ by {diff:e} (k = {k}, n = {n})");
    }
    Ok(x)
}

/// `‖x‖₂`, guarding the relative quantities that divide by it.
pub(crate) fn nonzero_norm(x: &[f64]) -> Result<f64> {
    let nx = norm2(x);
    if nx == 0.0 {
        Err(Error::ZeroSolution)
    } else {
        Ok(nx)
    }
}
