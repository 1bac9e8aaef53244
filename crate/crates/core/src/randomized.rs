//! Sketch-based TLS solvers, the adaptive range finder, the a priori error
//! bound for the truncated solver, and GCV selection of the truncation index.

use std::time::Instant;

use crate::dense::{
    axpy, cholesky, cholesky_solve, dot, gaussian_matrix, householder_qr, norm2, pinv, singular_values, svd,
    svd_right, symmetric_eigen, Mat, RngSeed,
};
use crate::error::{Error, Result};
use crate::tls::{Method, TlsProblem, TlsSolution, V22_TOL};

/// Singular values of the projected matrix below this multiple of `‖C‖_F`
/// count as lost by the sketch.
pub const SKETCH_RANK_FLOOR: f64 = 1e-14;

/// Sketch parameters for [`rtls`], [`rttls`] and [`select_truncation_gcv`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandConfig {
    /// sketch width `l`
    pub samples_l: usize,
    /// truncation index `k`
    pub trunc_k: usize,
    /// oversampling `p = l − k`
    pub oversample_p: usize,
    pub seed: RngSeed,
}

impl RandConfig {
    /// `l = k + p`.
    pub fn new(trunc_k: usize, oversample_p: usize, seed: RngSeed) -> Self {
        RandConfig { samples_l: trunc_k + oversample_p, trunc_k, oversample_p, seed }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.trunc_k == 0 || self.trunc_k > self.samples_l || self.samples_l > n + 1 {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= k <= l <= n+1, got k = {}, l = {}, n+1 = {}",
                self.trunc_k,
                self.samples_l,
                n + 1
            )));
        }
        Ok(())
    }
}

/// Parameters of the adaptive range finder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveConfig {
    /// target bound on `‖C − QQᵀC‖₂`
    pub tolerance_eps: f64,
    /// number of probe vectors kept in flight
    pub num_probes: usize,
    pub seed: RngSeed,
    /// cap on the basis size; `None` means `min(m, n + 1)`
    pub max_basis: Option<usize>,
}

impl AdaptiveConfig {
    pub fn new(tolerance_eps: f64, num_probes: usize, seed: RngSeed) -> Self {
        AdaptiveConfig { tolerance_eps, num_probes, seed, max_basis: None }
    }

    fn validate(&self, rows: usize, cols: usize) -> Result<usize> {
        if !(self.tolerance_eps > 0.0) || self.num_probes == 0 {
            return Err(Error::InvalidArgument(format!(
                "adaptive range finder needs eps > 0 and at least one probe, got eps = {}, r = {}",
                self.tolerance_eps, self.num_probes
            )));
        }
        let cap = rows.min(cols);
        match self.max_basis {
            Some(b) if b > cap => Err(Error::InvalidArgument(format!("max_basis {b} exceeds min(m, n+1) = {cap}"))),
            Some(b) => Ok(b),
            None => Ok(cap),
        }
    }

    /// Probe-norm threshold `ε / (10 √(2/π))`.
    pub fn threshold(&self) -> f64 {
        self.tolerance_eps / (10.0 * (2.0 / std::f64::consts::PI).sqrt())
    }
}

/// Randomized TLS through the inverse Gram matrix of `C = [A, b]`.
///
/// The sketch `Q` is built from `(CᵀC)⁻¹Ω`, so its range is dominated by the
/// right singular vectors with the smallest singular values, and the largest
/// eigenvalue of `Qᵀ(CᵀC)⁻¹Q` approximates `σ_{n+1}⁻²`. The Gram matrix is
/// not regularized: when `CᵀC` is ill-conditioned the solves lose accuracy.
pub fn rtls(p: &TlsProblem, cfg: &RandConfig) -> Result<TlsSolution> {
    let n = p.n();
    cfg.validate(n)?;
    let start = Instant::now();
    let c = p.augmented();
    let gram = c.t_matmul(&c);
    let l = cholesky(&gram)?;

    let omega = gaussian_matrix(n + 1, cfg.samples_l, cfg.seed);
    let x = cholesky_solve(&l, &omega);
    let (q, _) = householder_qr(&x);
    let y = cholesky_solve(&l, &q);
    let z = symmetrize(&q.t_matmul(&y));
    let (eigvals, w) = symmetric_eigen(&z)?;
    let v = q.matvec(&w.col(0));

    let v_last = v[n];
    if v_last.abs() <= V22_TOL {
        return Err(Error::DegenerateV22 { value: v_last.abs() });
    }
    let sol: Vec<f64> = v[..n].iter().map(|t| -t / v_last).collect();
    let sigma_small = if eigvals[0] > 0.0 { eigvals[0].sqrt().recip() } else { f64::INFINITY };
    Ok(TlsSolution::new(p, sol, sigma_small, Method::Rtls, start))
}

/// The projected matrix `Qᵀ(CᵀC)⁻¹Q` used by [`rtls`], exposed for inspection.
pub fn rtls_projected_matrix(p: &TlsProblem, cfg: &RandConfig) -> Result<Mat> {
    cfg.validate(p.n())?;
    let c = p.augmented();
    let l = cholesky(&c.t_matmul(&c))?;
    let x = cholesky_solve(&l, &gaussian_matrix(p.n() + 1, cfg.samples_l, cfg.seed));
    let (q, _) = householder_qr(&x);
    Ok(q.t_matmul(&cholesky_solve(&l, &q)))
}

fn symmetrize(z: &Mat) -> Mat {
    Mat::from_fn(z.rows(), z.cols(), |i, j| 0.5 * (z[(i, j)] + z[(j, i)]))
}

/// Orthonormal basis of the range of `C Ω` for a Gaussian `Ω` with `l` columns.
pub fn sketch_range(c: &Mat, samples: usize, seed: RngSeed) -> Result<Mat> {
    if samples == 0 || samples > c.rows() {
        return Err(Error::InvalidArgument(format!(
            "sketch width {samples} must lie in 1..={}",
            c.rows()
        )));
    }
    let omega = gaussian_matrix(c.cols(), samples, seed);
    let (q, _) = householder_qr(&c.matmul(&omega));
    Ok(q)
}

/// Truncated TLS solution from the projected matrix `Z = QᵀC`, truncated at
/// `k` right singular vectors, returned with `σ_{k+1}` of `Z`.
fn truncated_from_projection(z: &Mat, k: usize, c_fro: f64) -> Result<(Vec<f64>, f64)> {
    let n = z.cols() - 1;
    let (s, v) = svd_right(z)?;
    let floor = SKETCH_RANK_FLOOR * c_fro;
    let available = s.iter().filter(|&&x| x > floor).count();
    if available < k {
        return Err(Error::RankCollapse { available, required: k });
    }
    let v11 = v.submatrix(0, n, 0, k);
    let v21: Vec<f64> = (0..k).map(|j| v[(n, j)]).collect();
    let v22_norm = (1.0 - dot(&v21, &v21)).max(0.0).sqrt();
    if v22_norm <= V22_TOL {
        return Err(Error::NonGenericTruncation { k, value: v22_norm });
    }
    let x = pinv(&v11.transpose())?.matvec(&v21);
    Ok((x, s.get(k).copied().unwrap_or(0.0)))
}

/// Randomized truncated TLS: Gaussian sketch of `C`, thin QR, SVD of the
/// small projected matrix, then `x = (V₁₁ᵀ)† v₂₁ᵀ`.
pub fn rttls(p: &TlsProblem, cfg: &RandConfig) -> Result<TlsSolution> {
    cfg.validate(p.n())?;
    let start = Instant::now();
    let c = p.augmented();
    let q = sketch_range(&c, cfg.samples_l, cfg.seed)?;
    let z = q.t_matmul(&c);
    let (x, sigma) = truncated_from_projection(&z, cfg.trunc_k, c.fro_norm())?;
    Ok(TlsSolution::new(p, x, sigma, Method::Rttls, start))
}

/// Basis produced by [`adaptive_range_finder`].
#[derive(Debug, Clone)]
pub struct RangeBasis {
    /// `m × j`, orthonormal columns
    pub q: Mat,
    /// true when the basis cap was reached before the probe norms fell below
    /// the threshold; `q` is still a valid orthonormal basis
    pub exhausted: bool,
}

impl RangeBasis {
    pub fn size(&self) -> usize {
        self.q.cols()
    }
}

/// Grows an orthonormal basis `Q` of the range of `C` until `r` consecutive
/// probe vectors `(I − QQᵀ)Cω` all have norm below `ε / (10 √(2/π))`, which
/// certifies `‖C − QQᵀC‖₂ ≤ ε` with probability at least
/// `1 − min(m, n+1) 10⁻ʳ`.
pub fn adaptive_range_finder(c: &Mat, cfg: &AdaptiveConfig) -> Result<RangeBasis> {
    let (rows, cols) = c.shape();
    let max_basis = cfg.validate(rows, cols)?;
    let threshold = cfg.threshold();
    let mut stream = cfg.seed.stream();

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut probes: std::collections::VecDeque<Vec<f64>> =
        (0..cfg.num_probes).map(|_| c.matvec(&stream.normal_vec(cols))).collect();
    let mut exhausted = false;

    while probes.iter().map(|y| norm2(y)).fold(0.0, f64::max) > threshold {
        if basis.len() >= max_basis {
            exhausted = true;
            break;
        }
        let mut y = probes.pop_front().expect("probe window is never empty");
        project_out(&basis, &mut y);
        project_out(&basis, &mut y);
        let nrm = norm2(&y);
        if nrm > 0.0 {
            let q: Vec<f64> = y.iter().map(|v| v / nrm).collect();
            for other in probes.iter_mut() {
                let coef = dot(&q, other);
                axpy(-coef, &q, other);
            }
            basis.push(q);
        }
        let mut fresh = c.matvec(&stream.normal_vec(cols));
        project_out(&basis, &mut fresh);
        probes.push_back(fresh);
    }

    let j = basis.len();
    let q = Mat::from_fn(rows, j, |i, k| basis[k][i]);
    Ok(RangeBasis { q, exhausted })
}

fn project_out(basis: &[Vec<f64>], y: &mut [f64]) {
    for q in basis {
        let coef = dot(q, y);
        axpy(-coef, q, y);
    }
}

/// Adaptive randomized truncated TLS: the truncation index is the size of the
/// basis found by [`adaptive_range_finder`] on `[A, b]`.
pub fn arttls(p: &TlsProblem, cfg: &AdaptiveConfig) -> Result<TlsSolution> {
    arttls_with_basis(p, cfg).map(|(sol, _)| sol)
}

/// [`arttls`] that also returns the basis it used.
pub fn arttls_with_basis(p: &TlsProblem, cfg: &AdaptiveConfig) -> Result<(TlsSolution, RangeBasis)> {
    let start = Instant::now();
    let c = p.augmented();
    let basis = adaptive_range_finder(&c, cfg)?;
    if basis.exhausted {
        return Err(Error::BasisExhausted { max_basis: basis.size() });
    }
    let j = basis.size();
    if j == 0 {
        return Err(Error::RankCollapse { available: 0, required: 1 });
    }
    let z = basis.q.t_matmul(&c);
    let (x, sigma) = truncated_from_projection(&z, j, c.fro_norm())?;
    Ok((TlsSolution::new(p, x, sigma, Method::Arttls, start), basis))
}

/// A priori bounds on `‖x_ttls − x_rttls‖₂ / ‖x_ttls‖₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RttlsBound {
    pub general: f64,
    pub specific: f64,
    /// false when `k < 2`, `p < 4` or the spectral gap condition
    /// `σ_{k+1} ≤ (σ̃_k − σ_{k+1}) / (6 + 54 √((k+p) n))` fails; the values
    /// are still returned but carry no guarantee
    pub hypothesis_holds: bool,
}

/// Evaluates the two error bounds for the truncated randomized solver with
/// target rank `k` and oversampling `oversample_p`.
pub fn rttls_error_bound(p: &TlsProblem, k: usize, oversample_p: usize) -> Result<RttlsBound> {
    let n = p.n();
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!("truncation k = {k} outside 1..={n}")));
    }
    let sa = singular_values(&p.a)?;
    let mut sc = singular_values(&p.augmented())?;
    sc.resize(n + 1, 0.0);
    let sigma_1 = sc[0];
    let sigma_next = sc[k];
    let sigma_tilde_k = sa.get(k - 1).copied().unwrap_or(0.0);
    let b_norm = norm2(&p.b);
    let root = ((k + oversample_p) as f64 * n as f64).sqrt();

    let gap = sigma_tilde_k - sigma_next;
    let general = if gap > 0.0 && b_norm > sigma_next {
        12.0 * sigma_1 * ((1.0 + 9.0 * root) * sigma_next + sigma_next) / (gap * (b_norm - sigma_next))
    } else {
        f64::INFINITY
    };
    let specific = if sigma_next == 0.0 {
        0.0
    } else if sigma_tilde_k > 0.0 && b_norm > 0.0 {
        12.0 * sigma_1 * (2.0 + 9.0 * root) * sigma_next / (sigma_tilde_k * b_norm)
    } else {
        f64::INFINITY
    };
    let hypothesis_holds =
        k >= 2 && oversample_p >= 4 && gap > 0.0 && sigma_next <= gap / (6.0 + 54.0 * root);
    if !hypothesis_holds {
        log::debug!("rttls bound: hypotheses violated for k = {k}, p = {oversample_p}");
    }
    Ok(RttlsBound { general, specific, hypothesis_holds })
}

/// Picks the truncation index by generalized cross validation on a
/// randomized rank-`l` SVD of `A`: the minimizer over `k ∈ 1..l` of
/// `m ‖b − A x_k‖² / (m − k)²`, with `x_k` the rank-`k` truncated SVD solution
/// built from the approximate factors. Indices beyond the numerical rank of
/// the sketch (`σ_k ≤ ε max(m, n) σ₁`) are skipped.
pub fn select_truncation_gcv(p: &TlsProblem, cfg: &RandConfig) -> Result<usize> {
    let (m, n) = p.a.shape();
    let l = cfg.samples_l;
    if l < 2 || l > n.min(m) {
        return Err(Error::InvalidArgument(format!("GCV needs 2 <= l <= min(m, n), got l = {l}")));
    }
    let q = sketch_range(&p.a, l, cfg.seed)?;
    let f = svd(&q.t_matmul(&p.a))?;
    let coeffs = f.u.t_matvec(&q.t_matvec(&p.b));
    let av = p.a.matmul(&f.v);
    let rank_floor = f64::EPSILON * m.max(n) as f64 * f.s[0];

    let mut ax = vec![0.0; m];
    let mut best = (1usize, f64::INFINITY);
    for k in 1..l {
        let sk = f.s[k - 1];
        if sk <= rank_floor || k >= m {
            break;
        }
        let w = coeffs[k - 1] / sk;
        for (i, v) in ax.iter_mut().enumerate() {
            *v += w * av[(i, k - 1)];
        }
        let res: Vec<f64> = p.b.iter().zip(&ax).map(|(b, v)| b - v).collect();
        let r2 = dot(&res, &res);
        let denom = (m - k) as f64;
        let g = m as f64 * r2 / (denom * denom);
        if g < best.1 {
            best = (k, g);
        }
    }
    Ok(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{spectral_norm, sub_vec};
    use crate::tls::{tls_svd, ttls};

    fn random_problem(m: usize, n: usize, seed: u64) -> TlsProblem {
        let a = gaussian_matrix(m, n, RngSeed(seed));
        let b = gaussian_matrix(m, 1, RngSeed(seed + 1000)).into_vec();
        TlsProblem::new(a, b).unwrap()
    }

    fn rel(a: &[f64], b: &[f64]) -> f64 {
        norm2(&sub_vec(a, b)) / norm2(b)
    }

    #[test]
    fn full_sketch_rtls_is_exact() {
        let p = random_problem(20, 6, 1);
        let cfg = RandConfig { samples_l: 7, trunc_k: 1, oversample_p: 6, seed: RngSeed(2) };
        let x = rtls(&p, &cfg).unwrap().x;
        assert!(rel(&x, &tls_svd(&p).unwrap().x) < 1e-8);
    }

    #[test]
    fn rtls_projected_matrix_is_symmetric_psd() {
        let p = random_problem(30, 8, 3);
        let cfg = RandConfig::new(2, 3, RngSeed(4));
        let z = rtls_projected_matrix(&p, &cfg).unwrap();
        let asym = z.sub(&z.transpose()).max_abs();
        let (w, _) = symmetric_eigen(&symmetrize(&z)).unwrap();
        assert!(asym <= 1e-12 * w[0]);
        assert!(*w.last().unwrap() >= -1e-12 * w[0]);
    }

    #[test]
    fn exact_low_rank_rttls_matches_ttls() {
        let (m, n, k) = (40, 12, 3);
        let c = gaussian_matrix(m, k, RngSeed(5)).matmul(&gaussian_matrix(k, n + 1, RngSeed(6)));
        let a = c.columns(0, n);
        let p = TlsProblem::new(a, c.col(n)).unwrap();
        let xt = ttls(&p, k).unwrap().x;
        let xr = rttls(&p, &RandConfig::new(k, 4, RngSeed(7))).unwrap().x;
        assert!(rel(&xr, &xt) < 1e-10);
    }

    #[test]
    fn rttls_rank_collapse() {
        let c = gaussian_matrix(20, 2, RngSeed(5)).matmul(&gaussian_matrix(2, 9, RngSeed(6)));
        let p = TlsProblem::new(c.columns(0, 8), c.col(8)).unwrap();
        let err = rttls(&p, &RandConfig::new(4, 2, RngSeed(1))).unwrap_err();
        assert!(matches!(err, Error::RankCollapse { available: 2, required: 4 }));
    }

    #[test]
    fn range_finder_on_zero_matrix() {
        let basis = adaptive_range_finder(&Mat::zeros(6, 5), &AdaptiveConfig::new(1e-3, 4, RngSeed(1))).unwrap();
        assert_eq!(basis.size(), 0);
        assert!(!basis.exhausted);
    }

    #[test]
    fn range_finder_on_rank_three() {
        let c = gaussian_matrix(50, 3, RngSeed(8)).matmul(&gaussian_matrix(3, 30, RngSeed(9)));
        let eps = 1e-6;
        let basis = adaptive_range_finder(&c, &AdaptiveConfig::new(eps, 5, RngSeed(10))).unwrap();
        assert!((3..=5).contains(&basis.size()), "basis size {}", basis.size());
        let resid = c.sub(&basis.q.matmul(&basis.q.t_matmul(&c)));
        assert!(spectral_norm(&resid).unwrap() <= eps);
    }

    #[test]
    fn range_finder_cap_flags_exhaustion() {
        let c = gaussian_matrix(30, 20, RngSeed(3));
        let mut cfg = AdaptiveConfig::new(1e-8, 3, RngSeed(4));
        cfg.max_basis = Some(5);
        let basis = adaptive_range_finder(&c, &cfg).unwrap();
        assert!(basis.exhausted);
        assert_eq!(basis.size(), 5);
        let p = TlsProblem::new(c.columns(0, 19), c.col(19)).unwrap();
        assert!(matches!(arttls(&p, &cfg), Err(Error::BasisExhausted { .. })));
    }

    #[test]
    fn exact_rank_arttls_matches_rttls() {
        let (m, n, k) = (60, 15, 4);
        let c = gaussian_matrix(m, k, RngSeed(11)).matmul(&gaussian_matrix(k, n + 1, RngSeed(12)));
        let p = TlsProblem::new(c.columns(0, n), c.col(n)).unwrap();
        let xa = arttls(&p, &AdaptiveConfig::new(1e-8, 6, RngSeed(13))).unwrap().x;
        let xr = rttls(&p, &RandConfig { samples_l: k, trunc_k: k, oversample_p: 0, seed: RngSeed(14) }).unwrap().x;
        assert!(rel(&xa, &xr) < 1e-8);
    }

    #[test]
    fn bound_vanishes_for_exact_rank() {
        let (m, n, k) = (30, 10, 3);
        let c = gaussian_matrix(m, k, RngSeed(1)).matmul(&gaussian_matrix(k, n + 1, RngSeed(2)));
        let p = TlsProblem::new(c.columns(0, n), c.col(n)).unwrap();
        let bound = rttls_error_bound(&p, k, 4).unwrap();
        assert!(bound.specific < 1e-10, "specific bound {}", bound.specific);
    }

    #[test]
    fn gcv_on_noiseless_rank_three() {
        let a = gaussian_matrix(60, 3, RngSeed(21)).matmul(&gaussian_matrix(3, 20, RngSeed(22)));
        let b = a.matvec(&gaussian_matrix(20, 1, RngSeed(23)).into_vec());
        let p = TlsProblem::new(a, b).unwrap();
        let k = select_truncation_gcv(&p, &RandConfig { samples_l: 10, trunc_k: 1, oversample_p: 9, seed: RngSeed(1) })
            .unwrap();
        assert_eq!(k, 3);
    }

    #[test]
    fn config_validation() {
        let p = random_problem(10, 3, 1);
        let bad = RandConfig { samples_l: 6, trunc_k: 2, oversample_p: 4, seed: RngSeed(0) };
        assert!(matches!(rttls(&p, &bad), Err(Error::InvalidArgument(_))));
        let bad = AdaptiveConfig::new(0.0, 3, RngSeed(0));
        assert!(adaptive_range_finder(&p.a, &bad).is_err());
    }
}
