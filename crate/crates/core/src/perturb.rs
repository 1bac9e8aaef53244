//! First-order perturbation bounds and condition numbers for the TLS solution.
//!
//! Throughout, `σ = σ_{n+1}` is the smallest singular value of `[A, b]` and
//! `K = (AᵀA − σ²I)⁻¹`, assembled from the SVD of `A` with the shifted
//! eigenvalues computed as `(σ̃_i − σ)(σ̃_i + σ)` to keep small gaps accurate.

use crate::dense::{
    axpy, check_size, cholesky, complete_orthonormal, dot, gaussian_matrix, norm2, singular_values, spectral_norm, svd,
    symmetric_eigen, vec_transpose_indices, Mat, RngSeed, SvdFactors, DEFAULT_SIZE_CAP,
};
use crate::error::{Error, Result};
use crate::tls::{nonzero_norm, tls_svd, GenericityReport, TlsProblem, V22_TOL};

/// Everything the bounds need, computed once per problem.
struct Analysis {
    m: usize,
    n: usize,
    x: Vec<f64>,
    x_norm: f64,
    r: Vec<f64>,
    sigma: f64,
    /// left singular vector of `[A, b]` for `σ`; zero when `m = n`
    u_last: Vec<f64>,
    /// square right factor of `[A, b]`
    v_full: Mat,
    c_values: Vec<f64>,
    c_fro: f64,
    a: SvdFactors,
    /// diagonal of `K` in the right singular basis of `A`
    k_diag: Vec<f64>,
}

impl Analysis {
    fn new(p: &TlsProblem) -> Result<Self> {
        let (m, n) = (p.m(), p.n());
        if m < n {
            return Err(Error::DimensionMismatch(format!("TLS needs m >= n, got {m}x{n}")));
        }
        let c = p.augmented();
        let cf = svd(&c)?;
        let a = svd(&p.a)?;
        let mut c_values = cf.s.clone();
        c_values.resize(n + 1, 0.0);
        let report = GenericityReport::from_values(&a.s, &c_values, n);
        report.ensure()?;
        let sigma = c_values[n];
        let v_full = complete_orthonormal(&cf.v);
        let v22 = v_full[(n, n)];
        if v22.abs() <= V22_TOL {
            return Err(Error::DegenerateV22 { value: v22.abs() });
        }
        let x: Vec<f64> = (0..n).map(|i| -v_full[(i, n)] / v22).collect();
        let u_last = if cf.u.cols() > n { cf.u.col(n) } else { vec![0.0; m] };
        let r = p.residual(&x);
        let k_diag = a.s.iter().map(|&s| 1.0 / ((s - sigma) * (s + sigma))).collect();
        Ok(Analysis {
            m,
            n,
            x_norm: norm2(&x),
            x,
            r,
            sigma,
            u_last,
            v_full,
            c_values,
            c_fro: c.fro_norm(),
            a,
            k_diag,
        })
    }

    fn x_norm(&self) -> Result<f64> {
        nonzero_norm(&self.x)
    }

    /// `‖K‖₂`
    fn k_norm(&self) -> f64 {
        self.k_diag.iter().fold(0.0, |m, &d| m.max(d.abs()))
    }

    /// `‖K Aᵀ‖₂ = max_i σ̃_i / (σ̃_i² − σ²)`
    fn kat_norm(&self) -> f64 {
        self.a.s.iter().zip(&self.k_diag).fold(0.0, |m, (s, d)| m.max((s * d).abs()))
    }

    /// `K` as an explicit `n × n` matrix.
    fn k_matrix(&self) -> Mat {
        let v = &self.a.v;
        let n = self.n;
        let mut out = Mat::zeros(n, n);
        for (t, &d) in self.k_diag.iter().enumerate() {
            for i in 0..n {
                let vi = v[(i, t)] * d;
                for j in 0..n {
                    out[(i, j)] += vi * v[(j, t)];
                }
            }
        }
        out
    }

    /// `K Aᵀ = Ṽ diag(σ̃_i/(σ̃_i² − σ²)) Ũᵀ`, `n × m`.
    fn kat_matrix(&self) -> Mat {
        let mut scaled = self.a.v.clone();
        for i in 0..self.n {
            for (t, v) in scaled.row_mut(i).iter_mut().enumerate() {
                *v *= self.a.s[t] * self.k_diag[t];
            }
        }
        scaled.matmul_t(&self.a.u)
    }

    /// `D_σ = K (Aᵀ + 2 x rᵀ / (1 + xᵀx))`, `n × m`.
    fn d_sigma(&self) -> Mat {
        let kx = self.k_matrix().matvec(&self.x);
        let w = 2.0 / (1.0 + dot(&self.x, &self.x));
        let mut out = self.kat_matrix();
        for (i, &kxi) in kx.iter().enumerate() {
            axpy(w * kxi, &self.r, out.row_mut(i));
        }
        out
    }
}

/// Both sides of the first-order identity
/// `σ u_{n+1}ᵀ [δA, δb] v_{n+1} = rᵀ(δb − δA x) / (1 + xᵀx)`.
pub fn sigma_variation_identity(p: &TlsProblem, da: &Mat, db: &[f64]) -> Result<(f64, f64)> {
    check_perturbation(p, da, db)?;
    let an = Analysis::new(p)?;
    let n = an.n;
    let v_last = an.v_full.col(n);
    // [δA, δb] v_{n+1}
    let mut dv = da.matvec(&v_last[..n]);
    for (d, b) in dv.iter_mut().zip(db) {
        *d += b * v_last[n];
    }
    let lhs = an.sigma * dot(&an.u_last, &dv);
    let dax = da.matvec(&an.x);
    let diff: Vec<f64> = db.iter().zip(&dax).map(|(b, v)| b - v).collect();
    let rhs = dot(&an.r, &diff) / (1.0 + dot(&an.x, &an.x));
    Ok((lhs, rhs))
}

fn check_perturbation(p: &TlsProblem, da: &Mat, db: &[f64]) -> Result<()> {
    if da.shape() != p.a.shape() || db.len() != p.m() {
        return Err(Error::DimensionMismatch(format!(
            "perturbation shapes {}x{} and {} do not match the problem {}x{}",
            da.rows(),
            da.cols(),
            db.len(),
            p.m(),
            p.n()
        )));
    }
    Ok(())
}

/// First-order bound on `‖δx‖₂ / ‖x‖₂` in terms of `‖δb‖₂/‖b‖₂` and
/// `‖δA‖₂/‖A‖₂`.
pub fn forward_bound(p: &TlsProblem, da: &Mat, db: &[f64]) -> Result<f64> {
    check_perturbation(p, da, db)?;
    let an = Analysis::new(p)?;
    let xn = an.x_norm()?;
    forward_bound_from(&an, xn, norm2(db), spectral_norm(da)?)
}

fn forward_bound_from(an: &Analysis, xn: f64, db_norm: f64, da_two: f64) -> Result<f64> {
    // (‖b‖/‖x‖)·‖KAᵀ‖·‖δb‖/‖b‖ and ‖A‖·[…]·‖δA‖/‖A‖ with the norms of b and A cancelled
    let rhs_term = an.kat_norm() * db_norm / xn;
    let a_term = (norm2(&an.r) * an.k_norm() / xn + an.kat_norm()) * da_two;
    Ok(rhs_term + a_term)
}

/// Bound on `‖δx‖₂ / ‖x‖₂` in terms of `‖[δA, δb]‖₂` only.
pub fn forward_bound_corollary(p: &TlsProblem, pert_two_norm: f64) -> Result<f64> {
    let an = Analysis::new(p)?;
    let xn = an.x_norm()?;
    Ok(corollary_from(&an, xn, pert_two_norm))
}

fn corollary_from(an: &Analysis, xn: f64, pert_two_norm: f64) -> f64 {
    let coef = an.kat_norm() * (1.0 + xn * xn).sqrt() / xn + an.k_norm() * norm2(&an.r) / xn;
    coef * pert_two_norm
}

/// Absolute bound on `‖δx‖₂`:
/// `‖KAᵀ‖₂ (‖δb‖₂ + ‖A†‖₂ ‖r‖₂ ‖δA‖_F + ‖x‖₂ ‖δA‖₂)`. Needs full column rank `A`.
pub fn forward_bound_remark(p: &TlsProblem, da: &Mat, db: &[f64]) -> Result<f64> {
    check_perturbation(p, da, db)?;
    let an = Analysis::new(p)?;
    remark_from(&an, norm2(db), da.fro_norm(), spectral_norm(da)?)
}

fn remark_from(an: &Analysis, db_norm: f64, da_fro: f64, da_two: f64) -> Result<f64> {
    let smallest = an.a.s[an.n - 1];
    if smallest == 0.0 {
        return Err(Error::InvalidArgument("A is rank deficient".into()));
    }
    Ok(an.kat_norm() * (db_norm + norm2(&an.r) * da_fro / smallest + an.x_norm * da_two))
}

/// The two closed forms of the condition number built on the SVDs of `A` and
/// `[A, b]` and on a Cholesky factor, in that order.
pub fn cond_bg_forms(p: &TlsProblem) -> Result<(f64, f64)> {
    let an = Analysis::new(p)?;
    let xn = an.x_norm()?;
    Ok((bg_svd_form(&an, xn)?, bg_cholesky_form(&an, xn)?))
}

fn bg_svd_form(an: &Analysis, xn: f64) -> Result<f64> {
    let n = an.n;
    // D̃ Ṽᵀ V(1:n, 1:n) D
    let v11 = an.v_full.submatrix(0, n, 0, n);
    let mut core = an.a.v.t_matmul(&v11);
    for i in 0..n {
        for (j, v) in core.row_mut(i).iter_mut().enumerate() {
            let dj = (an.c_values[j].powi(2) + an.sigma * an.sigma).sqrt();
            *v *= an.k_diag[i] * dj;
        }
    }
    Ok((1.0 + xn * xn).sqrt() * spectral_norm(&core)? * an.c_fro / xn)
}

fn bg_cholesky_form(an: &Analysis, xn: f64) -> Result<f64> {
    let n = an.n;
    let s2 = an.sigma * an.sigma;
    let w = 2.0 / (1.0 + xn * xn);
    let mut g = Mat::zeros(n, n);
    // ÃᵀÃ from the SVD of A, shifted and corrected
    for (t, &s) in an.a.s.iter().enumerate() {
        for i in 0..n {
            let vi = an.a.v[(i, t)] * s * s;
            for j in 0..n {
                g[(i, j)] += vi * an.a.v[(j, t)];
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let id = if i == j { 1.0 } else { 0.0 };
            g[(i, j)] += s2 * (id - w * an.x[i] * an.x[j]);
        }
    }
    let l = cholesky(&g)?;
    let kl = an.k_matrix().matmul(&l);
    Ok((1.0 + xn * xn).sqrt() * spectral_norm(&kl)? * an.c_fro / xn)
}

/// Relative condition number of the TLS solution, evaluated by the Cholesky
/// form and cross-checked against the SVD form.
pub fn cond_bg(p: &TlsProblem) -> Result<f64> {
    let (svd_form, chol_form) = cond_bg_forms(p)?;
    check_agreement(svd_form, chol_form)?;
    Ok(chol_form)
}

fn check_agreement(svd_form: f64, chol_form: f64) -> Result<()> {
    let rel = (svd_form - chol_form).abs() / chol_form.abs().max(f64::MIN_POSITIVE);
    if rel > 1e-6 {
        return Err(Error::FormulaMismatch(format!(
            "condition number forms differ: {svd_form:e} vs {chol_form:e}"
        )));
    }
    Ok(())
}

/// Condition number through the explicit `n × m(n+1)` Jacobian
/// `K (Aᵀ(2 r̂r̂ᵀ − I) G(x) + [I_n ⊗ rᵀ, 0])` with `G(x) = [xᵀ, −1] ⊗ I_m`,
/// under the default size cap.
pub fn cond_lj(p: &TlsProblem) -> Result<f64> {
    cond_lj_with_cap(p, DEFAULT_SIZE_CAP)
}

pub fn cond_lj_with_cap(p: &TlsProblem, cap: usize) -> Result<f64> {
    let an = Analysis::new(p)?;
    let xn = an.x_norm()?;
    let jac = lj_matrix(&an, cap)?;
    Ok(wide_spectral_norm(&jac)? * an.c_fro / xn)
}

fn lj_matrix(an: &Analysis, cap: usize) -> Result<Mat> {
    let (m, n) = (an.m, an.n);
    check_size(n, m * (n + 1), cap)?;
    let r_norm = norm2(&an.r);
    // below roundoff the direction r̂ is noise
    if r_norm <= (m.max(n + 1) as f64) * f64::EPSILON * an.c_fro {
        return Err(Error::ZeroResidual);
    }
    let rhat: Vec<f64> = an.r.iter().map(|v| v / r_norm).collect();
    // W = Aᵀ(2 r̂ r̂ᵀ − I); applying G(x) repeats W scaled by x_j and then −1.
    let at_rhat = an.a.v.matvec(
        &an.a.u.t_matvec(&rhat).iter().zip(&an.a.s).map(|(c, s)| c * s).collect::<Vec<_>>(),
    );
    let at = Mat::from_fn(n, m, |i, l| {
        (0..n).map(|t| an.a.v[(i, t)] * an.a.s[t] * an.a.u[(l, t)]).sum::<f64>()
    });
    let w = Mat::from_fn(n, m, |i, l| 2.0 * at_rhat[i] * rhat[l] - at[(i, l)]);
    let k = an.k_matrix();
    let kw = k.matmul(&w);
    let mut out = Mat::zeros(n, m * (n + 1));
    for i in 0..n {
        let row = out.row_mut(i);
        for j in 0..n {
            let block = &mut row[j * m..(j + 1) * m];
            let xj = an.x[j];
            let kij = k[(i, j)];
            for (l, v) in block.iter_mut().enumerate() {
                *v = xj * kw[(i, l)] + kij * an.r[l];
            }
        }
        for (l, v) in row[n * m..].iter_mut().enumerate() {
            *v = -kw[(i, l)];
        }
    }
    Ok(out)
}

/// The matrices `M + N` and `M_g′` whose spectral norm defines the
/// Kronecker-form condition number. They agree in exact arithmetic.
pub fn zlwq_matrices(p: &TlsProblem, cap: usize) -> Result<(Mat, Mat)> {
    let an = Analysis::new(p)?;
    Ok((zlwq_sum(&an, cap)?, zlwq_reference(&an, cap)?))
}

/// `M + N` built block by block from the Kronecker definitions.
fn zlwq_sum(an: &Analysis, cap: usize) -> Result<Mat> {
    let (m, n) = (an.m, an.n);
    check_size(n, m * (n + 1), cap)?;
    let k = an.k_matrix();
    let kat = an.kat_matrix();
    let y = k.matvec(&an.x);
    let b: Vec<f64> = an.r.iter().zip(an.a_times_x()).map(|(r, ax)| r + ax).collect();
    let ax = an.a_times_x();
    let v_last = an.v_full.col(n);
    let mut out = Mat::zeros(n, m * (n + 1));
    for i in 0..n {
        let row = out.row_mut(i);
        for j in 0..n {
            let kij = k[(i, j)];
            let xj = an.x[j];
            for l in 0..m {
                // K⊗bᵀ − xᵀ⊗(KAᵀ) − K⊗(Ax)ᵀ
                row[j * m + l] = kij * b[l] - xj * kat[(i, l)] - kij * ax[l];
            }
        }
        for l in 0..m {
            row[n * m + l] = kat[(i, l)];
        }
        // N = 2σ y (v_{n+1}ᵀ ⊗ u_{n+1}ᵀ)
        let scale = 2.0 * an.sigma * y[i];
        if scale != 0.0 {
            for j in 0..=n {
                for l in 0..m {
                    row[j * m + l] += scale * v_last[j] * an.u_last[l];
                }
            }
        }
    }
    Ok(out)
}

/// `[−xᵀ ⊗ D_σ + (rᵀ ⊗ K) P, D_σ]` with `P` the vec-transpose permutation,
/// applied as a column reordering.
fn zlwq_reference(an: &Analysis, cap: usize) -> Result<Mat> {
    let (m, n) = (an.m, an.n);
    check_size(n, m * (n + 1), cap)?;
    let k = an.k_matrix();
    let d = an.d_sigma();
    let perm = vec_transpose_indices(m, n);
    let mut out = Mat::zeros(n, m * (n + 1));
    for i in 0..n {
        let row = out.row_mut(i);
        // (rᵀ ⊗ K): column l·n + j holds r_l K[i][j]; column k of it lands at perm[k]
        for l in 0..m {
            for j in 0..n {
                row[perm[l * n + j]] += an.r[l] * k[(i, j)];
            }
        }
        for j in 0..n {
            for l in 0..m {
                row[j * m + l] -= an.x[j] * d[(i, l)];
            }
        }
        for l in 0..m {
            row[n * m + l] = d[(i, l)];
        }
    }
    Ok(out)
}

impl Analysis {
    fn a_times_x(&self) -> Vec<f64> {
        // A x = Ũ diag(σ̃) Ṽᵀ x
        let coeffs: Vec<f64> = self.a.v.t_matvec(&self.x).iter().zip(&self.a.s).map(|(c, s)| c * s).collect();
        self.a.u.matvec(&coeffs)
    }
}

/// Kronecker-form condition number `‖M + N‖₂ ‖[A, b]‖_F / ‖x‖₂`, after
/// checking `M + N = M_g′` entrywise.
pub fn cond_zlwq(p: &TlsProblem) -> Result<f64> {
    cond_zlwq_with_cap(p, DEFAULT_SIZE_CAP)
}

pub fn cond_zlwq_with_cap(p: &TlsProblem, cap: usize) -> Result<f64> {
    let an = Analysis::new(p)?;
    let xn = an.x_norm()?;
    zlwq_from(&an, xn, cap)
}

fn zlwq_from(an: &Analysis, xn: f64, cap: usize) -> Result<f64> {
    let sum = zlwq_sum(an, cap)?;
    let reference = zlwq_reference(an, cap)?;
    let scale = reference.max_abs().max(f64::MIN_POSITIVE);
    let diff = sum.sub(&reference).max_abs();
    if diff > 1e-10 * scale {
        return Err(Error::FormulaMismatch(format!("M + N differs from M_g' by {:e} (relative)", diff / scale)));
    }
    Ok(wide_spectral_norm(&sum)? * an.c_fro / xn)
}

/// Largest singular value of a short, very wide matrix via its Gram matrix.
fn wide_spectral_norm(w: &Mat) -> Result<f64> {
    let gram = w.matmul_t(w);
    let (vals, _) = symmetric_eigen(&gram)?;
    Ok(vals[0].max(0.0).sqrt())
}

/// `‖A†‖₂ ‖b‖₂ / ‖x‖₂` for the TLS solution `x`.
pub fn cond_effective(p: &TlsProblem) -> Result<f64> {
    let x = tls_svd(p)?.x;
    let xn = nonzero_norm(&x)?;
    Ok(pinv_norm(&singular_values(&p.a)?, p.m().max(p.n())) * norm2(&p.b) / xn)
}

fn pinv_norm(values: &[f64], dim: usize) -> f64 {
    let tol = dim as f64 * f64::EPSILON * values.first().copied().unwrap_or(0.0);
    values.iter().rev().find(|&&s| s > tol).map_or(0.0, |s| 1.0 / s)
}

/// `|σ_min(X + t δX) − σ_min(X) − t u_minᵀ δX v_min|`, the remainder of the
/// first-order expansion of the smallest singular value.
pub fn sigma_min_remainder(x: &Mat, dx: &Mat, t: f64) -> Result<f64> {
    let f = svd(x)?;
    let last = f.s.len() - 1;
    let u = f.u.col(last);
    let v = f.v.col(last);
    let first_order = dot(&u, &dx.matvec(&v));
    let perturbed = singular_values(&x.add(&dx.scaled(t)))?;
    Ok((perturbed[last] - f.s[last] - t * first_order).abs())
}

/// Gaussian perturbation `[δA, δb]` rescaled to the given Frobenius norm.
pub fn random_perturbation(m: usize, n: usize, fro_norm: f64, seed: RngSeed) -> (Mat, Vec<f64>) {
    let g = gaussian_matrix(m, n + 1, seed);
    let g = g.scaled(fro_norm / g.fro_norm());
    (g.columns(0, n), g.col(n))
}

/// One row of a perturbation study. Bounds are relative (`‖δx‖₂/‖x‖₂`);
/// condition numbers are multiplied by `delta_ratio` only when compared.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbReport {
    /// `‖[δA, δb]‖_F / ‖[A, b]‖_F`
    pub delta_ratio: f64,
    /// `‖x̂ − x‖₂ / ‖x‖₂` with both solutions from the SVD method
    pub observed_rel_err: Option<f64>,
    /// `None` when the Kronecker-sized matrix exceeds the size cap
    pub k_zlwq: Option<f64>,
    pub k_bg: f64,
    pub k_lj: Option<f64>,
    pub bound_thm: f64,
    pub bound_cor: f64,
    /// the alternate absolute bound divided by `‖x‖₂`
    pub bound_rem: f64,
    pub cond_eff: f64,
}

/// Condition numbers of a problem, independent of any perturbation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conditioning {
    pub k_bg: f64,
    pub k_lj: Option<f64>,
    pub k_zlwq: Option<f64>,
    pub cond_eff: f64,
}

impl Conditioning {
    /// The Kronecker-based numbers are skipped (`None`) when they would exceed
    /// `cap` entries.
    pub fn evaluate(p: &TlsProblem, cap: usize) -> Result<Self> {
        let an = Analysis::new(p)?;
        let xn = an.x_norm()?;
        let svd_form = bg_svd_form(&an, xn)?;
        let k_bg = bg_cholesky_form(&an, xn)?;
        check_agreement(svd_form, k_bg)?;
        let k_lj = skip_oversized(lj_matrix(&an, cap).and_then(|j| Ok(wide_spectral_norm(&j)? * an.c_fro / xn)))?;
        let k_zlwq = skip_oversized(zlwq_from(&an, xn, cap))?;
        let cond_eff = pinv_norm(&an.a.s, an.m.max(an.n)) * norm2(&p.b) / xn;
        Ok(Conditioning { k_bg, k_lj, k_zlwq, cond_eff })
    }
}

fn skip_oversized(v: Result<f64>) -> Result<Option<f64>> {
    match v {
        Ok(x) => Ok(Some(x)),
        Err(Error::SizeOverflow { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

impl PerturbReport {
    /// Evaluates every bound for the perturbation `(da, db)` and measures the
    /// actual change in the solution.
    pub fn evaluate(p: &TlsProblem, da: &Mat, db: &[f64], cond: &Conditioning) -> Result<Self> {
        check_perturbation(p, da, db)?;
        let an = Analysis::new(p)?;
        let xn = an.x_norm()?;
        let da_two = spectral_norm(da)?;
        let pert = da.with_column(db);
        let bound_thm = forward_bound_from(&an, xn, norm2(db), da_two)?;
        let bound_cor = corollary_from(&an, xn, spectral_norm(&pert)?);
        let bound_rem = remark_from(&an, norm2(db), da.fro_norm(), da_two)? / xn;

        let perturbed = TlsProblem::new(p.a.add(da), p.b.iter().zip(db).map(|(b, d)| b + d).collect())?;
        let observed_rel_err = match tls_svd(&perturbed) {
            Ok(sol) => {
                let x = tls_svd(p)?.x;
                Some(norm2(&crate::dense::sub_vec(&sol.x, &x)) / xn)
            }
            Err(e) => {
                log::warn!("perturbed problem could not be solved: {e}");
                None
            }
        };
        Ok(PerturbReport {
            delta_ratio: pert.fro_norm() / an.c_fro,
            observed_rel_err,
            k_zlwq: cond.k_zlwq,
            k_bg: cond.k_bg,
            k_lj: cond.k_lj,
            bound_thm,
            bound_cor,
            bound_rem,
            cond_eff: cond.cond_eff,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::{cholesky_solve, sub_vec};
    use crate::tls::shifted_gram;

    fn golden() -> TlsProblem {
        TlsProblem::new(Mat::from_rows(&[[1.0], [1.0]]), vec![1.0, 0.0]).unwrap()
    }

    fn random_problem(m: usize, n: usize, seed: u64) -> TlsProblem {
        let a = gaussian_matrix(m, n, RngSeed(seed));
        let b = gaussian_matrix(m, 1, RngSeed(seed ^ 0xabcdef)).into_vec();
        TlsProblem::new(a, b).unwrap()
    }

    #[test]
    fn zero_perturbation_gives_zero() {
        let p = golden();
        let (da, db) = (Mat::zeros(2, 1), vec![0.0; 2]);
        assert_eq!(sigma_variation_identity(&p, &da, &db).unwrap(), (0.0, 0.0));
        assert_eq!(forward_bound(&p, &da, &db).unwrap(), 0.0);
        assert_eq!(forward_bound_remark(&p, &da, &db).unwrap(), 0.0);
        assert_eq!(forward_bound_corollary(&p, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn sigma_variation_on_golden_instance() {
        let p = golden();
        let (lhs, rhs) = sigma_variation_identity(&p, &Mat::from_rows(&[[1e-3], [0.0]]), &[0.0, 0.0]).unwrap();
        assert!((lhs - rhs).abs() < 1e-12, "{lhs} vs {rhs}");
        assert!(lhs.abs() > 1e-6);
    }

    #[test]
    fn remark_bound_by_hand_on_golden_instance() {
        let p = golden();
        let da = Mat::from_rows(&[[1e-6], [0.0]]);
        let got = forward_bound_remark(&p, &da, &[0.0, 0.0]).unwrap();
        // σ̃ = √2, σ² = (3 − √5)/2, x = 1/(2 − σ²), r = b − A x, ‖A†‖ = 1/√2
        let s2 = (3.0 - 5f64.sqrt()) / 2.0;
        let x = 1.0 / (2.0 - s2);
        let r_norm = ((1.0 - x).powi(2) + x * x).sqrt();
        let kat = 2f64.sqrt() / (2.0 - s2);
        let expect = kat * (r_norm * 1e-6 / 2f64.sqrt() + x * 1e-6);
        assert!((got - expect).abs() < 1e-15, "{got} vs {expect}");
    }

    #[test]
    fn kat_norm_matches_explicit_product() {
        let p = random_problem(15, 5, 2);
        let an = Analysis::new(&p).unwrap();
        let l = cholesky(&shifted_gram(&p.a, an.sigma)).unwrap();
        let explicit = cholesky_solve(&l, &p.a.transpose());
        let sn = spectral_norm(&explicit).unwrap();
        let s_last = an.a.s[4];
        let closed = s_last / (s_last * s_last - an.sigma * an.sigma);
        assert!((sn - closed).abs() <= 1e-10 * closed);
        assert!(explicit.sub(&an.kat_matrix()).max_abs() <= 1e-10 * sn);
    }

    #[test]
    fn three_condition_numbers_agree() {
        for seed in 0..5u64 {
            let p = random_problem(12 + seed as usize, 3 + seed as usize % 3, 40 + seed);
            let (i, ii) = cond_bg_forms(&p).unwrap();
            assert!((i - ii).abs() <= 1e-8 * ii);
            let lj = cond_lj(&p).unwrap();
            let zlwq = cond_zlwq(&p).unwrap();
            assert!((lj - ii).abs() <= 1e-6 * ii, "lj {lj} vs bg {ii}");
            assert!((zlwq - ii).abs() <= 1e-6 * ii, "zlwq {zlwq} vs bg {ii}");
        }
    }

    #[test]
    fn kronecker_forms_respect_the_cap() {
        let p = random_problem(30, 8, 1);
        assert!(matches!(cond_zlwq_with_cap(&p, 100), Err(Error::SizeOverflow { .. })));
        assert!(matches!(cond_lj_with_cap(&p, 100), Err(Error::SizeOverflow { .. })));
        let c = Conditioning::evaluate(&p, 100).unwrap();
        assert!(c.k_lj.is_none() && c.k_zlwq.is_none());
    }

    #[test]
    fn consistent_system_condition_number() {
        let a = gaussian_matrix(10, 3, RngSeed(7));
        let x0 = [1.0, 2.0, -1.0];
        let p = TlsProblem::new(a.clone(), a.matvec(&x0)).unwrap();
        let k = cond_bg(&p).unwrap();
        let xn = norm2(&x0);
        let pinv_norm = 1.0 / singular_values(&a).unwrap()[2];
        let expect = (1.0 + xn * xn).sqrt() * pinv_norm * p.augmented().fro_norm() / xn;
        assert!((k - expect).abs() <= 1e-8 * expect, "{k} vs {expect}");
        assert!(matches!(cond_lj(&p), Err(Error::ZeroResidual)));
    }

    #[test]
    fn effective_condition_number() {
        let p = TlsProblem::new(Mat::identity(3), vec![1.0, 0.0, 0.0]).unwrap();
        assert!((cond_effective(&p).unwrap() - 1.0).abs() < 1e-14);
        let a = Mat::from_rows(&[[10.0, 0.0], [0.0, 0.1], [0.0, 0.0]]);
        let p = TlsProblem::new(a, vec![10.0, 0.1, 0.0]).unwrap();
        // x = [1, 1], ‖A†‖ = 10, ‖b‖ = √(100.01)
        let expect = 10.0 * 100.01f64.sqrt() / 2f64.sqrt();
        assert!((cond_effective(&p).unwrap() - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn zero_solution_is_reported() {
        let p = TlsProblem::new(Mat::from_rows(&[[2.0], [0.0]]), vec![0.0, 1.0]).unwrap();
        assert!(matches!(forward_bound_corollary(&p, 1e-3), Err(Error::ZeroSolution)));
        assert!(matches!(cond_effective(&p), Err(Error::ZeroSolution)));
    }

    #[test]
    fn bound_dominates_small_perturbations() {
        let p = random_problem(20, 5, 11);
        let x = tls_svd(&p).unwrap().x;
        for seed in 0..5 {
            let (da, db) = random_perturbation(20, 5, 1e-8, RngSeed(seed));
            let bound = forward_bound(&p, &da, &db).unwrap();
            let q = TlsProblem::new(p.a.add(&da), p.b.iter().zip(&db).map(|(a, b)| a + b).collect()).unwrap();
            let err = norm2(&sub_vec(&tls_svd(&q).unwrap().x, &x)) / norm2(&x);
            assert!(err <= bound, "err {err} > bound {bound}");
        }
    }

    #[test]
    fn first_order_remainder_is_quadratic() {
        let x = gaussian_matrix(8, 5, RngSeed(3));
        let dx = gaussian_matrix(8, 5, RngSeed(4));
        let dx = dx.scaled(1.0 / dx.fro_norm());
        let e1 = sigma_min_remainder(&x, &dx, 1e-3).unwrap();
        let e2 = sigma_min_remainder(&x, &dx, 1e-4).unwrap();
        let ratio = (e1 / 1e-6) / (e2 / 1e-8);
        assert!((0.25..=4.0).contains(&ratio), "ratio {ratio}");
    }
}
