use proptest::prelude::*;
use proptest::test_runner::RngSeed as ProptestSeed;
use tlsrand::dense::{
    cholesky, cholesky_solve, gaussian_matrix, norm2, pinv, singular_values, spectral_norm, sub_vec, svd,
};
use tlsrand::problems::{add_noise, ill_posed, NoiseSpec};
use tlsrand::tls::{tls_closed, tls_svd, ttls, PartitionedV, TlsProblem};
use tlsrand::{Mat, RngSeed};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, rng_seed: ProptestSeed::Fixed(0x715), failure_persistence: None, ..ProptestConfig::default() }
}

fn random_problem(m: usize, n: usize, seed: u64) -> TlsProblem {
    let a = gaussian_matrix(m, n, RngSeed(seed));
    let b = gaussian_matrix(m, 1, RngSeed(seed).split(1)).into_vec();
    TlsProblem::new(a, b).unwrap()
}

fn shape(max_m: usize, max_n: usize) -> impl Strategy<Value = (usize, usize, u64)> {
    (1..=max_n, any::<u64>()).prop_flat_map(move |(n, seed)| (n + 1..=max_m, Just(n), Just(seed)))
}

fn rel(a: &[f64], b: &[f64]) -> f64 {
    norm2(&sub_vec(a, b)) / norm2(b).max(f64::MIN_POSITIVE)
}

/// `(AᵀA − σ²I)` as a Cholesky factor, with `σ = σ_{n+1}` of `[A, b]`.
fn shifted_factor(p: &TlsProblem, sigma: f64) -> Mat {
    let mut g = p.a.t_matmul(&p.a);
    for i in 0..p.n() {
        g[(i, i)] -= sigma * sigma;
    }
    cholesky(&g).unwrap()
}

proptest! {
    #![proptest_config(config(100))]

    #[test]
    fn svd_and_closed_forms_agree((m, n, seed) in shape(60, 30)) {
        let p = random_problem(m, n, seed);
        let a = tls_svd(&p).unwrap();
        let b = tls_closed(&p).unwrap();
        // random draws with m close to n can have a tiny gap; the shifted
        // Gram system then loses digits in proportion to its conditioning
        let sa = singular_values(&p.a).unwrap();
        let s1 = singular_values(&p.augmented()).unwrap()[0];
        let (st, s) = (sa[n - 1], a.sigma_small);
        let kappa = s1 * s1 / ((st - s) * (st + s));
        let tol = 1e-9f64.max(100.0 * f64::EPSILON * kappa);
        prop_assert!(rel(&b.x, &a.x) <= tol, "rel {} tol {}", rel(&b.x, &a.x), tol);
        prop_assert!((a.sigma_small - b.sigma_small).abs() <= 1e-12 * a.sigma_small.max(1.0));
    }

    #[test]
    fn truncated_forms_agree(((m, n, seed), k_frac) in (shape(40, 12), 0.0f64..1.0)) {
        let p = random_problem(m, n, seed);
        let k = 1 + ((n as f64 * k_frac) as usize).min(n - 1);
        let f = svd(&p.augmented()).unwrap();
        let parts = PartitionedV::split(&f.v, k);
        let v22_norm = parts.v22.fro_norm();
        prop_assume!(v22_norm > 1e-8);
        let first = parts.v12.matmul(&pinv(&parts.v22).unwrap()).scaled(-1.0).into_vec();
        let second = pinv(&parts.v11.transpose()).unwrap().matmul(&parts.v21.transpose()).into_vec();
        prop_assert!(rel(&second, &first) <= 1e-8, "rel {}", rel(&second, &first));
        let solved = ttls(&p, k).unwrap();
        prop_assert!(rel(&solved.x, &first) <= 1e-8);
    }
}

proptest! {
    #![proptest_config(config(50))]

    #[test]
    fn residual_and_norm_identities((m, n, seed) in shape(40, 10)) {
        let p = random_problem(m, n, seed);
        let f = svd(&p.augmented()).unwrap();
        let sigma = f.s[n];
        let v = f.v.col(n);
        let v22 = v[n];
        let x: Vec<f64> = v[..n].iter().map(|t| -t / v22).collect();
        let r = p.residual(&x);
        let xx = norm2(&x).powi(2);

        let predicted: Vec<f64> = f.u.col(n).iter().map(|u| u * sigma / v22).collect();
        prop_assert!(rel(&predicted, &r) <= 1e-8);
        prop_assert!((v22 * v22 - 1.0 / (1.0 + xx)).abs() <= 1e-10);

        let l = shifted_factor(&p, sigma);
        let at = p.a.transpose();
        let kat = spectral_norm(&cholesky_solve(&l, &at)).unwrap();
        let st = *singular_values(&p.a).unwrap().last().unwrap();
        let closed = st / ((st - sigma) * (st + sigma));
        prop_assert!((kat - closed).abs() <= 1e-8 * closed);

        let w = 2.0 / (1.0 + xx);
        let corrected = Mat::from_fn(n, m, |i, j| at[(i, j)] + w * x[i] * r[j]);
        let kcorr = spectral_norm(&cholesky_solve(&l, &corrected)).unwrap();
        prop_assert!((kcorr - kat).abs() <= 1e-8 * kat);
    }
}

#[test]
fn closed_form_matches_on_example_one() {
    let p = tlsrand::problems::example1(100, 40, 0.999976032, RngSeed(3)).unwrap();
    let a = tls_svd(&p).unwrap();
    let b = tls_closed(&p).unwrap();
    assert!(rel(&b.x, &a.x) <= 1e-9);
}

#[test]
fn truncation_regularizes_noisy_shaw() {
    let p = add_noise(&ill_posed("shaw", 100).unwrap(), &NoiseSpec { level: 1e-3, seed: RngSeed(17) });
    let x = ttls(&p, 7).unwrap().x;
    assert!(x.iter().all(|v| v.is_finite()));
    assert!(norm2(&x) < 1e3, "‖x‖ = {}", norm2(&x));
    // the untruncated solution is dominated by amplified noise
    let full = tls_svd(&p).map(|s| norm2(&s.x)).unwrap_or(f64::INFINITY);
    assert!(full > 100.0 * norm2(&x), "unregularized ‖x‖ = {full}, truncated {}", norm2(&x));
}

#[test]
fn truncation_recovers_min_norm_rank_two_solution() {
    let (m, n) = (20, 6);
    let u = gaussian_matrix(m, 2, RngSeed(5));
    let w = gaussian_matrix(n, 2, RngSeed(6));
    let a = u.matmul_t(&w).add(&gaussian_matrix(m, n, RngSeed(7)).scaled(1e-12));
    // x0 in the row space of the rank-2 part is its own min-norm solution
    let x0 = w.matvec(&[0.7, -0.3]);
    let b = u.matmul_t(&w).matvec(&x0);
    let p = TlsProblem::new(a, b).unwrap();
    let x = ttls(&p, 2).unwrap().x;
    assert!(rel(&x, &x0) <= 1e-6, "rel {}", rel(&x, &x0));
}
