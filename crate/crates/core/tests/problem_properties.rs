use proptest::prelude::*;
use proptest::test_runner::RngSeed as ProptestSeed;
use tlsrand::dense::{norm2, singular_values, sub_vec};
use tlsrand::problems::{add_noise, example1, example2, ill_posed, prony, IllPosed, NoiseSpec, PronySpec};
use tlsrand::RngSeed;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, rng_seed: ProptestSeed::Fixed(0x9b), failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(20))]

    #[test]
    fn example1_has_the_prescribed_spectrum(
        (m, n, eps_p, seed) in (1usize..=30, 1e-6f64..0.999_999, any::<u64>())
            .prop_flat_map(|(n, e, s)| (n + 1..=n + 40, Just(n), Just(e), Just(s)))
    ) {
        let p = example1(m, n, eps_p, RngSeed(seed)).unwrap();
        let s = singular_values(&p.augmented()).unwrap();
        for (i, &si) in s.iter().enumerate().take(n) {
            prop_assert!((si - (n - i) as f64).abs() <= 1e-12 * n as f64, "σ_{} = {si}", i + 1);
        }
        prop_assert!((s[n] - (1.0 - eps_p)).abs() <= 1e-12 * n as f64);
        let st = *singular_values(&p.a).unwrap().last().unwrap();
        prop_assert!(st - s[n] <= eps_p + 1e-12 * n as f64);
    }
}

#[test]
fn example2_identities() {
    for m in [10, 50, 100, 250] {
        let p = example2(m).unwrap();
        let s = singular_values(&p.augmented()).unwrap();
        let sa = singular_values(&p.a).unwrap();
        let mf = m as f64;
        assert!((s[m - 2] - mf.sqrt()).abs() <= 1e-10, "m = {m}");
        assert!((sa[m - 3] - (2.0 * mf).sqrt()).abs() <= 1e-10, "m = {m}");
        assert_eq!(p.x_true.as_deref(), Some(&vec![-1.0; m - 2][..]));
    }
}

#[test]
fn noise_levels_are_exact_on_every_problem() {
    for problem in IllPosed::ALL {
        let m = 20 * problem.size_multiple();
        let clean = problem.generate(m).unwrap();
        for level in [1e-1, 1e-2, 1e-3, 1e-4] {
            let noisy = add_noise(&clean, &NoiseSpec { level, seed: RngSeed(3) });
            let db = norm2(&sub_vec(&noisy.b, &clean.b)) / norm2(&clean.b);
            let da = noisy.a.sub(&clean.a).fro_norm() / clean.a.fro_norm();
            assert!((db - level).abs() <= 1e-12, "{}: {db}", problem.name());
            assert!((da - level).abs() <= 1e-12, "{}: {da}", problem.name());
        }
    }
}

#[test]
fn prony_matrices_are_hankel() {
    for (m, n) in [(40, 8), (60, 20), (200, 100)] {
        let p = prony(&PronySpec::standard(m, n)).unwrap();
        let a = &p.a;
        for i in 0..m - 1 {
            for j in 1..n {
                assert_eq!(a[(i, j)], a[(i + 1, j - 1)], "({i}, {j}) for {m}x{n}");
            }
            assert_eq!(p.b[i], -a[(i + 1, n - 1)]);
        }
    }
}

#[test]
fn prony_rank_is_the_model_order() {
    for n in [8, 12, 20] {
        let p = prony(&PronySpec::standard(60, n)).unwrap();
        let s = singular_values(&p.a).unwrap();
        let rank = s.iter().filter(|&&v| v > 1e-8 * s[0]).count();
        assert_eq!(rank, n.min(12), "n = {n}");
    }
}

#[test]
fn ill_posed_generators_reject_bad_names() {
    assert!(ill_posed("laplace", 100).is_err());
    assert!(ill_posed("shaw", 100).is_ok());
}
