//! Relative noise on both sides of a TLS problem.

use crate::dense::{norm2, Mat, RngSeed};
use crate::tls::TlsProblem;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    /// relative level `δ ≥ 0`
    pub level: f64,
    pub seed: RngSeed,
}

/// Returns `b̄ + δ‖b̄‖₂ ζ/‖ζ‖₂` and `Ā + δ‖Ā‖_F Z/‖Z‖_F` with `ζ`, `Z` uniform
/// on `[−1, 1]`. The true solution, if any, is kept.
pub fn add_noise(p: &TlsProblem, spec: &NoiseSpec) -> TlsProblem {
    assert!(spec.level >= 0.0, "noise level must be nonnegative");
    if spec.level == 0.0 {
        return p.clone();
    }
    let (m, n) = p.a.shape();
    let mut stream = spec.seed.stream();
    let zeta: Vec<f64> = (0..m).map(|_| stream.symmetric_uniform()).collect();
    let zmat = Mat::from_fn(m, n, |_, _| stream.symmetric_uniform());

    let sb = spec.level * norm2(&p.b) / norm2(&zeta);
    let b = p.b.iter().zip(&zeta).map(|(b, z)| b + sb * z).collect();
    let sa = spec.level * p.a.fro_norm() / zmat.fro_norm();
    let a = p.a.add(&zmat.scaled(sa));
    TlsProblem { a, b, x_true: p.x_true.clone() }
}
