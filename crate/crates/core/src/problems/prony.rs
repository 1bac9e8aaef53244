//! Linear prediction (Prony) systems built from sums of damped exponentials.

use num_complex::Complex64;

use crate::dense::Mat;
use crate::error::{Error, Result};
use crate::tls::TlsProblem;

/// Signal `y_l = Σ_j c_j exp(λ_j T l)` sampled at period `T`, and the shape of
/// the prediction system built from it.
#[derive(Debug, Clone, PartialEq)]
pub struct PronySpec {
    /// all poles, each conjugate pair listed explicitly
    pub poles: Vec<Complex64>,
    /// real residue per pole
    pub residues: Vec<f64>,
    pub sample_period: f64,
    pub m: usize,
    pub n: usize,
}

/// Upper-half-plane members of the six conjugate pole pairs of the standard
/// twelve-pole test signal.
pub const STANDARD_POLES: [(f64, f64); 6] = [
    (-0.082, 0.926),
    (-0.147, 2.874),
    (-0.188, 4.835),
    (-0.220, 6.800),
    (-0.247, 8.767),
    (-0.270, 10.733),
];

impl PronySpec {
    /// Twelve poles from [`STANDARD_POLES`] and their conjugates, unit
    /// residues, `T = 0.2`.
    pub fn standard(m: usize, n: usize) -> Self {
        let mut poles = Vec::with_capacity(12);
        for &(re, im) in &STANDARD_POLES {
            poles.push(Complex64::new(re, im));
            poles.push(Complex64::new(re, -im));
        }
        let residues = vec![1.0; poles.len()];
        PronySpec { poles, residues, sample_period: 0.2, m, n }
    }

    pub fn order(&self) -> usize {
        self.poles.len()
    }

    /// `z_j = exp(λ_j T)`.
    pub fn nodes(&self) -> Vec<Complex64> {
        self.poles.iter().map(|l| (l * self.sample_period).exp()).collect()
    }

    /// Samples `y_0 .. y_{count−1}`. Conjugate pairs make every sample real.
    pub fn samples(&self, count: usize) -> Vec<f64> {
        let t = self.sample_period;
        (0..count)
            .map(|l| {
                let lt = t * l as f64;
                self.poles
                    .iter()
                    .zip(&self.residues)
                    .map(|(p, c)| c * (p.re * lt).exp() * (p.im * lt).cos())
                    .sum()
            })
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if self.residues.len() != self.poles.len() {
            return Err(Error::InvalidArgument("one residue per pole required".into()));
        }
        if self.n == 0 || self.m < self.n || self.m < self.order() {
            return Err(Error::BadSize(format!(
                "prony needs m >= n >= 1 and m >= p, got m = {}, n = {}, p = {}",
                self.m,
                self.n,
                self.order()
            )));
        }
        let mut unmatched: Vec<(Complex64, f64)> = self.poles.iter().copied().zip(self.residues.iter().copied()).collect();
        while let Some((p, c)) = unmatched.pop() {
            if p.im == 0.0 {
                continue;
            }
            let pos = unmatched
                .iter()
                .position(|&(q, d)| q == p.conj() && d == c)
                .ok_or_else(|| Error::InvalidArgument(format!("pole {p} has no conjugate partner")))?;
            unmatched.swap_remove(pos);
        }
        Ok(())
    }
}

/// Hankel system `A[i][j] = y_{i+j}` (`m × n`) with `b_i = −y_{i+n}`. For
/// `n ≥ p` it is consistent and the solution holds the low-order
/// coefficients of a monic polynomial vanishing at every node `exp(λ_j T)`.
pub fn prony(spec: &PronySpec) -> Result<TlsProblem> {
    spec.validate()?;
    let (m, n) = (spec.m, spec.n);
    let y = spec.samples(m + n);
    let a = Mat::from_fn(m, n, |i, j| y[i + j]);
    let b = (0..m).map(|i| -y[i + n]).collect();
    TlsProblem::new(a, b)
}

/// Roots of `zⁿ + x_{n−1} zⁿ⁻¹ + … + x_1 z + x_0` by the Aberth–Ehrlich
/// simultaneous iteration.
pub fn polynomial_roots(low_coeffs: &[f64]) -> Vec<Complex64> {
    let n = low_coeffs.len();
    if n == 0 {
        return Vec::new();
    }
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(1.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in low_coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    };
    // Start on a circle whose radius is the geometric mean of the root moduli.
    let radius = if low_coeffs[0] != 0.0 { low_coeffs[0].abs().powf(1.0 / n as f64) } else { 1.0 };
    let mut roots: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..1000 {
        let mut max_step = 0.0f64;
        for k in 0..n {
            let (p, dp) = eval(roots[k]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n).filter(|&j| j != k).map(|j| (roots[k] - roots[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            roots[k] -= step;
            max_step = max_step.max(step.norm() / roots[k].norm().max(1.0));
        }
        if max_step < 1e-15 {
            break;
        }
    }
    roots
}
