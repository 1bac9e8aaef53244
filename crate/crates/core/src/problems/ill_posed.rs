//! Discretized first-kind integral equations with known solutions.
//!
//! Each generator returns a square `n × n` matrix, the discretized exact
//! solution `x_true`, and the consistent right-hand side `b = A x_true`.
//! The discretizations follow the usual regularization test-problem
//! conventions; the formula is spelled out on each function.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::dense::Mat;
use crate::error::{Error, Result};
use crate::tls::TlsProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IllPosed {
    Shaw,
    Baart,
    Deriv2,
    Foxgood,
    Gravity,
    Heat,
    Phillips,
}

impl IllPosed {
    pub const ALL: [IllPosed; 7] = [
        IllPosed::Shaw,
        IllPosed::Baart,
        IllPosed::Deriv2,
        IllPosed::Foxgood,
        IllPosed::Gravity,
        IllPosed::Heat,
        IllPosed::Phillips,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IllPosed::Shaw => "shaw",
            IllPosed::Baart => "baart",
            IllPosed::Deriv2 => "deriv2",
            IllPosed::Foxgood => "foxgood",
            IllPosed::Gravity => "gravity",
            IllPosed::Heat => "heat",
            IllPosed::Phillips => "phillips",
        }
    }

    /// Sizes must be a multiple of this.
    pub fn size_multiple(self) -> usize {
        match self {
            IllPosed::Shaw | IllPosed::Baart | IllPosed::Heat => 2,
            IllPosed::Phillips => 4,
            _ => 1,
        }
    }

    pub fn generate(self, n: usize) -> Result<TlsProblem> {
        let q = self.size_multiple();
        if n == 0 || !n.is_multiple_of(q) {
            let rule = if q == 1 { "positive".to_string() } else { format!("a positive multiple of {q}") };
            return Err(Error::BadSize(format!("{} needs a size that is {rule}, got {n}", self.name())));
        }
        let (a, x) = match self {
            IllPosed::Shaw => shaw(n),
            IllPosed::Baart => baart(n),
            IllPosed::Deriv2 => deriv2(n),
            IllPosed::Foxgood => foxgood(n),
            IllPosed::Gravity => gravity(n),
            IllPosed::Heat => heat(n),
            IllPosed::Phillips => phillips(n),
        };
        let b = a.matvec(&x);
        Ok(TlsProblem::new(a, b)?.with_truth(x))
    }
}

impl fmt::Display for IllPosed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IllPosed {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        IllPosed::ALL
            .iter()
            .copied()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownProblem(s.to_string()))
    }
}

/// Generates the named problem of size `n × n`.
pub fn ill_posed(name: &str, n: usize) -> Result<TlsProblem> {
    name.parse::<IllPosed>()?.generate(n)
}

/// Image restoration kernel on `[−π/2, π/2]²`:
/// `K(s, t) = (cos s + cos t)² (sin u / u)²`, `u = π (sin s + sin t)`,
/// midpoint rule with `h = π/n`; solution
/// `2 exp(−6 (t − 0.8)²) + exp(−2 (t + 0.5)²)`.
fn shaw(n: usize) -> (Mat, Vec<f64>) {
    let h = PI / n as f64;
    let nodes: Vec<f64> = (0..n).map(|i| -PI / 2.0 + (i as f64 + 0.5) * h).collect();
    let co: Vec<f64> = nodes.iter().map(|s| s.cos()).collect();
    let psi: Vec<f64> = nodes.iter().map(|s| PI * s.sin()).collect();
    let a = Mat::from_fn(n, n, |i, j| {
        let u = psi[i] + psi[j];
        let sinc = if u == 0.0 { 1.0 } else { u.sin() / u };
        let v = (co[i] + co[j]) * sinc;
        h * v * v
    });
    let x = nodes.iter().map(|t| 2.0 * (-6.0 * (t - 0.8).powi(2)).exp() + (-2.0 * (t + 0.5).powi(2)).exp()).collect();
    (a, x)
}

/// Kernel `exp(s cos t)` on `s ∈ [0, π/2]`, `t ∈ [0, π]`, Galerkin with
/// normalized box functions: exact integration in `s`, Simpson's rule in
/// `t`. Solution `sin t`.
fn baart(n: usize) -> (Mat, Vec<f64>) {
    let hs = PI / (2.0 * n as f64);
    let ht = PI / n as f64;
    let scale = 1.0 / (3.0 * 2f64.sqrt());
    let half = n / 2;
    // ∫ exp(s c) ds over each s-cell, for a given t-abscissa value c = cos t.
    let cell_integrals = |c: f64, exact_zero: bool| -> Vec<f64> {
        if exact_zero {
            return vec![hs; n];
        }
        (0..n).map(|i| ((i as f64 + 1.0) * hs * c).exp() / c - (i as f64 * hs * c).exp() / c).collect()
    };
    let mut a = Mat::zeros(n, n);
    let mut left = cell_integrals(1.0, false);
    for j in 0..n {
        let mid = cell_integrals((ht * (j as f64 + 0.5)).cos(), false);
        let right = cell_integrals((ht * (j as f64 + 1.0)).cos(), j + 1 == half);
        for i in 0..n {
            a[(i, j)] = scale * (left[i] + 4.0 * mid[i] + right[i]);
        }
        left = right;
    }
    let x = (0..n).map(|j| ((ht * j as f64).cos() - (ht * (j as f64 + 1.0)).cos()) / ht.sqrt()).collect();
    (a, x)
}

/// Green's function of the second derivative on `[0, 1]`,
/// `K(s, t) = s (t − 1)` for `s < t` and `t (s − 1)` otherwise, Galerkin
/// with normalized box functions. Solution `f(t) = t`.
fn deriv2(n: usize) -> (Mat, Vec<f64>) {
    let h = 1.0 / n as f64;
    let h2 = h * h;
    let mut a = Mat::zeros(n, n);
    for i in 1..=n {
        let fi = i as f64;
        a[(i - 1, i - 1)] = h2 * ((fi * fi - fi + 0.25) * h - (fi - 2.0 / 3.0));
        for j in 1..i {
            let v = h2 * (j as f64 - 0.5) * ((fi - 0.5) * h - 1.0);
            a[(i - 1, j - 1)] = v;
            a[(j - 1, i - 1)] = v;
        }
    }
    let h32 = h * h.sqrt();
    let x = (1..=n).map(|i| h32 * (i as f64 - 0.5)).collect();
    (a, x)
}

/// `K(s, t) = √(s² + t²)` on `[0, 1]²`, midpoint rule. Solution `f(t) = t`.
fn foxgood(n: usize) -> (Mat, Vec<f64>) {
    let h = 1.0 / n as f64;
    let t: Vec<f64> = (0..n).map(|i| h * (i as f64 + 0.5)).collect();
    let a = Mat::from_fn(n, n, |i, j| h * (t[i] * t[i] + t[j] * t[j]).sqrt());
    (a, t)
}

/// Vertical gravity surveying with depth `d = 0.25`:
/// `K(s, t) = d / (d² + (s − t)²)^{3/2}` on `[0, 1]²`, midpoint rule.
/// Solution `sin(π t) + 0.5 sin(2π t)`.
fn gravity(n: usize) -> (Mat, Vec<f64>) {
    let d = 0.25;
    let h = 1.0 / n as f64;
    let t: Vec<f64> = (0..n).map(|i| h * (i as f64 + 0.5)).collect();
    let a = Mat::from_fn(n, n, |i, j| h * d / (d * d + (t[i] - t[j]).powi(2)).powf(1.5));
    let x = t.iter().map(|&s| (PI * s).sin() + 0.5 * (2.0 * PI * s).sin()).collect();
    (a, x)
}

/// Inverse heat equation with unit conductivity: lower triangular Toeplitz
/// matrix from `k(t) = t^{−3/2} exp(−1/(4t)) / (2√π)` sampled at midpoints
/// `t = h/2, 3h/2, …` and scaled by `h`. The solution is a smooth bump on
/// the first half of the interval and zero on the second.
fn heat(n: usize) -> (Mat, Vec<f64>) {
    let h = 1.0 / n as f64;
    let c = h / (2.0 * PI.sqrt());
    let col: Vec<f64> = (0..n)
        .map(|i| {
            let t = h * (i as f64 + 0.5);
            c * t.powf(-1.5) * (-1.0 / (4.0 * t)).exp()
        })
        .collect();
    let a = Mat::from_fn(n, n, |i, j| if i >= j { col[i - j] } else { 0.0 });
    let mut x = vec![0.0; n];
    for (i, xi) in x.iter_mut().enumerate().take(n / 2) {
        let ti = (i + 1) as f64 * 20.0 / n as f64;
        *xi = if ti < 2.0 {
            0.75 * ti * ti / 4.0
        } else if ti < 3.0 {
            0.75 + (ti - 2.0) * (3.0 - ti)
        } else {
            0.75 * (-(ti - 3.0) * 2.0).exp()
        };
    }
    (a, x)
}

/// Phillips' test problem on `[−6, 6]`: symmetric Toeplitz Galerkin matrix of
/// the kernel `1 + cos(π (s − t)/3)` restricted to `|s − t| < 3`, and the
/// solution `1 + cos(π t/3)` on `|t| < 3`, both with normalized box functions.
fn phillips(n: usize) -> (Mat, Vec<f64>) {
    let h = 12.0 / n as f64;
    let n4 = n / 4;
    let c = PI / 3.0;
    let w = 9.0 / (h * PI * PI);
    let mut first = vec![0.0; n];
    for (k, r) in first.iter_mut().enumerate().take(n4) {
        let kf = k as f64;
        *r = h + w * (2.0 * (c * kf * h).cos() - (c * (kf - 1.0) * h).cos() - (c * (kf + 1.0) * h).cos());
    }
    first[n4] = h / 2.0 + w * ((c * h).cos() - 1.0);
    let a = Mat::from_fn(n, n, |i, j| first[i.abs_diff(j)]);

    let mut x = vec![0.0; n];
    let sq = h.sqrt();
    for k in 0..n4 {
        let t0 = k as f64 * h;
        let t1 = t0 + h;
        let v = (h + ((c * t1).sin() - (c * t0).sin()) / c) / sq;
        x[2 * n4 + k] = v;
        x[2 * n4 - 1 - k] = v;
    }
    (a, x)
}
