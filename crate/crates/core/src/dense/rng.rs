//! Seeded Gaussian and uniform streams.
//!
//! Every stochastic routine owns its stream, derived from an [`RngSeed`].
//! The underlying generator is ChaCha8, which is counter based: a seed plus a
//! stream id addresses an independent sequence, so sub-streams can be split off
//! without any shared state. Normals are produced by the Box–Muller transform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Mat;

/// 64-bit seed. The same seed reproduces the same samples bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// Derives an independent seed, e.g. one per repetition of an experiment.
    pub fn split(self, index: u64) -> RngSeed {
        // splitmix64 finalizer over (seed, index)
        let mut z = self.0 ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        RngSeed(z ^ (z >> 31))
    }

    pub fn stream(self) -> Stream {
        Stream::new(self)
    }
}

impl From<u64> for RngSeed {
    fn from(s: u64) -> Self {
        RngSeed(s)
    }
}

/// A sample stream owned by one computation.
pub struct Stream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl Stream {
    pub fn new(seed: RngSeed) -> Self {
        Stream { rng: ChaCha8Rng::seed_from_u64(seed.0), spare: None }
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform on [-1, 1).
    pub fn symmetric_uniform(&mut self) -> f64 {
        2.0 * self.uniform() - 1.0
    }

    /// Standard normal via Box–Muller; the second draw of each pair is cached.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 in (0, 1] so the log is finite
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(radius * theta.sin());
        radius * theta.cos()
    }

    pub fn normal_vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.normal()).collect()
    }

    pub fn normal_mat(&mut self, rows: usize, cols: usize) -> Mat {
        Mat::from_vec(rows, cols, self.normal_vec(rows * cols))
    }

    /// Uniformly distributed unit vector.
    pub fn unit_vec(&mut self, n: usize) -> Vec<f64> {
        loop {
            let v = self.normal_vec(n);
            let nrm = super::norm2(&v);
            if nrm > 0.0 {
                return v.into_iter().map(|x| x / nrm).collect();
            }
        }
    }
}

/// `rows × cols` matrix of i.i.d. standard normal entries.
pub fn gaussian_matrix(rows: usize, cols: usize, seed: RngSeed) -> Mat {
    seed.stream().normal_mat(rows, cols)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_of_a_large_sample() {
        let mut s = RngSeed(42).stream();
        let n = 1_000_000;
        let v = s.normal_vec(n);
        let mean = v.iter().sum::<f64>() / n as f64;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "variance {var}");
        let m = gaussian_matrix(5, 3, RngSeed(42));
        assert_eq!(m.shape(), (5, 3));
    }

    #[test]
    fn same_seed_same_draw() {
        let a = gaussian_matrix(1, 1, RngSeed(7));
        let b = gaussian_matrix(1, 1, RngSeed(7));
        assert_eq!(a[(0, 0)].to_bits(), b[(0, 0)].to_bits());
    }

    #[test]
    fn different_seeds_differ() {
        let a = gaussian_matrix(3, 2, RngSeed(1));
        let b = gaussian_matrix(3, 2, RngSeed(2));
        assert!(a.as_slice().iter().zip(b.as_slice()).any(|(x, y)| x != y));
    }

    #[test]
    fn split_streams_are_distinct() {
        let s = RngSeed(9);
        assert_ne!(s.split(0), s.split(1));
        assert_eq!(s.split(3), s.split(3));
    }
}
