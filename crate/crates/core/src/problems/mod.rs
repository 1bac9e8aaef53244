//! Test problem generators.

mod ill_posed;
mod noise;
mod prony;
mod synthetic;

pub use ill_posed::{ill_posed, IllPosed};
pub use noise::{add_noise, NoiseSpec};
pub use prony::{polynomial_roots, prony, PronySpec, STANDARD_POLES};
pub use synthetic::{example1, example2};
