//! Dense matrices and the factorizations built on them.

mod chol;
mod eig;
pub mod io;
mod kron;
mod linalg;
mod mat;
mod qr;
mod rng;
mod svd;

pub use chol::{cholesky, cholesky_solve, solve_spd};
pub use eig::symmetric_eigen;
pub use kron::{check_size, kron, kron_with_cap, vec, vec_transpose_indices, vec_transpose_permutation, DEFAULT_SIZE_CAP};
pub use linalg::{norms, pinv, Norms};
pub use mat::{axpy, dot, inf_norm_vec, norm2, sub_vec, Mat};
pub use qr::householder_qr;
pub use rng::{gaussian_matrix, RngSeed, Stream};
pub use svd::{complete_orthonormal, singular_values, spectral_norm, svd, svd_right, SvdFactors, MAX_SWEEPS, NEGLIGIBLE_COLUMN};
