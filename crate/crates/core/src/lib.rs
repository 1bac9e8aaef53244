//! Classical and randomized total least squares.
//!
//! * [`tls`]: SVD, closed-form and truncated solvers on dense matrices
//! * [`randomized`]: sketch-based solvers, the adaptive range finder and
//!   GCV selection of the truncation index
//! * [`perturb`]: first-order error bounds and condition numbers
//! * [`problems`]: synthetic, ill-posed and exponential-fitting test problems
//! * [`bench`]: experiment configuration, drivers and CSV/JSON tables
//! * [`dense`]: the matrix type and the factorizations everything builds on
//!
//! ```
//! use tlsrand::problems::example2;
//! use tlsrand::tls::tls_svd;
//!
//! let sol = tls_svd(&example2(10).unwrap()).unwrap();
//! assert!(sol.x.iter().all(|v| (v + 1.0).abs() < 1e-10));
//! ```
//!
//! The guide in `book/` walks through each module with runnable examples.

pub mod dense;
pub mod error;

pub use dense::{Mat, RngSeed, SvdFactors};
pub use error::{Error, Result};

pub mod bench;
pub mod perturb;
pub mod problems;
pub mod randomized;
pub mod tls;

// The guide's code blocks run as doctests, one module per chapter so a
// failure points at its chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/problems.md")]
    mod problems {}
    #[doc = include_str!("../../../book/src/classical.md")]
    mod classical {}
    #[doc = include_str!("../../../book/src/randomized.md")]
    mod randomized {}
    #[doc = include_str!("../../../book/src/perturbation.md")]
    mod perturbation {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
