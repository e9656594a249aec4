//! Smooth-weighted Gauss circle sums Ψ_G(x, y) = Σ_{n ≤ x, P(n) ≤ y} r(n):
//! exact counts, saddle-point and Dickman-type estimates, and numerical
//! checks of the supporting prime-sum and Euler-product estimates.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod config;
pub mod error;
pub mod estimators;
pub mod euler;
pub mod kahan;
pub mod prime_sums;
pub mod primes;
pub mod quadrature;
pub mod report;
pub mod saddle;
pub mod special;
pub mod tolerances;

pub use arith::{chi4, exact_psi_g, lattice_r, r_over_4, ExactCount, ExactOptions, Method};
pub use error::{Error, Result};
pub use estimators::ComparisonRow;
pub use euler::PhiDerivatives;
pub use prime_sums::PrimeSumReport;
pub use primes::{PrimeEntry, PrimeTable, SpfTable};
pub use saddle::SaddleResult;
pub use special::DickmanTable;
pub use num_complex::Complex64;
