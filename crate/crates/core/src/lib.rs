//! Computable face of the Hilbert space of Dirichlet series with
//! square-summable coefficients.
//!
//! The crate is organised bottom-up:
//!
//! * [`numtheory`]: sieve tables, multi-indices and multiplicative extension.
//! * [`series`]: coefficient arithmetic, evaluation, norms, mean values and the
//!   reproducing kernel `ζ(z + w̄)`.
//! * [`bohrlift`]: the substitution `z_j = p_j^{-s}` to the infinite polydisk,
//!   point evaluations and polytorus sup-norm search.
//! * [`characters`]: seeded random characters, the Kronecker flow and the
//!   Monte Carlo experiments on vertical limit functions.
//! * [`dilation`]: dilated sine systems in `L²(0,1)`, Gram sections and the
//!   Riesz-basis / completeness decision rules.
//!
//! Coefficient indices are 1-based everywhere: `a_1` is the constant term.

pub mod bohrlift;
pub mod characters;
pub mod dilation;
mod error;
pub mod interval;
pub mod io;
pub mod numtheory;
pub mod quadrature;
pub mod series;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Version of this crate, echoed into experiment artifacts.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Map from primes to complex values, ordered by prime.
pub type PrimeMap = std::collections::BTreeMap<u64, Complex64>;
