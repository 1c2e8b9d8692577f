//! Exact computations for the ℤ2×ℤ2-graded Lie superalgebra pso(2n+1|2n),
//! its finite-support limit pso(∞|∞), and the order-p parastatistics Fock
//! spaces built from parafermions and parabosons with relative paraboson
//! relations.
//!
//! * [`exact`]: ℚ / ℚ(√2) scalars, rank, kernel and PSD certificates.
//! * [`graded`]: the matrix realization, graded bracket and relation checks.
//! * [`engine`]: creation words, annihilator rewriting and the Hermitian form.
//! * [`gz`]: Gelfand-Zetlin patterns, branching and row-stable limits.
//! * [`fock`]: level-by-level quotients by the form radical.
//! * [`cli`]: report builders behind the `pso` binary.

pub mod cli;
pub mod engine;
pub mod error;
pub mod exact;
pub mod fock;
pub mod graded;
pub mod gz;

pub use error::{Error, Result};
pub use exact::{QSqrt2, Rational};
