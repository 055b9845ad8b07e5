//! Bosonic Gaussian quantum channels as real matrix pairs on phase space.
//!
//! A Gaussian channel on `n` modes is a pair `(X, Y)` of real `2n x 2n`
//! matrices acting on first and second moments as `d -> X d`,
//! `G -> X G X^T + Y`, subject to the complete-positivity constraint
//! `Y >= i (sigma - X sigma X^T)` as a complex Hermitian inequality.
//!
//! The crate decides and constructs the semigroup-theoretic properties of
//! such channels: composition and the matrix-semigroup embedding,
//! reversibility, divisibility into non-reversible factors, membership in
//! one-parameter semigroups, infinitesimal-divisibility criteria,
//! idempotency with its symplectic normal form, and the classification of
//! gauge-covariant channels.

pub mod channel;
pub mod gauge;
pub mod linalg;
pub mod semigroup;

#[cfg(test)]
pub(crate) mod testutil;

pub use channel::{ChannelError, GaussianChannel, GaussianState};
pub use gauge::{GaugeChannel, GaugeError};
pub use linalg::{ComplexMatrix, LinalgError, RealMatrix, Tolerance};
pub use semigroup::{Generator, SemigroupError};
