//! Lattice-theoretic Choquet machinery at exactly verifiable scale.
//!
//! Finite lattices and set functions with exact rational values, Möbius
//! inversion and the four capacity/measure representations, k-valuation and
//! locally-finite-valuation certificates, interval-union compact models, and
//! seeded Monte Carlo samplers for Poisson processes and compound Poisson
//! random sets.

pub mod lattice;
pub mod measure;
pub mod rational;
pub mod setfun;
pub mod choquet;
pub mod random_sets;
pub mod space;
pub mod lfv;
pub mod io;
#[cfg(any(test, feature = "oracle"))]
pub mod oracle;
