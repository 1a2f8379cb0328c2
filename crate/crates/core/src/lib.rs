//! Mixture models with a random number of clusters on univariate data.
//!
//! The crate covers three layers that build on each other:
//!
//! * combinatorics of set partitions in canonical restricted-growth form
//!   ([`partition`]), together with the exchangeable partition probability
//!   function of the Dirichlet and Pitman-Yor processes ([`eppf`]);
//! * closed-form cluster marginal likelihoods for unit-variance Gaussian
//!   observations under a uniform-interval or zero-mean Gaussian prior on the
//!   cluster location, plus lower bounds on marginal split ratios
//!   ([`marginal`]);
//! * posterior inference over the number of clusters: exact brute-force
//!   enumeration for small samples ([`posterior`]), and a collapsed Gibbs
//!   sampler for larger ones ([`gibbs`]).
//!
//! [`datagen`] provides seeded synthetic data generators, [`presets`] bundles
//! ready-made experiment configurations, and [`verify`] packages the
//! inequality and identity checks as runnable suites.

pub mod datagen;
pub mod eppf;
mod error;
pub mod gibbs;
pub mod marginal;
pub mod math;
pub mod partition;
pub mod posterior;
pub mod presets;
pub mod verify;

pub use error::{Error, Result};
