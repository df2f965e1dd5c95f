//! Homomorphism densities and homomorphism measures on finite Markov spaces.
//!
//! A finite Markov space is a symmetric nonnegative edge-mass matrix of total
//! mass one. Every pattern graph gets a measure on maps `V -> atoms` whose
//! density with respect to the product of the marginals is the product of the
//! step graphon over the edges. The crate computes these measures and their
//! total masses exactly (by variable elimination) and cross-checks them
//! against sequential constructions, spectra and closed-form examples.

pub mod densities;
pub mod error;
pub mod experiments;
pub mod graphs;
pub mod quadrature;
pub mod scalar;
pub mod seqmeasure;
pub mod spaces;
pub mod spectral;

pub use error::{Error, Result};
pub use graphs::{Bigraph, Graph, Tree};
pub use scalar::Scalar;
pub use spaces::{FiniteMarkovSpace, Partition};
