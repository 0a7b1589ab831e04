//! Sumcheck reductions for univariate polynomial IOPs.
//!
//! Oracles are simulated: the verifier gets point-query access to polynomials
//! the prover sends, every message and query is counted, and challenges come
//! from a seeded generator so that runs are reproducible.

pub mod adaptor;
pub mod adversary;
pub mod aurora;
pub mod batch;
pub mod constraint;
pub mod dgm;
pub mod direct;
pub mod error;
pub mod experiment;
pub mod field;
pub mod gemini;
pub mod lfkn;
pub mod piop;
pub mod poly;

pub use error::{Error, Result};
