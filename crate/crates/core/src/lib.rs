//! Discrete-time, finite-state market models with explicit filtrations.
//!
//! The crate computes equivalent martingale measures, detects arbitrage and
//! dominance with exact linear programs, tests completeness and filtration
//! immersion, builds the growth-optimal portfolio and values claims under the
//! real-world measure with that portfolio as numéraire.
//!
//! Every algorithm is generic over [`Scalar`]: [`Rational`] gives exact
//! answers, `f64` trades exactness for speed with a `1e-9` tolerance.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod gop;
pub mod linalg;
pub mod lp;
pub mod market;
pub mod noarb;
pub mod probspace;
pub mod random;
pub mod scalar;
pub mod sensitivity;

pub use error::{Error, NodeId, Result};
pub use scalar::{parse_rational, rat, Rational, Scalar};
