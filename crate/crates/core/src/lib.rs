//! Exact-rational toolkit for maximum weight 3-path packing.
//!
//! The crate bundles three constructive algorithms whose best output is a
//! 10/17-approximation, brute-force reference solvers, a verifier for the
//! per-instance inequalities behind that ratio, and an exact check of the
//! trade-off linear program together with its dual certificate.
//!
//! Every weight and every comparison is an exact rational; there is no
//! floating point anywhere in the library.

pub mod alg1;
pub mod alg2;
pub mod alg3;
pub mod analysis;
pub mod bench;
pub mod error;
pub mod instance;
pub mod io;
pub mod lpcert;
pub mod matching;
pub mod oracle;
pub mod rational;
pub mod stars;

pub use error::{Error, Result};
pub use instance::{ArcSet, Instance, Matching, Solution, StarPacking, ThreePathPacking, Violation};
pub use rational::Rational;
