//! Computational toolkit for Dirichlet characters of odd order: exact
//! character arithmetic, maximal partial sums, pretentious distances,
//! truncated Euler products and the extremal-character construction.

pub mod arith;
pub mod character;
pub mod charsum;
pub mod construct;
pub mod error;
pub mod lfunc;
pub mod pretentious;
pub mod summation;

pub use arith::{factorize, sieve_primes, Factorization, PrimeTable};
pub use character::{
    build_group, enumerate_characters, CharacterFilter, CharacterGroup, DirichletCharacter, Parity,
    UnitValue,
};
pub use charsum::{max_partial_sum, scan_family, ScanRecord, SumProfile};
pub use construct::{run_pipeline, ConstructionReport, DecompositionReport, PipelineConfig};
pub use error::{Error, Result};
pub use lfunc::{CmaValue, EulerProductValue};
pub use pretentious::{DistanceParams, OddOrderParams, SjTable};
