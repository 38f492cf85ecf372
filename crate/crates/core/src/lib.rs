//! Exact computations with free factors of free groups: Stallings graphs,
//! Whitehead reduction, marked graphs, subfactor projections into free
//! factor complexes, and ping-pong constructions of fully irreducible
//! outer automorphisms.

pub mod automorphism;
pub mod complex;
pub mod error;
pub mod factor;
pub mod irreducible;
pub mod marked;
pub mod projection;
pub mod sample;
pub mod stallings;
pub mod suites;
pub mod word;

pub use automorphism::{whitehead_automorphisms, Automorphism};
pub use error::{Error, Result};
pub use marked::{Immersion, MarkedGraph};
pub use factor::{is_free_factor, FactorClass, FreeFactorVerdict, ReductionBudget};
pub use stallings::StallingsGraph;
pub use word::{Letter, Word};
