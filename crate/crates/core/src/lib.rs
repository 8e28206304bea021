//! Bicharacter-graded statistics, Hopf-algebra axiom checks, Wick algebras
//! and truncated Fock representations.
//!
//! The pipeline runs `groups` (grading group and commutation factor) →
//! `freealg` (graded free algebra on starred and unstarred generators) →
//! `wick` (twist, normal ordering, twisted product) → `fock` (matrices,
//! Gram blocks, null quotient). `hopf` checks the structure-constant axioms
//! independently.

pub mod error;
pub mod fock;
pub mod freealg;
pub mod groups;
pub mod hopf;
pub mod linalg;
pub mod report;
pub mod scalar;
pub mod wick;

pub use error::{Error, Result};
pub use fock::{build_fock, FockRep};
pub use freealg::{Alphabet, GradedPoly, Letter, Word};
pub use groups::{AbelianGroup, Bicharacter, GroupElement};
pub use report::Report;
pub use scalar::Scalar;
pub use wick::{TwistSpec, WickPoly};
