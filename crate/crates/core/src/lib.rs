//! A modular sequent-calculus proof engine for expressive description logics.
//!
//! The crate assembles a calculus from a language profile and user-supplied
//! descriptive definitions ([`calculus`]), runs fair backward proof search
//! ([`prover`]), extracts counter-models from saturated branches
//! ([`countermodel`]), and implements identity derivations, structural
//! transformations and rule inversion as executable proof operations
//! ([`meta`]).

pub mod calculus;
pub mod countermodel;
pub mod meta;
pub mod prover;
pub mod syntax;

pub use calculus::{Calculus, DescriptiveDefinition};
pub use countermodel::Interpretation;
pub use prover::{prove, Budget, ProofTree, SearchOutcome};
pub use syntax::{Concept, Formula, Individual, LanguageProfile, RoleTerm, Sequent, Side};
