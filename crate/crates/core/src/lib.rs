//! Frontiers of ELI queries under DL-Lite ontologies, and what they are
//! good for.
//!
//! The crate is organised around a small reasoning kernel ([`reasoner`])
//! that builds universal models lazily and checks homomorphisms into them.
//! On top of it sit the frontier constructions ([`frontier`]). The
//! membership-query learner ([`learner`]) and the example-set generator
//! ([`characterize`]) both build on frontiers. [`testkit`] holds the brute-force oracles used to
//! validate all of them.

pub mod characterize;
pub mod enumerate;
pub mod error;
pub mod frontier;
pub mod learner;
pub mod normal;
pub mod parse;
pub mod reasoner;
pub mod syntax;
pub mod testkit;

pub use error::{Error, Result};
pub use syntax::{
    concept_to_eliq, dialect_of, eliq_to_concept, ABox, Atoms, BasicConcept, ConceptLabel, Cq,
    Dialect, Eli, Ontology, Role, Signature, Symbol,
};
