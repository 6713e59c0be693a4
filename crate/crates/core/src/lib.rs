//! Semantic component registry: ontologies, subsumption reasoning, record
//! validation and discovery, compatibility matching, skill composition and
//! manifest generation.

pub mod api;
pub mod codegen;
pub mod decimal;
pub mod matcher;
pub mod ontology;
pub mod reasoner;
pub mod registry;
pub mod skill;
pub mod vocab;
