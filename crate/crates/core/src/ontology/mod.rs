//! Description-logic data model and the textual ontology language.

mod error;
mod expr;
mod levels;
mod parser;
mod serialize;
mod tbox;

pub use error::OntologyError;
pub use expr::{is_identifier, AttributeRestriction, CompareOp, ConceptExpression};
pub use levels::{compute_levels, taxonomy_tree, TaxonomyLevel, TaxonomyNode};
pub use parser::{parse_expression, parse_ontology, parse_ontology_sources, parse_query};
pub use serialize::serialize_ontology;
pub use tbox::{Axiom, TBox, ValueKind};
