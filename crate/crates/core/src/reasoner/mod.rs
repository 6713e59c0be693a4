//! Subsumption reasoning by completion-rule saturation.

mod error;
mod graph;
mod interval;
mod normalize;
mod saturation;

use std::sync::Arc;

pub use error::ReasonerError;
pub use graph::{classify, ConceptProfile, LinkProfile, QueryAnswer, QueryStrategy, SubsumptionGraph};
pub use interval::{Bound, Interval, IntervalConstraint};
pub use normalize::{normalize, AttrId, ConceptId, NormalAxiom, NormalizedTBox, RoleId};

use crate::ontology::{parse_query, ConceptExpression, TBox};

/// A TBox together with its classification.
#[derive(Debug, Clone)]
pub struct Reasoner {
    tbox: Arc<TBox>,
    graph: Arc<SubsumptionGraph>,
}

impl Reasoner {
    pub fn new(tbox: TBox) -> Result<Self, ReasonerError> {
        let graph = classify(normalize(&tbox)?)?;
        Ok(Reasoner {
            tbox: Arc::new(tbox),
            graph: Arc::new(graph),
        })
    }

    pub fn tbox(&self) -> &TBox {
        &self.tbox
    }

    pub fn graph(&self) -> &SubsumptionGraph {
        &self.graph
    }

    /// Parses a query expression against this TBox's signature.
    pub fn parse(&self, text: &str) -> Result<ConceptExpression, ReasonerError> {
        Ok(parse_query(text, &self.tbox)?)
    }

    pub fn is_subsumed_by(
        &self,
        sub: &ConceptExpression,
        sup: &ConceptExpression,
    ) -> Result<bool, ReasonerError> {
        self.graph.is_subsumed_by(sub, sup)
    }

    pub fn answer_query(
        &self,
        query: &ConceptExpression,
        candidates: &[String],
    ) -> Result<QueryAnswer, ReasonerError> {
        self.graph.answer_query(query, candidates)
    }

    pub fn deduce_capabilities(
        &self,
        concept: &str,
    ) -> Result<std::collections::BTreeSet<String>, ReasonerError> {
        self.graph.deduce_capabilities(concept)
    }

    pub fn profile(&self, expr: &ConceptExpression) -> Result<ConceptProfile, ReasonerError> {
        self.graph.profile(expr)
    }
}
