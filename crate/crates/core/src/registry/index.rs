use crate::ontology::{Axiom, ConceptExpression, TBox};
use crate::reasoner::{QueryAnswer, Reasoner, ReasonerError};
use crate::vocab;

use super::record::ComponentRecord;
use super::validate::record_expression;
use super::RegistryError;

/// Records are `@<id>` concepts; no ontology name can start with `@`.
const RECORD_PREFIX: char = '@';

/// The ontology extended with one named concept per record, subsumed by
/// the record's kind, types, capabilities, interfaces, attributes and
/// devices, so that query answering retrieves records.
#[derive(Debug, Clone)]
pub struct SemanticIndex {
    reasoner: Reasoner,
    concepts: Vec<String>,
}

pub(crate) fn record_concept(id: &str) -> String {
    format!("{RECORD_PREFIX}{id}")
}

impl SemanticIndex {
    pub fn build<'a>(
        ontology: &TBox,
        records: impl IntoIterator<Item = &'a ComponentRecord>,
    ) -> Result<Self, ReasonerError> {
        let mut tbox = ontology.clone();
        let records: Vec<&ComponentRecord> = records.into_iter().collect();
        // Message types the ontologies never mention still get a concept so
        // interface queries over them work.
        for r in &records {
            for i in r.interfaces() {
                if !tbox.has_concept(&i.message_type) {
                    tbox.declare_concept(i.message_type.clone())?;
                    tbox.add_subclass(&i.message_type, vocab::MESSAGE_TYPE)?;
                }
            }
        }
        for r in &records {
            let name = record_concept(&r.id);
            tbox.declare_concept(name.clone())?;
            let expr = record_expression(&tbox, r);
            tbox.add_axiom(Axiom::new(ConceptExpression::named(name), expr))?;
        }
        Ok(SemanticIndex {
            reasoner: Reasoner::new(tbox)?,
            concepts: records.iter().map(|r| record_concept(&r.id)).collect(),
        })
    }

    /// Ids of records subsumed by `query`, sorted, plus reasoner warnings.
    pub fn query(&self, query: &ConceptExpression) -> Result<(Vec<String>, Vec<String>), RegistryError> {
        let QueryAnswer { matches, warnings } = self.reasoner.answer_query(query, &self.concepts)?;
        let ids = matches
            .into_iter()
            .filter_map(|m| m.strip_prefix(RECORD_PREFIX).map(str::to_string))
            .collect();
        Ok((ids, warnings))
    }

    pub fn reasoner(&self) -> &Reasoner {
        &self.reasoner
    }
}
