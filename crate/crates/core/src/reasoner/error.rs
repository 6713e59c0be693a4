use crate::ontology::OntologyError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReasonerError {
    #[error("undeclared identifier `{name}`")]
    UndeclaredIdentifier { name: String },
    #[error("reasoner stopped after {firings} rule firings (limit {limit})")]
    InternalLimitExceeded { firings: u64, limit: u64 },
    #[error(transparent)]
    Ontology(#[from] OntologyError),
}

impl ReasonerError {
    pub(crate) fn undeclared(name: &str) -> Self {
        ReasonerError::UndeclaredIdentifier {
            name: name.to_string(),
        }
    }
}
