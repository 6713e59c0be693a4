use super::tbox::ValueKind;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OntologyError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("undeclared identifier `{name}`{}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    UndeclaredIdentifier { name: String, line: Option<usize> },
    #[error("duplicate declaration of `{name}`")]
    DuplicateDeclaration { name: String },
    #[error("value {value} of attribute `{attribute}` is not of kind {expected}")]
    ValueKindMismatch {
        attribute: String,
        value: String,
        expected: ValueKind,
    },
    #[error("cycle in the named concept hierarchy: {}", concepts.join(" -> "))]
    CycleDetected { concepts: Vec<String> },
    #[error("{source_name}: {error}")]
    InSource {
        source_name: String,
        error: Box<OntologyError>,
    },
}

impl OntologyError {
    pub(crate) fn undeclared(name: &str) -> Self {
        OntologyError::UndeclaredIdentifier {
            name: name.to_string(),
            line: None,
        }
    }

    pub(crate) fn at_line(self, line: usize) -> Self {
        match self {
            OntologyError::UndeclaredIdentifier { name, line: None } => {
                OntologyError::UndeclaredIdentifier {
                    name,
                    line: Some(line),
                }
            }
            OntologyError::ValueKindMismatch {
                attribute,
                value,
                expected,
            } => OntologyError::Syntax {
                line,
                column: 1,
                message: format!("value {value} of attribute `{attribute}` is not of kind {expected}"),
            },
            other => other,
        }
    }

    /// Strips any source-file wrapper.
    pub fn root(&self) -> &OntologyError {
        match self {
            OntologyError::InSource { error, .. } => error.root(),
            other => other,
        }
    }
}
