//! Component records, their validation against the ontologies, the
//! semantic index and the on-disk store.

mod index;
mod instantiate;
mod record;
mod store;
pub(crate) mod validate;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use crate::ontology::{parse_ontology_sources, OntologyError};
use crate::reasoner::{Reasoner, ReasonerError};
use crate::vocab;

pub use index::SemanticIndex;
pub use instantiate::instantiate_from_types;
pub use record::{
    interface_role, is_message_type, is_valid_id, role_interface, AttributeValue, ComponentKind,
    ComponentRecord, DeviceSpec, Direction, HwInterfaceSpec, InterfaceKind, InterfaceSpec, Medium,
    MetaInfo, NonTypeSpecific, Status,
};
pub use store::{SearchFilters, SearchResult, Snapshot, Store, INDEX_FILE, INDEX_FORMAT_VERSION};
pub use validate::{demanded_interfaces, record_expression, validate_record, Demand, Violation};

#[derive(Debug, thiserror::Error)]
pub enum RegistryError {
    #[error("record `{id}` failed validation: {}", violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(", "))]
    ValidationFailed { id: String, violations: Vec<Violation> },
    #[error("a component with id `{0}` already exists")]
    DuplicateId(String),
    #[error("no component with id `{0}`")]
    NotFound(String),
    #[error("illegal status transition {from} -> {to}")]
    IllegalTransition { from: Status, to: Status },
    #[error("at least one software type is required")]
    EmptyTypeList,
    #[error("undeclared identifier `{0}`")]
    UndeclaredIdentifier(String),
    #[error(transparent)]
    Reasoner(ReasonerError),
    #[error(transparent)]
    Ontology(#[from] OntologyError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Corrupt { path: PathBuf, message: String },
}

impl From<ReasonerError> for RegistryError {
    fn from(e: ReasonerError) -> Self {
        match e {
            ReasonerError::UndeclaredIdentifier { name } => RegistryError::UndeclaredIdentifier(name),
            ReasonerError::Ontology(OntologyError::UndeclaredIdentifier { name, .. }) => {
                RegistryError::UndeclaredIdentifier(name)
            }
            other => RegistryError::Reasoner(other),
        }
    }
}

pub(crate) fn io_error(path: &Path, source: std::io::Error) -> RegistryError {
    RegistryError::Io {
        path: path.to_path_buf(),
        source,
    }
}

const UPPER_AXIOMS: [(&str, &str); 4] = [
    (vocab::SW_COMPONENT, vocab::APP),
    (vocab::HA_COMPONENT, vocab::APP),
    (vocab::SKILL, vocab::APP),
    (vocab::COORDINATOR, vocab::SOFTWARE_TYPE),
];

// Names a source declares itself; lines are `<keyword> <name> ...`.
fn declared_names<'a>(text: &'a str) -> impl Iterator<Item = &'a str> + 'a {
    text.lines().filter_map(|line| {
        let line = line.split('#').next().unwrap_or("");
        let mut words = line.split_whitespace();
        match words.next()? {
            "concept" | "capability" | "role" | "attribute" => {
                words.next().map(|w| w.trim_end_matches(':'))
            }
            _ => None,
        }
    })
}

/// The upper vocabulary every ontology builds on, minus what `sources`
/// already declare.
fn upper_prelude(sources: &[(String, String)]) -> String {
    let declared: BTreeSet<&str> = sources.iter().flat_map(|(_, t)| declared_names(t)).collect();
    let mut out = String::new();
    for c in vocab::UPPER_CONCEPTS {
        if !declared.contains(c) {
            out.push_str(&format!("concept {c}\n"));
        }
    }
    for r in vocab::UPPER_ROLES {
        if !declared.contains(r) {
            out.push_str(&format!("role {r}\n"));
        }
    }
    for (sub, sup) in UPPER_AXIOMS {
        out.push_str(&format!("axiom {sub} SubClassOf {sup}\n"));
    }
    out
}

/// Parses and classifies ontology sources `(name, text)` over the upper
/// vocabulary (component kinds, type roots and interface roles).
pub fn load_ontology(sources: &[(String, String)]) -> Result<Reasoner, RegistryError> {
    let mut all = vec![("<upper>".to_string(), upper_prelude(sources))];
    all.extend(sources.iter().cloned());
    let tbox = parse_ontology_sources(&all)?;
    Ok(Reasoner::new(tbox)?)
}

/// [`load_ontology`] over files, each named by its path.
pub fn load_ontology_files<P: AsRef<Path>>(paths: &[P]) -> Result<Reasoner, RegistryError> {
    let mut sources = Vec::new();
    for p in paths {
        let p = p.as_ref();
        let text = std::fs::read_to_string(p).map_err(|e| io_error(p, e))?;
        sources.push((p.display().to_string(), text));
    }
    load_ontology(&sources)
}
