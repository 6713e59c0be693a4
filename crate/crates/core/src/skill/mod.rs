//! Skills: App instances wired by their interfaces, possibly nested.

mod compose;
mod interchange;
mod solution;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::registry::{ComponentRecord, Direction, InterfaceKind, InterfaceSpec};

pub use compose::{
    flatten, flatten_record, validate_skill, validate_skill_record, SkillIssue, ValidationReport,
};
pub use interchange::{
    check_interchangeable, replace_instance, InterchangeReason, InterchangeWarning,
    Interchangeability,
};
pub use solution::{parameterize, ResolvedVersion, SolutionDescriptor, SolutionError};

/// Looks records up by id; the registry store and plain maps implement it.
pub trait RecordSource {
    fn record(&self, id: &str) -> Option<Arc<ComponentRecord>>;
}

impl RecordSource for BTreeMap<String, Arc<ComponentRecord>> {
    fn record(&self, id: &str) -> Option<Arc<ComponentRecord>> {
        self.get(id).cloned()
    }
}

impl RecordSource for HashMap<String, Arc<ComponentRecord>> {
    fn record(&self, id: &str) -> Option<Arc<ComponentRecord>> {
        self.get(id).cloned()
    }
}

impl RecordSource for [ComponentRecord] {
    fn record(&self, id: &str) -> Option<Arc<ComponentRecord>> {
        self.iter().find(|r| r.id == id).cloned().map(Arc::new)
    }
}

impl RecordSource for Vec<ComponentRecord> {
    fn record(&self, id: &str) -> Option<Arc<ComponentRecord>> {
        self.as_slice().record(id)
    }
}

/// An interface of one instance, by endpoint name. `kind` disambiguates
/// when a record reuses a name across kinds.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EndpointRef {
    pub instance: String,
    pub endpoint: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<InterfaceKind>,
}

impl EndpointRef {
    pub fn new(instance: impl Into<String>, endpoint: impl Into<String>) -> Self {
        EndpointRef {
            instance: instance.into(),
            endpoint: endpoint.into(),
            kind: None,
        }
    }
}

impl fmt::Display for EndpointRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.instance, self.endpoint)
    }
}

/// From a Provides endpoint to a Requires endpoint.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Connection {
    pub from: EndpointRef,
    pub to: EndpointRef,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SkillGraph {
    /// Instance id → component record id.
    pub instances: BTreeMap<String, String>,
    pub connections: Vec<Connection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coordinator: Option<String>,
    /// Instance id → parameter key → value.
    pub parameters: BTreeMap<String, BTreeMap<String, serde_json::Value>>,
    /// Interface name of the enclosing Skill record → inner endpoint.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub exports: BTreeMap<String, EndpointRef>,
}

impl SkillGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_instance(mut self, instance: impl Into<String>, record: impl Into<String>) -> Self {
        self.instances.insert(instance.into(), record.into());
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("skills always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SkillError {
    #[error("instance `{instance}` refers to unknown record `{record}`")]
    UnresolvedReference { instance: String, record: String },
    #[error("skills nest cyclically: {}", path.join(" -> "))]
    CycleDetected { path: Vec<String> },
    #[error("unknown instance `{instance}`")]
    UnknownInstance { instance: String },
    #[error("instance `{instance}` has no endpoint `{endpoint}`")]
    UnknownEndpoint { instance: String, endpoint: String },
    #[error("message type mismatch: expected `{expected}`, found `{found}`")]
    TypeMismatch { expected: String, found: String },
    #[error("interface kind mismatch: {from} vs {to}")]
    KindMismatch { from: InterfaceKind, to: InterfaceKind },
    #[error("connections run from Provides to Requires, got {from} -> {to}")]
    DirectionMismatch { from: Direction, to: Direction },
    #[error("{endpoint} already has a provider")]
    MultiplicityViolation { endpoint: EndpointRef },
    #[error("connection {from} -> {to} already exists")]
    DuplicateConnection { from: EndpointRef, to: EndpointRef },
}

/// Finds the interface `r` names on `record`, preferring `direction`.
pub(crate) fn resolve_endpoint<'a>(
    record: &'a ComponentRecord,
    r: &EndpointRef,
    direction: Direction,
) -> Option<&'a InterfaceSpec> {
    let mut candidates = record
        .interfaces()
        .iter()
        .filter(|i| i.name == r.endpoint && r.kind.is_none_or(|k| k == i.kind));
    let first = candidates.clone().next()?;
    Some(candidates.find(|i| i.direction == direction).unwrap_or(first))
}

/// Kind, direction and message-type compatibility of a resolved pair.
pub(crate) fn check_pair(from: &InterfaceSpec, to: &InterfaceSpec) -> Result<(), SkillError> {
    if from.direction != Direction::Provides || to.direction != Direction::Requires {
        return Err(SkillError::DirectionMismatch {
            from: from.direction,
            to: to.direction,
        });
    }
    if from.kind != to.kind {
        return Err(SkillError::KindMismatch {
            from: from.kind,
            to: to.kind,
        });
    }
    if from.message_type != to.message_type {
        return Err(SkillError::TypeMismatch {
            expected: to.message_type.clone(),
            found: from.message_type.clone(),
        });
    }
    Ok(())
}

/// Services and actions bind one provider per requiring endpoint.
pub(crate) fn single_provider(kind: InterfaceKind) -> bool {
    kind != InterfaceKind::Topic
}

fn instance_record(
    skill: &SkillGraph,
    source: &dyn RecordSource,
    instance: &str,
) -> Result<Arc<ComponentRecord>, SkillError> {
    let id = skill
        .instances
        .get(instance)
        .ok_or_else(|| SkillError::UnknownInstance {
            instance: instance.to_string(),
        })?;
    source
        .record(id)
        .ok_or_else(|| SkillError::UnresolvedReference {
            instance: instance.to_string(),
            record: id.clone(),
        })
}

/// Adds `from → to` if the endpoints exist and fit together.
pub fn connect(
    skill: &mut SkillGraph,
    source: &dyn RecordSource,
    from: EndpointRef,
    to: EndpointRef,
) -> Result<(), SkillError> {
    let unknown = |r: &EndpointRef| SkillError::UnknownEndpoint {
        instance: r.instance.clone(),
        endpoint: r.endpoint.clone(),
    };
    let from_rec = instance_record(skill, source, &from.instance)?;
    let to_rec = instance_record(skill, source, &to.instance)?;
    let f = resolve_endpoint(&from_rec, &from, Direction::Provides).ok_or_else(|| unknown(&from))?;
    let t = resolve_endpoint(&to_rec, &to, Direction::Requires).ok_or_else(|| unknown(&to))?;
    check_pair(f, t)?;
    let same_target = |c: &Connection| c.to.instance == to.instance && c.to.endpoint == to.endpoint;
    if skill
        .connections
        .iter()
        .any(|c| same_target(c) && c.from.instance == from.instance && c.from.endpoint == from.endpoint)
    {
        return Err(SkillError::DuplicateConnection { from, to });
    }
    if single_provider(t.kind) && skill.connections.iter().any(same_target) {
        return Err(SkillError::MultiplicityViolation { endpoint: to });
    }
    skill.connections.push(Connection { from, to });
    Ok(())
}
