//! Request/response payloads and the operations behind them. The HTTP
//! server and the command line both go through here, so identical
//! requests give identical JSON.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::codegen::{generate_manifest, generate_skeleton, SkeletonDescriptor};
use crate::matcher::{check_compatibility, CompatibilityReport};
use crate::ontology::{taxonomy_tree, OntologyError, TaxonomyNode};
use crate::reasoner::{Reasoner, ReasonerError};
use crate::registry::{
    instantiate_from_types, validate_record, ComponentKind, ComponentRecord, RegistryError,
    SearchFilters, Snapshot, Status, Store, Violation,
};
use crate::skill::{
    flatten_record, parameterize, validate_skill as validate_graph, SkillError, SkillGraph,
    SolutionDescriptor, SolutionError, ValidationReport,
};
use crate::vocab;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ErrorCode {
    BadRequest,
    ParseError,
    UndeclaredIdentifier,
    ValidationFailed,
    UnresolvedReference,
    SkillInvalid,
    UnboundParameter,
    UnknownParameterTarget,
    NotFound,
    DuplicateId,
    IllegalTransition,
    Internal,
}

impl ErrorCode {
    pub fn http_status(self) -> u16 {
        match self {
            ErrorCode::NotFound => 404,
            ErrorCode::DuplicateId | ErrorCode::IllegalTransition => 409,
            ErrorCode::Internal => 500,
            _ => 400,
        }
    }

    /// 1 for rejected content, 2 for malformed input or unknown names,
    /// 3 for failures of the tool itself.
    pub fn exit_code(self) -> u8 {
        match self {
            ErrorCode::ValidationFailed
            | ErrorCode::SkillInvalid
            | ErrorCode::UnboundParameter
            | ErrorCode::UnknownParameterTarget
            | ErrorCode::DuplicateId
            | ErrorCode::IllegalTransition => 1,
            ErrorCode::Internal => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: ErrorCode,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

impl ApiError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        ApiError {
            code,
            message: message.into(),
            details: None,
        }
    }

    pub fn with_details(mut self, details: impl Serialize) -> Self {
        self.details = serde_json::to_value(details).ok();
        self
    }

    pub fn not_found(what: &str, id: &str) -> Self {
        ApiError::new(ErrorCode::NotFound, format!("no {what} with id `{id}`"))
    }
}

impl fmt::Display for ApiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for ApiError {}

impl From<OntologyError> for ApiError {
    fn from(e: OntologyError) -> Self {
        let code = match e.root() {
            OntologyError::UndeclaredIdentifier { .. } => ErrorCode::UndeclaredIdentifier,
            _ => ErrorCode::ParseError,
        };
        ApiError::new(code, e.to_string())
    }
}

impl From<ReasonerError> for ApiError {
    fn from(e: ReasonerError) -> Self {
        match e {
            ReasonerError::Ontology(e) => e.into(),
            ReasonerError::UndeclaredIdentifier { .. } => {
                ApiError::new(ErrorCode::UndeclaredIdentifier, e.to_string())
            }
            ReasonerError::InternalLimitExceeded { .. } => {
                ApiError::new(ErrorCode::Internal, e.to_string())
            }
        }
    }
}

impl From<RegistryError> for ApiError {
    fn from(e: RegistryError) -> Self {
        let message = e.to_string();
        match e {
            RegistryError::ValidationFailed { violations, .. } => {
                ApiError::new(ErrorCode::ValidationFailed, message).with_details(violations)
            }
            RegistryError::DuplicateId(_) => ApiError::new(ErrorCode::DuplicateId, message),
            RegistryError::NotFound(_) => ApiError::new(ErrorCode::NotFound, message),
            RegistryError::IllegalTransition { .. } => {
                ApiError::new(ErrorCode::IllegalTransition, message)
            }
            RegistryError::EmptyTypeList => ApiError::new(ErrorCode::BadRequest, message),
            RegistryError::UndeclaredIdentifier(_) => {
                ApiError::new(ErrorCode::UndeclaredIdentifier, message)
            }
            RegistryError::Reasoner(e) => e.into(),
            RegistryError::Ontology(e) => e.into(),
            RegistryError::Io { .. } | RegistryError::Corrupt { .. } => {
                ApiError::new(ErrorCode::Internal, message)
            }
        }
    }
}

impl From<SkillError> for ApiError {
    fn from(e: SkillError) -> Self {
        let code = match e {
            SkillError::UnresolvedReference { .. } => ErrorCode::UnresolvedReference,
            SkillError::UnknownInstance { .. } | SkillError::UnknownEndpoint { .. } => {
                ErrorCode::NotFound
            }
            _ => ErrorCode::SkillInvalid,
        };
        ApiError::new(code, e.to_string())
    }
}

impl From<SolutionError> for ApiError {
    fn from(e: SolutionError) -> Self {
        let message = e.to_string();
        match e {
            SolutionError::ValidationErrorsPresent { errors } => {
                ApiError::new(ErrorCode::SkillInvalid, message).with_details(errors)
            }
            SolutionError::UnboundParameter { missing } => {
                ApiError::new(ErrorCode::UnboundParameter, message).with_details(missing)
            }
            SolutionError::UnknownParameterTarget { targets } => {
                ApiError::new(ErrorCode::UnknownParameterTarget, message).with_details(targets)
            }
            SolutionError::Skill(e) => e.into(),
        }
    }
}

pub type ApiResult<T> = Result<T, ApiError>;

/// A page of components in registry ranking order.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ComponentPage {
    /// Matches before paging.
    pub total: usize,
    pub offset: usize,
    pub components: Vec<Arc<ComponentRecord>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct QueryRequest {
    /// Concept expression in the ontology language; absent lists everything.
    pub expression: Option<String>,
    pub filters: SearchFilters,
    pub offset: usize,
    pub limit: Option<usize>,
}

pub fn query(snapshot: &Snapshot, request: &QueryRequest) -> ApiResult<ComponentPage> {
    let expr = match request.expression.as_deref().map(str::trim) {
        Some(text) if !text.is_empty() => Some(snapshot.ontology().parse(text)?),
        _ => None,
    };
    let found = snapshot.search(expr.as_ref(), &request.filters)?;
    let total = found.records.len();
    let components = found
        .records
        .into_iter()
        .skip(request.offset)
        .take(request.limit.unwrap_or(usize::MAX))
        .collect();
    Ok(ComponentPage {
        total,
        offset: request.offset,
        components,
        warnings: found.warnings,
    })
}

pub fn get_component(snapshot: &Snapshot, id: &str) -> ApiResult<Arc<ComponentRecord>> {
    snapshot
        .get(id)
        .cloned()
        .ok_or_else(|| ApiError::not_found("component", id))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Created {
    pub id: String,
}

pub fn add_component(store: &Store, record: ComponentRecord) -> ApiResult<Created> {
    Ok(Created {
        id: store.add_component(record)?,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecordValidation {
    pub id: String,
    pub valid: bool,
    pub violations: Vec<Violation>,
}

pub fn validate_component(ontology: &Reasoner, record: &ComponentRecord) -> RecordValidation {
    let violations = validate_record(ontology, record);
    RecordValidation {
        id: record.id.clone(),
        valid: violations.is_empty(),
        violations,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusRequest {
    pub status: Status,
}

pub fn set_status(store: &Store, id: &str, request: StatusRequest) -> ApiResult<Arc<ComponentRecord>> {
    Ok(store.set_status(id, request.status)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DraftRequest {
    pub types: Vec<String>,
}

pub fn draft(ontology: &Reasoner, request: &DraftRequest) -> ApiResult<ComponentRecord> {
    Ok(instantiate_from_types(ontology, &request.types)?)
}

/// `hardware`, `software` or `capability`.
pub fn taxonomy(ontology: &Reasoner, branch: &str) -> ApiResult<TaxonomyNode> {
    let root = match branch {
        "hardware" => vocab::HARDWARE_TYPE,
        "software" => vocab::SOFTWARE_TYPE,
        "capability" => vocab::CAPABILITY,
        other => return Err(ApiError::not_found("taxonomy", other)),
    };
    Ok(taxonomy_tree(ontology.tbox(), root)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompatibilityRequest {
    /// The component whose requirements are checked.
    pub requirer: String,
    pub provider: String,
}

pub fn compatibility(snapshot: &Snapshot, request: &CompatibilityRequest) -> ApiResult<CompatibilityReport> {
    let requirer = get_component(snapshot, &request.requirer)?;
    let provider = get_component(snapshot, &request.provider)?;
    Ok(check_compatibility(snapshot.ontology(), &requirer, &provider))
}

pub fn validate_skill(snapshot: &Snapshot, skill: &SkillGraph) -> ApiResult<ValidationReport> {
    Ok(validate_graph(snapshot.ontology(), snapshot, skill)?)
}

fn skill_record(snapshot: &Snapshot, id: &str) -> ApiResult<Arc<ComponentRecord>> {
    let record = get_component(snapshot, id)?;
    if record.kind != ComponentKind::Skill {
        return Err(ApiError::new(ErrorCode::BadRequest, format!("`{id}` is not a skill")));
    }
    Ok(record)
}

pub fn flatten_skill(snapshot: &Snapshot, id: &str) -> ApiResult<SkillGraph> {
    let record = skill_record(snapshot, id)?;
    Ok(flatten_record(&record, snapshot)?)
}

/// Either an inline skill graph or the id of a stored Skill record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolutionRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skill: Option<SkillGraph>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default)]
    pub parameters: BTreeMap<String, BTreeMap<String, Value>>,
}

pub fn solution(snapshot: &Snapshot, request: &SolutionRequest) -> ApiResult<SolutionDescriptor> {
    let skill = match (&request.skill, &request.id) {
        (Some(s), None) => s.clone(),
        (None, Some(id)) => skill_record(snapshot, id)?.skill_body.clone().unwrap_or_default(),
        _ => {
            return Err(ApiError::new(
                ErrorCode::BadRequest,
                "give exactly one of `skill` and `id`",
            ))
        }
    };
    Ok(parameterize(snapshot.ontology(), snapshot, &skill, &request.parameters)?)
}

pub fn skeleton(snapshot: &Snapshot, id: &str) -> ApiResult<SkeletonDescriptor> {
    Ok(generate_skeleton(&*get_component(snapshot, id)?))
}

pub fn manifest(snapshot: &Snapshot, id: &str) -> ApiResult<String> {
    Ok(generate_manifest(&*get_component(snapshot, id)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OntologySummary {
    pub concepts: usize,
    pub capabilities: usize,
    pub roles: usize,
    pub attributes: usize,
    pub axioms: usize,
    /// Declared concepts that can have no instances.
    pub unsatisfiable: Vec<String>,
}

pub fn ontology_summary(ontology: &Reasoner) -> OntologySummary {
    let tbox = ontology.tbox();
    OntologySummary {
        concepts: tbox.concepts().len(),
        capabilities: tbox.capabilities().len(),
        roles: tbox.roles().len(),
        attributes: tbox.attributes().len(),
        axioms: tbox.axioms().len(),
        unsatisfiable: ontology.graph().unsatisfiable().into_iter().collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Subsumption {
    pub sub: String,
    pub sup: String,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Existential {
    pub sub: String,
    pub role: String,
    pub filler: String,
}

/// Every derived `A ⊑ B` (A ≠ B) and `A ⊑ ∃r.B` between declared names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Classification {
    pub subsumptions: Vec<Subsumption>,
    pub existentials: Vec<Existential>,
    pub unsatisfiable: Vec<String>,
}

impl Classification {
    /// One fact per line, `⊑`/`∃` notation.
    pub fn lines(&self) -> Vec<String> {
        self.subsumptions
            .iter()
            .map(|s| format!("{} ⊑ {}", s.sub, s.sup))
            .chain(
                self.existentials
                    .iter()
                    .map(|e| format!("{} ⊑ ∃{}.{}", e.sub, e.role, e.filler)),
            )
            .chain(self.unsatisfiable.iter().map(|c| format!("{c} ⊑ ⊥")))
            .collect()
    }
}

pub fn classification(ontology: &Reasoner) -> Classification {
    let graph = ontology.graph();
    let subsumptions = graph
        .to_map()
        .into_iter()
        .flat_map(|(sub, sups)| {
            sups.into_iter()
                .filter(|s| *s != sub)
                .map(|sup| Subsumption { sub: sub.clone(), sup })
                .collect::<Vec<_>>()
        })
        .collect();
    let existentials = graph
        .derived_existentials()
        .into_iter()
        .map(|(sub, role, filler)| Existential { sub, role, filler })
        .collect();
    Classification {
        subsumptions,
        existentials,
        unsatisfiable: graph.unsatisfiable().into_iter().collect(),
    }
}
