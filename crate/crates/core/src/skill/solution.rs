use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::reasoner::Reasoner;

use super::{flatten, validate_skill, RecordSource, SkillError, SkillGraph, SkillIssue};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvedVersion {
    pub record: String,
    pub version: String,
}

/// A flattened, fully parameterized skill with the record versions it was
/// validated against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SolutionDescriptor {
    #[serde(flatten)]
    pub skill: SkillGraph,
    pub resolved_versions: BTreeMap<String, ResolvedVersion>,
}

impl SolutionDescriptor {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("solutions always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolutionError {
    #[error("the skill has {} validation error(s)", errors.len())]
    ValidationErrorsPresent { errors: Vec<SkillIssue> },
    #[error("unbound parameter(s): {}", missing.join(", "))]
    UnboundParameter { missing: Vec<String> },
    #[error("parameters for unknown instance(s): {}", targets.join(", "))]
    UnknownParameterTarget { targets: Vec<String> },
    #[error(transparent)]
    Skill(#[from] SkillError),
}

/// Binds `parameters` (instance → key → value, over flattened instance
/// ids) on top of those already in the skill and checks every parameter
/// key declared by an instance's record is bound.
pub fn parameterize(
    ontology: &Reasoner,
    source: &dyn RecordSource,
    skill: &SkillGraph,
    parameters: &BTreeMap<String, BTreeMap<String, serde_json::Value>>,
) -> Result<SolutionDescriptor, SolutionError> {
    let report = validate_skill(ontology, source, skill)?;
    if !report.errors.is_empty() {
        return Err(SolutionError::ValidationErrorsPresent {
            errors: report.errors,
        });
    }
    let mut flat = flatten(skill, source)?;
    for (inst, values) in parameters {
        let slot = flat.parameters.entry(inst.clone()).or_default();
        slot.extend(values.iter().map(|(k, v)| (k.clone(), v.clone())));
    }
    let targets: Vec<String> = flat
        .parameters
        .keys()
        .filter(|k| !flat.instances.contains_key(*k))
        .cloned()
        .collect();
    if !targets.is_empty() {
        return Err(SolutionError::UnknownParameterTarget { targets });
    }

    let mut missing = Vec::new();
    let mut resolved_versions = BTreeMap::new();
    for (inst, rid) in &flat.instances {
        let record = source.record(rid).ok_or_else(|| SkillError::UnresolvedReference {
            instance: inst.clone(),
            record: rid.clone(),
        })?;
        let bound = flat.parameters.get(inst);
        for key in &record.parameters {
            if !bound.is_some_and(|b| b.contains_key(key)) {
                missing.push(format!("{inst}.{key}"));
            }
        }
        resolved_versions.insert(
            inst.clone(),
            ResolvedVersion {
                record: rid.clone(),
                version: record
                    .meta
                    .version
                    .as_ref()
                    .map(|v| v.to_string())
                    .unwrap_or_default(),
            },
        );
    }
    if !missing.is_empty() {
        return Err(SolutionError::UnboundParameter { missing });
    }
    Ok(SolutionDescriptor {
        skill: flat,
        resolved_versions,
    })
}
