use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use serde::Serialize;

use crate::decimal::Decimal;
use crate::matcher::{check_compatibility, RequirementConstraint};
use crate::reasoner::Reasoner;
use crate::registry::{ComponentKind, ComponentRecord, Direction, InterfaceKind};
use crate::vocab;

use super::{
    check_pair, resolve_endpoint, single_provider, EndpointRef, RecordSource, SkillError,
    SkillGraph,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "code", rename_all = "camelCase")]
pub enum SkillIssue {
    UnknownInstance { instance: String },
    UnknownEndpoint { instance: String, endpoint: String },
    TypeMismatch {
        from: EndpointRef,
        to: EndpointRef,
        expected: String,
        found: String,
    },
    KindMismatch {
        from: EndpointRef,
        to: EndpointRef,
    },
    DirectionMismatch {
        from: EndpointRef,
        to: EndpointRef,
    },
    DuplicateConnection {
        from: EndpointRef,
        to: EndpointRef,
    },
    MultiplicityViolation { endpoint: EndpointRef },
    #[serde(rename_all = "camelCase")]
    UnboundRequires {
        endpoint: EndpointRef,
        kind: InterfaceKind,
        message_type: String,
    },
    RequirementViolation {
        requirer: String,
        provider: String,
        constraint: RequirementConstraint,
        observed: Option<Decimal>,
        #[serde(skip_serializing_if = "Option::is_none")]
        note: Option<String>,
    },
    NestingCycle { path: Vec<String> },
    InvalidCoordinator { instance: String },
    InvalidExport { name: String, reason: String },
    UnconnectedProvides { endpoint: EndpointRef },
    MissingCoordinator,
}

impl SkillIssue {
    /// Everything but requirement verdicts: wiring, typing and structure.
    pub fn is_connection_error(&self) -> bool {
        !matches!(self, SkillIssue::RequirementViolation { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValidationReport {
    pub errors: Vec<SkillIssue>,
    pub warnings: Vec<SkillIssue>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.errors.is_empty()
    }
}

struct Flat {
    graph: SkillGraph,
    issues: Vec<SkillIssue>,
}

struct Nested {
    record: String,
    exports: BTreeMap<String, EndpointRef>,
}

fn flatten_level(
    graph: &SkillGraph,
    prefix: &str,
    source: &dyn RecordSource,
    stack: &mut Vec<String>,
    out: &mut Flat,
) -> Result<BTreeMap<String, EndpointRef>, SkillError> {
    let mut nested: HashMap<&str, Nested> = HashMap::new();
    for (name, rid) in &graph.instances {
        let rec = source
            .record(rid)
            .ok_or_else(|| SkillError::UnresolvedReference {
                instance: format!("{prefix}{name}"),
                record: rid.clone(),
            })?;
        match (&rec.kind, &rec.skill_body) {
            (ComponentKind::Skill, Some(body)) => {
                if stack.contains(rid) {
                    let mut path = stack.clone();
                    path.push(rid.clone());
                    return Err(SkillError::CycleDetected { path });
                }
                stack.push(rid.clone());
                let exports = flatten_level(body, &format!("{prefix}{name}/"), source, stack, out)?;
                stack.pop();
                nested.insert(
                    name,
                    Nested {
                        record: rid.clone(),
                        exports,
                    },
                );
            }
            _ => {
                out.graph.instances.insert(format!("{prefix}{name}"), rid.clone());
            }
        }
    }

    let mut issues = Vec::new();
    let mut map = |r: &EndpointRef| -> EndpointRef {
        if let Some(n) = nested.get(r.instance.as_str()) {
            if let Some(inner) = n.exports.get(&r.endpoint) {
                return inner.clone();
            }
            issues.push(SkillIssue::InvalidExport {
                name: r.endpoint.clone(),
                reason: format!("skill `{}` does not export it", n.record),
            });
        }
        EndpointRef {
            instance: format!("{prefix}{}", r.instance),
            ..r.clone()
        }
    };
    for c in &graph.connections {
        let (from, to) = (map(&c.from), map(&c.to));
        out.graph.connections.push(super::Connection { from, to });
    }
    let exports: BTreeMap<String, EndpointRef> =
        graph.exports.iter().map(|(k, r)| (k.clone(), map(r))).collect();
    out.issues.append(&mut issues);

    for (inst, values) in &graph.parameters {
        for (key, value) in values {
            let (target, key) = match (nested.contains_key(inst.as_str()), key.rsplit_once('/')) {
                (true, Some((path, k))) => (format!("{prefix}{inst}/{path}"), k),
                _ => (format!("{prefix}{inst}"), key.as_str()),
            };
            out.graph
                .parameters
                .entry(target)
                .or_default()
                .insert(key.to_string(), value.clone());
        }
    }
    Ok(exports)
}

fn flatten_with(
    skill: &SkillGraph,
    source: &dyn RecordSource,
    mut stack: Vec<String>,
) -> Result<Flat, SkillError> {
    let mut flat = Flat {
        graph: SkillGraph::new(),
        issues: Vec::new(),
    };
    flat.graph.exports = flatten_level(skill, "", source, &mut stack, &mut flat)?;
    flat.graph.coordinator = skill.coordinator.clone();
    Ok(flat)
}

/// Inlines nested skills: inner instances become `outer/inner`, and
/// connections to a nested skill's interfaces are rebound to the inner
/// endpoints it exports.
pub fn flatten(skill: &SkillGraph, source: &dyn RecordSource) -> Result<SkillGraph, SkillError> {
    flatten_with(skill, source, Vec::new()).map(|f| f.graph)
}

/// [`flatten`] for the body of a stored Skill record.
pub fn flatten_record(
    record: &ComponentRecord,
    source: &dyn RecordSource,
) -> Result<SkillGraph, SkillError> {
    let body = record.skill_body.clone().unwrap_or_default();
    flatten_with(&body, source, vec![record.id.clone()]).map(|f| f.graph)
}

/// Checks wiring, typing, multiplicity, requirements between directly
/// connected instances, nesting and the coordinator.
pub fn validate_skill(
    ontology: &Reasoner,
    source: &dyn RecordSource,
    skill: &SkillGraph,
) -> Result<ValidationReport, SkillError> {
    validate_with(ontology, source, skill, Vec::new())
}

/// [`validate_skill`] for the body of a stored Skill record.
pub fn validate_skill_record(
    ontology: &Reasoner,
    source: &dyn RecordSource,
    record: &ComponentRecord,
) -> Result<ValidationReport, SkillError> {
    let body = record.skill_body.clone().unwrap_or_default();
    validate_with(ontology, source, &body, vec![record.id.clone()])
}

fn validate_with(
    ontology: &Reasoner,
    source: &dyn RecordSource,
    skill: &SkillGraph,
    stack: Vec<String>,
) -> Result<ValidationReport, SkillError> {
    let flat = match flatten_with(skill, source, stack) {
        Ok(f) => f,
        Err(SkillError::CycleDetected { path }) => {
            return Ok(ValidationReport {
                errors: vec![SkillIssue::NestingCycle { path }],
                warnings: Vec::new(),
            })
        }
        Err(e) => return Err(e),
    };
    let mut report = validate_flat(ontology, source, &flat.graph)?;
    let mut errors = flat.issues;
    errors.append(&mut report.errors);
    report.errors = errors;

    let leaves = skill
        .instances
        .values()
        .filter(|rid| {
            source
                .record(rid)
                .is_some_and(|r| r.kind != ComponentKind::Skill)
        })
        .count();
    if skill.coordinator.is_none() && leaves > 1 {
        report.warnings.push(SkillIssue::MissingCoordinator);
    }
    Ok(report)
}

fn is_coordinator(ontology: &Reasoner, record: &ComponentRecord) -> bool {
    record.sw_types.iter().any(|t| {
        ontology
            .graph()
            .is_named_subsumed_by(t, vocab::COORDINATOR)
            .unwrap_or(false)
    })
}

type Port = (String, InterfaceKind, Direction, String);

fn validate_flat(
    ontology: &Reasoner,
    source: &dyn RecordSource,
    skill: &SkillGraph,
) -> Result<ValidationReport, SkillError> {
    let mut records: BTreeMap<&str, Arc<ComponentRecord>> = BTreeMap::new();
    for (inst, rid) in &skill.instances {
        let rec = source
            .record(rid)
            .ok_or_else(|| SkillError::UnresolvedReference {
                instance: inst.clone(),
                record: rid.clone(),
            })?;
        records.insert(inst, rec);
    }
    let mut report = ValidationReport::default();
    let errors = &mut report.errors;

    if let Some(c) = &skill.coordinator {
        if !records.get(c.as_str()).is_some_and(|r| is_coordinator(ontology, r)) {
            errors.push(SkillIssue::InvalidCoordinator { instance: c.clone() });
        }
    }

    let port = |r: &EndpointRef, i: &crate::registry::InterfaceSpec| -> Port {
        (r.instance.clone(), i.kind, i.direction, i.name.clone())
    };
    let mut bound: HashSet<Port> = HashSet::new();
    let mut seen = HashSet::new();
    let mut providers: BTreeMap<Port, usize> = BTreeMap::new();
    let mut pairs: BTreeSet<(String, String)> = BTreeSet::new();

    for c in &skill.connections {
        let mut resolve = |r: &EndpointRef, dir: Direction| {
            let Some(rec) = records.get(r.instance.as_str()) else {
                errors.push(SkillIssue::UnknownInstance {
                    instance: r.instance.clone(),
                });
                return None;
            };
            let found = resolve_endpoint(rec, r, dir).cloned();
            if found.is_none() {
                errors.push(SkillIssue::UnknownEndpoint {
                    instance: r.instance.clone(),
                    endpoint: r.endpoint.clone(),
                });
            }
            found
        };
        let (Some(f), Some(t)) = (
            resolve(&c.from, Direction::Provides),
            resolve(&c.to, Direction::Requires),
        ) else {
            continue;
        };
        let (from, to) = (c.from.clone(), c.to.clone());
        match check_pair(&f, &t) {
            Ok(()) => {}
            Err(SkillError::TypeMismatch { expected, found }) => {
                errors.push(SkillIssue::TypeMismatch {
                    from,
                    to,
                    expected,
                    found,
                });
                continue;
            }
            Err(SkillError::KindMismatch { .. }) => {
                errors.push(SkillIssue::KindMismatch { from, to });
                continue;
            }
            Err(_) => {
                errors.push(SkillIssue::DirectionMismatch { from, to });
                continue;
            }
        }
        let (fp, tp) = (port(&c.from, &f), port(&c.to, &t));
        if !seen.insert((fp.clone(), tp.clone())) {
            errors.push(SkillIssue::DuplicateConnection { from, to });
            continue;
        }
        if single_provider(t.kind) {
            *providers.entry(tp.clone()).or_default() += 1;
        }
        bound.insert(fp);
        bound.insert(tp);
        if c.from.instance != c.to.instance {
            let (a, b) = (c.from.instance.clone(), c.to.instance.clone());
            pairs.insert(if a < b { (a, b) } else { (b, a) });
        }
    }
    for ((inst, kind, _, name), n) in providers {
        if n > 1 {
            errors.push(SkillIssue::MultiplicityViolation {
                endpoint: EndpointRef {
                    instance: inst,
                    endpoint: name,
                    kind: Some(kind),
                },
            });
        }
    }

    for (name, r) in &skill.exports {
        let resolved = records
            .get(r.instance.as_str())
            .and_then(|rec| resolve_endpoint(rec, r, Direction::Requires));
        match resolved {
            Some(i) => {
                bound.insert(port(r, i));
            }
            None => errors.push(SkillIssue::InvalidExport {
                name: name.clone(),
                reason: format!("no endpoint {r}"),
            }),
        }
    }

    for (inst, rec) in &records {
        for i in rec.interfaces() {
            let endpoint = EndpointRef {
                instance: inst.to_string(),
                endpoint: i.name.clone(),
                kind: Some(i.kind),
            };
            if bound.contains(&port(&endpoint, i)) {
                continue;
            }
            match i.direction {
                Direction::Requires => errors.push(SkillIssue::UnboundRequires {
                    endpoint,
                    kind: i.kind,
                    message_type: i.message_type.clone(),
                }),
                Direction::Provides => report
                    .warnings
                    .push(SkillIssue::UnconnectedProvides { endpoint }),
            }
        }
    }

    for (a, b) in pairs {
        for (req, prov) in [(&a, &b), (&b, &a)] {
            let compat = check_compatibility(ontology, &records[req.as_str()], &records[prov.as_str()]);
            for check in compat.failures() {
                report.errors.push(SkillIssue::RequirementViolation {
                    requirer: req.clone(),
                    provider: prov.clone(),
                    constraint: check.constraint.clone(),
                    observed: check.observed,
                    note: check.note.clone(),
                });
            }
        }
    }
    Ok(report)
}
