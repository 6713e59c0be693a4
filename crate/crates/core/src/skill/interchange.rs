use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::ontology::{ConceptExpression, ValueKind};
use crate::reasoner::{Interval, IntervalConstraint, Reasoner};
use crate::registry::{ComponentRecord, Direction, InterfaceKind};
use crate::registry::validate::conjunction;

use super::{single_provider, Connection, EndpointRef, SkillGraph};

/// A failed interchangeability clause.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "clause")]
pub enum InterchangeReason {
    /// (a) an incumbent type has no equal-or-more-specific replacement type.
    #[serde(rename = "a", rename_all = "camelCase")]
    FunctionalityNotPreserved { sw_type: String },
    /// (b) an incumbent Provides interface is missing on the replacement.
    #[serde(rename = "b", rename_all = "camelCase")]
    MissingProvides {
        kind: InterfaceKind,
        message_type: String,
    },
    /// (c) the replacement Requires something the incumbent does not.
    #[serde(rename = "c", rename_all = "camelCase")]
    ExtraRequires {
        kind: InterfaceKind,
        message_type: String,
    },
    /// (d) the replacement accepts fewer providers on a shared pair.
    #[serde(rename = "d", rename_all = "camelCase")]
    StrongerRequirement {
        target_type: String,
        attribute: String,
        incumbent: IntervalConstraint,
        replacement: IntervalConstraint,
    },
}

impl InterchangeReason {
    pub fn clause(&self) -> char {
        match self {
            InterchangeReason::FunctionalityNotPreserved { .. } => 'a',
            InterchangeReason::MissingProvides { .. } => 'b',
            InterchangeReason::ExtraRequires { .. } => 'c',
            InterchangeReason::StrongerRequirement { .. } => 'd',
        }
    }
}

/// A requirement pair only the replacement constrains; not compared.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InterchangeWarning {
    pub target_type: String,
    pub attribute: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Interchangeability {
    pub interchangeable: bool,
    pub reasons: Vec<InterchangeReason>,
    pub warnings: Vec<InterchangeWarning>,
}

fn ports(record: &ComponentRecord, direction: Direction) -> BTreeSet<(InterfaceKind, &str)> {
    record
        .interfaces()
        .iter()
        .filter(|i| i.direction == direction)
        .map(|i| (i.kind, i.message_type.as_str()))
        .collect()
}

fn requirement_intervals(
    ontology: &Reasoner,
    record: &ComponentRecord,
) -> BTreeMap<(String, String), Interval> {
    let mut out: BTreeMap<(String, String), Interval> = BTreeMap::new();
    for r in &record.requirements {
        let kind = ontology
            .tbox()
            .attribute_kind(&r.attribute)
            .unwrap_or(ValueKind::Decimal);
        let iv = Interval::from_restriction(r.op, r.value, kind);
        out.entry((r.target_type.clone(), r.attribute.clone()))
            .and_modify(|acc| *acc = acc.intersect(&iv))
            .or_insert(iv);
    }
    out
}

/// Whether `replacement` can stand in for `incumbent` in any skill.
pub fn check_interchangeable(
    ontology: &Reasoner,
    incumbent: &ComponentRecord,
    replacement: &ComponentRecord,
) -> Interchangeability {
    let graph = ontology.graph();
    let mut reasons = Vec::new();
    // The replacement's types act together: {Localization, TwoD} covers a
    // defined Localization2D.
    let whole = (replacement.sw_types.len() > 1).then(|| conjunction(&replacement.sw_types));
    for t in &incumbent.sw_types {
        let preserved = replacement
            .sw_types
            .iter()
            .any(|u| graph.is_named_subsumed_by(u, t).unwrap_or(false))
            || whole.as_ref().is_some_and(|w| {
                ontology
                    .is_subsumed_by(w, &ConceptExpression::named(t.clone()))
                    .unwrap_or(false)
            });
        if !preserved {
            reasons.push(InterchangeReason::FunctionalityNotPreserved { sw_type: t.clone() });
        }
    }
    let have = ports(replacement, Direction::Provides);
    for (kind, mt) in ports(incumbent, Direction::Provides) {
        if !have.contains(&(kind, mt)) {
            reasons.push(InterchangeReason::MissingProvides {
                kind,
                message_type: mt.to_string(),
            });
        }
    }
    let allowed = ports(incumbent, Direction::Requires);
    for (kind, mt) in ports(replacement, Direction::Requires) {
        if !allowed.contains(&(kind, mt)) {
            reasons.push(InterchangeReason::ExtraRequires {
                kind,
                message_type: mt.to_string(),
            });
        }
    }

    let mut warnings = Vec::new();
    let old = requirement_intervals(ontology, incumbent);
    for ((target, attribute), new) in requirement_intervals(ontology, replacement) {
        match old.get(&(target.clone(), attribute.clone())) {
            Some(prev) if !prev.is_subset_of(&new) => {
                reasons.push(InterchangeReason::StrongerRequirement {
                    incumbent: IntervalConstraint::new(attribute.clone(), prev),
                    replacement: IntervalConstraint::new(attribute.clone(), &new),
                    target_type: target,
                    attribute,
                });
            }
            Some(_) => {}
            None => warnings.push(InterchangeWarning {
                message: "constraint has no incumbent counterpart; not compared".into(),
                target_type: target,
                attribute,
            }),
        }
    }
    Interchangeability {
        interchangeable: reasons.is_empty(),
        reasons,
        warnings,
    }
}

/// Points `instance` at `replacement` and rebinds its connections and
/// exports to replacement endpoints of the same kind, direction and message
/// type. Single-provider requiring endpoints keep their first provider.
pub fn replace_instance(
    skill: &SkillGraph,
    instance: &str,
    incumbent: &ComponentRecord,
    replacement: &ComponentRecord,
) -> SkillGraph {
    let mut out = skill.clone();
    out.instances
        .insert(instance.to_string(), replacement.id.clone());

    let rebind = |r: &EndpointRef, dir: Direction| -> Option<Vec<EndpointRef>> {
        if r.instance != instance {
            return None;
        }
        let old = super::resolve_endpoint(incumbent, r, dir)?;
        Some(
            replacement
                .interfaces()
                .iter()
                .filter(|i| {
                    i.kind == old.kind
                        && i.direction == old.direction
                        && i.message_type == old.message_type
                })
                .map(|i| EndpointRef {
                    instance: instance.to_string(),
                    endpoint: i.name.clone(),
                    kind: Some(i.kind),
                })
                .collect(),
        )
    };

    let mut connections: Vec<Connection> = Vec::new();
    for c in &skill.connections {
        // Provides: the first matching endpoint carries the link.
        // Requires: every matching endpoint keeps being served.
        let froms = match rebind(&c.from, Direction::Provides) {
            Some(v) => v.into_iter().take(1).collect(),
            None => vec![c.from.clone()],
        };
        let tos = rebind(&c.to, Direction::Requires).unwrap_or_else(|| vec![c.to.clone()]);
        for from in &froms {
            for to in &tos {
                let single = to.kind.is_some_and(single_provider);
                let taken = connections
                    .iter()
                    .any(|x| &x.to == to && (single || &x.from == from));
                if !taken {
                    connections.push(Connection {
                        from: from.clone(),
                        to: to.clone(),
                    });
                }
            }
        }
    }
    out.connections = connections;

    for r in out.exports.values_mut() {
        let dir = super::resolve_endpoint(incumbent, r, Direction::Requires).map(|i| i.direction);
        if let Some(new) = dir.and_then(|d| rebind(r, d)).and_then(|v| v.into_iter().next()) {
            *r = new;
        }
    }

    if let Some(params) = out.parameters.get_mut(instance) {
        params.retain(|k, _| replacement.parameters.contains(k));
    }
    out
}
