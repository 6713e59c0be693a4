use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;

use crate::ontology::{CompareOp, ConceptExpression, TBox, ValueKind};
use crate::reasoner::Reasoner;
use crate::vocab;

use super::record::{
    interface_role, is_message_type, is_valid_id, role_interface, AttributeValue, ComponentKind,
    ComponentRecord, Direction, InterfaceKind,
};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "code", rename_all = "camelCase")]
pub enum Violation {
    InvalidId { id: String },
    MissingMeta { field: String },
    MissingSwType,
    MissingSupportedDevices,
    MissingSkillBody,
    FieldNotAllowed { field: String, kind: ComponentKind },
    UndeclaredIdentifier { name: String },
    NotASoftwareType { name: String },
    NotAHardwareType { name: String },
    NotACapability { name: String },
    AttributeKindMismatch {
        attribute: String,
        value: String,
        expected: ValueKind,
    },
    DuplicateAttribute { attribute: String },
    DuplicateInterface {
        kind: InterfaceKind,
        direction: Direction,
        name: String,
    },
    InvalidInterfaceName { name: String },
    InvalidMessageType { message_type: String },
    EmptyHwTypes { device: usize },
    EmptyProtocol { index: usize },
    InvalidRequirement { requirement: String, reason: String },
    /// A type's definition demands an interface the record lacks.
    #[serde(rename_all = "camelCase")]
    MissingInterface {
        sw_type: String,
        kind: InterfaceKind,
        direction: Direction,
        message_type: String,
    },
    /// The record's description contradicts its types.
    Unsatisfiable,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InvalidId { id } => write!(f, "InvalidId({id:?})"),
            Violation::MissingMeta { field } => write!(f, "MissingMeta({field})"),
            Violation::MissingSwType => f.write_str("MissingSwType"),
            Violation::MissingSupportedDevices => f.write_str("MissingSupportedDevices"),
            Violation::MissingSkillBody => f.write_str("MissingSkillBody"),
            Violation::FieldNotAllowed { field, kind } => {
                write!(f, "FieldNotAllowed({field} on {kind})")
            }
            Violation::UndeclaredIdentifier { name } => write!(f, "UndeclaredIdentifier({name})"),
            Violation::NotASoftwareType { name } => write!(f, "NotASoftwareType({name})"),
            Violation::NotAHardwareType { name } => write!(f, "NotAHardwareType({name})"),
            Violation::NotACapability { name } => write!(f, "NotACapability({name})"),
            Violation::AttributeKindMismatch {
                attribute,
                value,
                expected,
            } => write!(f, "AttributeKindMismatch({attribute} = {value}, expected {expected})"),
            Violation::DuplicateAttribute { attribute } => {
                write!(f, "DuplicateAttribute({attribute})")
            }
            Violation::DuplicateInterface {
                kind,
                direction,
                name,
            } => write!(f, "DuplicateInterface({kind} {direction} {name})"),
            Violation::InvalidInterfaceName { name } => write!(f, "InvalidInterfaceName({name:?})"),
            Violation::InvalidMessageType { message_type } => {
                write!(f, "InvalidMessageType({message_type})")
            }
            Violation::EmptyHwTypes { device } => write!(f, "EmptyHwTypes(device {device})"),
            Violation::EmptyProtocol { index } => write!(f, "EmptyProtocol(hwInterface {index})"),
            Violation::InvalidRequirement {
                requirement,
                reason,
            } => write!(f, "InvalidRequirement({requirement}: {reason})"),
            Violation::MissingInterface {
                sw_type,
                message_type,
                ..
            } => write!(f, "MissingInterface({sw_type}, {message_type})"),
            Violation::Unsatisfiable => f.write_str("Unsatisfiable"),
        }
    }
}

/// An interface a set of types demands: kind, direction and message type.
pub type Demand = (InterfaceKind, Direction, String);

/// Interfaces demanded by the conjunction of `types`, each with the type
/// (or conjunction) held responsible. Types must be declared.
pub fn demanded_interfaces(ontology: &Reasoner, types: &[String]) -> Vec<(Demand, String)> {
    let Some(joint) = demands_of(ontology, types) else {
        return Vec::new();
    };
    let singles: Vec<(String, BTreeSet<Demand>)> = types
        .iter()
        .map(|t| {
            let d = demands_of(ontology, std::slice::from_ref(t)).unwrap_or_default();
            (t.clone(), d)
        })
        .collect();
    joint
        .into_iter()
        .map(|d| {
            let owner = singles
                .iter()
                .find(|(_, ds)| ds.contains(&d))
                .map(|(t, _)| t.clone())
                .unwrap_or_else(|| conjunction(types).to_string());
            (d, owner)
        })
        .collect()
}

pub(crate) fn conjunction(types: &[String]) -> ConceptExpression {
    ConceptExpression::and(types.iter().map(|t| ConceptExpression::named(t.clone())))
}

fn is_message_concept(ontology: &Reasoner, name: &str) -> bool {
    ontology
        .graph()
        .is_named_subsumed_by(name, vocab::MESSAGE_TYPE)
        .unwrap_or(false)
}

fn demands_of(ontology: &Reasoner, types: &[String]) -> Option<BTreeSet<Demand>> {
    if types.is_empty() {
        return None;
    }
    let profile = ontology.profile(&conjunction(types)).ok()?;
    let mut out = BTreeSet::new();
    for link in &profile.links {
        let Some((kind, direction)) = role_interface(&link.role) else {
            continue;
        };
        for t in &link.filler_types {
            if is_message_concept(ontology, t) {
                out.insert((kind, direction, t.clone()));
            }
        }
    }
    Some(out)
}

fn check_attributes(
    ontology: &Reasoner,
    attrs: &[AttributeValue],
    out: &mut Vec<Violation>,
) {
    let mut seen = HashSet::new();
    for a in attrs {
        if !seen.insert(a.attribute.as_str()) {
            out.push(Violation::DuplicateAttribute {
                attribute: a.attribute.clone(),
            });
        }
        match ontology.tbox().attribute_kind(&a.attribute) {
            None => out.push(Violation::UndeclaredIdentifier {
                name: a.attribute.clone(),
            }),
            Some(ValueKind::Int) if !a.value.is_integer() => {
                out.push(Violation::AttributeKindMismatch {
                    attribute: a.attribute.clone(),
                    value: a.value.to_string(),
                    expected: ValueKind::Int,
                })
            }
            Some(_) => {}
        }
    }
}

fn check_typed(
    ontology: &Reasoner,
    name: &str,
    upper: &str,
    wrong: impl FnOnce(String) -> Violation,
    out: &mut Vec<Violation>,
) -> bool {
    if !ontology.tbox().has_concept(name) {
        out.push(Violation::UndeclaredIdentifier {
            name: name.to_string(),
        });
        return false;
    }
    if !ontology
        .graph()
        .is_named_subsumed_by(name, upper)
        .unwrap_or(false)
    {
        out.push(wrong(name.to_string()));
        return false;
    }
    true
}

/// The record as one concept expression over the ontology's signature,
/// leaving out anything undeclared.
pub fn record_expression(tbox: &TBox, record: &ComponentRecord) -> ConceptExpression {
    let mut parts = vec![ConceptExpression::named(record.kind.concept())];
    parts.extend(
        record
            .sw_types
            .iter()
            .filter(|t| tbox.has_concept(t))
            .map(|t| ConceptExpression::named(t.clone())),
    );
    let attrs = |attrs: &[AttributeValue], parts: &mut Vec<ConceptExpression>| {
        for a in attrs {
            if let Some(kind) = tbox.attribute_kind(&a.attribute) {
                if kind == ValueKind::Int && !a.value.is_integer() {
                    continue;
                }
                parts.push(ConceptExpression::attr(
                    a.attribute.clone(),
                    CompareOp::Eq,
                    a.value,
                ));
                if tbox.has_concept(&a.attribute) {
                    parts.push(ConceptExpression::some(
                        vocab::HAS_ATTRIBUTE,
                        ConceptExpression::named(a.attribute.clone()),
                    ));
                }
            }
        }
    };
    for k in &record.non_type_specific.capabilities {
        if tbox.is_capability(k) {
            parts.push(ConceptExpression::some(
                vocab::HAS_CAPABILITY,
                ConceptExpression::named(k.clone()),
            ));
        }
    }
    for i in record.interfaces() {
        if tbox.has_concept(&i.message_type) {
            parts.push(ConceptExpression::some(
                interface_role(i.kind, i.direction),
                ConceptExpression::named(i.message_type.clone()),
            ));
        }
    }
    attrs(&record.non_type_specific.attributes, &mut parts);
    for d in &record.supported_devices {
        let mut dev = vec![ConceptExpression::named(vocab::HARDWARE_TYPE)];
        dev.extend(
            d.hw_types
                .iter()
                .filter(|t| tbox.has_concept(t))
                .map(|t| ConceptExpression::named(t.clone())),
        );
        attrs(&d.attributes, &mut dev);
        parts.push(ConceptExpression::some(
            vocab::SUPPORTS_DEVICE,
            ConceptExpression::and(dev),
        ));
    }
    ConceptExpression::and(parts)
}

/// Every way `record` breaks the schema or the ontologies; empty iff valid.
pub fn validate_record(ontology: &Reasoner, record: &ComponentRecord) -> Vec<Violation> {
    let mut out = Vec::new();
    let tbox = ontology.tbox();

    if !is_valid_id(&record.id) {
        out.push(Violation::InvalidId {
            id: record.id.clone(),
        });
    }
    let meta = &record.meta;
    for (field, missing) in [
        ("author", meta.author.trim().is_empty()),
        ("owner", meta.owner.trim().is_empty()),
        ("createdAt", meta.created_at.is_none()),
        ("version", meta.version.is_none()),
    ] {
        if missing {
            out.push(Violation::MissingMeta {
                field: field.to_string(),
            });
        }
    }

    let not_allowed = |field: &str| Violation::FieldNotAllowed {
        field: field.to_string(),
        kind: record.kind,
    };
    match record.kind {
        ComponentKind::SWComponent => {
            if record.sw_types.is_empty() {
                out.push(Violation::MissingSwType);
            }
        }
        ComponentKind::HAComponent => {
            if record.supported_devices.is_empty() {
                out.push(Violation::MissingSupportedDevices);
            }
        }
        ComponentKind::Skill => {
            if record.skill_body.is_none() {
                out.push(Violation::MissingSkillBody);
            }
        }
    }
    if record.kind != ComponentKind::HAComponent {
        if !record.supported_devices.is_empty() {
            out.push(not_allowed("supportedDevices"));
        }
        if !record.hw_interfaces.is_empty() {
            out.push(not_allowed("hwInterfaces"));
        }
    }
    if record.kind != ComponentKind::Skill && record.skill_body.is_some() {
        out.push(not_allowed("skillBody"));
    }

    let mut types_ok = true;
    for t in &record.sw_types {
        types_ok &= check_typed(
            ontology,
            t,
            vocab::SOFTWARE_TYPE,
            |name| Violation::NotASoftwareType { name },
            &mut out,
        );
    }
    for k in &record.non_type_specific.capabilities {
        if !tbox.has_concept(k) {
            out.push(Violation::UndeclaredIdentifier { name: k.clone() });
        } else if !tbox.is_capability(k) {
            out.push(Violation::NotACapability { name: k.clone() });
        }
    }
    check_attributes(ontology, &record.non_type_specific.attributes, &mut out);

    let mut seen = HashSet::new();
    for i in record.interfaces() {
        if !seen.insert((i.kind, i.direction, i.name.as_str())) {
            out.push(Violation::DuplicateInterface {
                kind: i.kind,
                direction: i.direction,
                name: i.name.clone(),
            });
        }
        if i.name.trim().is_empty() || i.name.chars().any(char::is_whitespace) {
            out.push(Violation::InvalidInterfaceName {
                name: i.name.clone(),
            });
        }
        if !is_message_type(&i.message_type) {
            out.push(Violation::InvalidMessageType {
                message_type: i.message_type.clone(),
            });
        }
    }

    for (n, d) in record.supported_devices.iter().enumerate() {
        if d.hw_types.is_empty() {
            out.push(Violation::EmptyHwTypes { device: n });
        }
        for t in &d.hw_types {
            check_typed(
                ontology,
                t,
                vocab::HARDWARE_TYPE,
                |name| Violation::NotAHardwareType { name },
                &mut out,
            );
        }
        check_attributes(ontology, &d.attributes, &mut out);
    }
    for (n, h) in record.hw_interfaces.iter().enumerate() {
        if h.protocol.trim().is_empty() {
            out.push(Violation::EmptyProtocol { index: n });
        }
    }
    for r in &record.requirements {
        if let Err(e) = r.check(tbox) {
            out.push(Violation::InvalidRequirement {
                requirement: r.to_string(),
                reason: e.to_string(),
            });
        }
    }

    if types_ok && !record.sw_types.is_empty() {
        let present: HashSet<(InterfaceKind, Direction, &str)> = record
            .interfaces()
            .iter()
            .map(|i| (i.kind, i.direction, i.message_type.as_str()))
            .collect();
        for ((kind, direction, message_type), owner) in
            demanded_interfaces(ontology, &record.sw_types)
        {
            if !present.contains(&(kind, direction, message_type.as_str())) {
                out.push(Violation::MissingInterface {
                    sw_type: owner,
                    kind,
                    direction,
                    message_type,
                });
            }
        }
    }

    if out.is_empty() {
        let expr = record_expression(tbox, record);
        if !ontology.graph().is_satisfiable(&expr).unwrap_or(true) {
            out.push(Violation::Unsatisfiable);
        }
    }
    out
}
