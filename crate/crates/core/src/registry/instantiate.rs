use std::collections::{BTreeMap, BTreeSet};

use crate::decimal::Decimal;
use crate::ontology::ValueKind;
use crate::reasoner::{IntervalConstraint, Reasoner};
use crate::vocab;

use super::record::{
    AttributeValue, ComponentKind, ComponentRecord, InterfaceSpec, MetaInfo, NonTypeSpecific,
    Status,
};
use super::validate::{conjunction, demanded_interfaces};
use super::RegistryError;

/// A value inside the reported interval, preferring its lower end.
fn witness(c: &IntervalConstraint, kind: ValueKind) -> Decimal {
    if let Some(v) = c.equality {
        return v;
    }
    // int bounds are already inclusive, so a step is only taken over decimals
    let step = match kind {
        ValueKind::Int => Decimal::ZERO,
        ValueKind::Decimal => Decimal::ONE,
    };
    match (c.lower, c.upper) {
        (None, None) => Decimal::ZERO,
        (None, Some(u)) => match u.strict {
            true => u.value.checked_sub(step).unwrap_or(u.value),
            false => u.value,
        },
        (Some(l), upper) => {
            let candidate = match l.strict {
                true => l.value.checked_add(step).unwrap_or(l.value),
                false => l.value,
            };
            let fits = upper.is_none_or(|u| candidate < u.value || (!u.strict && candidate == u.value));
            match (fits, upper) {
                (false, Some(u)) => l.value.midpoint(u.value).unwrap_or(l.value),
                _ => candidate,
            }
        }
    }
}

fn draft_id(types: &[String]) -> String {
    let slug: Vec<String> = types
        .iter()
        .map(|t| {
            t.chars()
                .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
                .collect()
        })
        .collect();
    format!("{}_draft", slug.join("_"))
}

/// A record draft carrying everything `types` entail: their capabilities,
/// the interfaces they demand and slots for their attributes. Meta data
/// other than version and status is left for the author.
pub fn instantiate_from_types(
    ontology: &Reasoner,
    types: &[String],
) -> Result<ComponentRecord, RegistryError> {
    if types.is_empty() {
        return Err(RegistryError::EmptyTypeList);
    }
    let tbox = ontology.tbox();
    if let Some(t) = types.iter().find(|t| !tbox.has_concept(t)) {
        return Err(RegistryError::UndeclaredIdentifier(t.clone()));
    }
    let profile = ontology.profile(&conjunction(types))?;

    let mut used = BTreeSet::new();
    let interfaces = demanded_interfaces(ontology, types)
        .into_iter()
        .map(|((kind, direction, message_type), _)| {
            let base = message_type
                .rsplit('/')
                .next()
                .unwrap_or(&message_type)
                .to_lowercase();
            let mut name = base.clone();
            let mut n = 2;
            while !used.insert(name.clone()) {
                name = format!("{base}_{n}");
                n += 1;
            }
            InterfaceSpec::new(kind, direction, name, message_type)
        })
        .collect();

    let mut slots: BTreeMap<String, Decimal> = BTreeMap::new();
    for c in &profile.intervals {
        if let Some(kind) = tbox.attribute_kind(&c.attribute) {
            slots.insert(c.attribute.clone(), witness(c, kind));
        }
    }
    for link in profile.links.iter().filter(|l| l.role == vocab::HAS_ATTRIBUTE) {
        for t in &link.filler_types {
            if tbox.attribute_kind(t).is_some() {
                slots.entry(t.clone()).or_insert(Decimal::ZERO);
            }
        }
    }

    Ok(ComponentRecord {
        id: draft_id(types),
        meta: MetaInfo {
            version: Some(semver::Version::new(0, 1, 0)),
            status: Status::Model,
            ..Default::default()
        },
        kind: ComponentKind::SWComponent,
        sw_types: types.to_vec(),
        non_type_specific: NonTypeSpecific {
            capabilities: profile.capabilities.into_iter().collect(),
            interfaces,
            attributes: slots
                .into_iter()
                .map(|(a, v)| AttributeValue::new(a, v))
                .collect(),
        },
        ..Default::default()
    })
}
