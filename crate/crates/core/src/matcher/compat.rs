use serde::Serialize;

use crate::decimal::Decimal;
use crate::reasoner::Reasoner;
use crate::registry::ComponentRecord;

use super::RequirementConstraint;

/// Note attached to a failing check whose attribute the provider never states.
pub const ATTRIBUTE_UNKNOWN: &str = "AttributeUnknown";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Pass,
    Fail,
}

/// What a check looked at: the provider record itself or one of its devices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Subject {
    pub record: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub device: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_name: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub constraint: RequirementConstraint,
    pub subject: Subject,
    pub observed: Option<Decimal>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CompatibilityReport {
    pub requirer: String,
    pub provider: String,
    pub compatible: bool,
    pub checks: Vec<Check>,
    /// Requirements whose target type the provider does not have.
    pub not_applicable: Vec<RequirementConstraint>,
}

impl CompatibilityReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.verdict == Verdict::Fail)
    }
}

fn check(constraint: &RequirementConstraint, subject: Subject, observed: Option<Decimal>) -> Check {
    let (verdict, note) = match observed {
        Some(v) if constraint.holds(v) => (Verdict::Pass, None),
        Some(_) => (Verdict::Fail, None),
        None => (Verdict::Fail, Some(ATTRIBUTE_UNKNOWN.to_string())),
    };
    Check {
        constraint: constraint.clone(),
        subject,
        observed,
        verdict,
        note,
    }
}

/// Checks every requirement of `requirer` against `provider`.
///
/// A requirement applies if its target type subsumes one of the provider's
/// types or kind (the value is then read from the record, falling back to
/// each device), or else one of a device's hardware types (read from that
/// device, falling back to the record).
pub fn check_compatibility(
    ontology: &Reasoner,
    requirer: &ComponentRecord,
    provider: &ComponentRecord,
) -> CompatibilityReport {
    let graph = ontology.graph();
    let below = |t: &str, target: &str| graph.is_named_subsumed_by(t, target).unwrap_or(false);
    let record_subject = || Subject {
        record: provider.id.clone(),
        device: None,
        model_name: None,
    };
    let device_subject = |i: usize| Subject {
        record: provider.id.clone(),
        device: Some(i),
        model_name: Some(provider.supported_devices[i].model_name.clone()),
    };

    let mut checks = Vec::new();
    let mut not_applicable = Vec::new();
    for r in &requirer.requirements {
        let target = r.target_type.as_str();
        let record_level = below(provider.kind.concept(), target)
            || provider.sw_types.iter().any(|t| below(t, target));
        if record_level {
            match provider.attribute(&r.attribute) {
                Some(v) => checks.push(check(r, record_subject(), Some(v))),
                None if provider.supported_devices.is_empty() => {
                    checks.push(check(r, record_subject(), None))
                }
                None => {
                    for (i, d) in provider.supported_devices.iter().enumerate() {
                        checks.push(check(r, device_subject(i), d.attribute(&r.attribute)));
                    }
                }
            }
            continue;
        }
        let devices: Vec<usize> = provider
            .supported_devices
            .iter()
            .enumerate()
            .filter(|(_, d)| d.hw_types.iter().any(|t| below(t, target)))
            .map(|(i, _)| i)
            .collect();
        if devices.is_empty() {
            not_applicable.push(r.clone());
            continue;
        }
        for i in devices {
            let observed = provider.supported_devices[i]
                .attribute(&r.attribute)
                .or_else(|| provider.attribute(&r.attribute));
            checks.push(check(r, device_subject(i), observed));
        }
    }
    CompatibilityReport {
        requirer: requirer.id.clone(),
        provider: provider.id.clone(),
        compatible: checks.iter().all(|c| c.verdict == Verdict::Pass),
        checks,
        not_applicable,
    }
}

/// Every pool record with its report, in registry ranking order.
pub fn filter_candidates_verbose<'a>(
    ontology: &Reasoner,
    requirer: &ComponentRecord,
    pool: impl IntoIterator<Item = &'a ComponentRecord>,
) -> Vec<(&'a ComponentRecord, CompatibilityReport)> {
    let mut out: Vec<_> = pool
        .into_iter()
        .map(|p| (p, check_compatibility(ontology, requirer, p)))
        .collect();
    out.sort_by(|a, b| a.0.rank_key().cmp(&b.0.rank_key()));
    out
}

/// The compatible pool records, in registry ranking order.
pub fn filter_candidates<'a>(
    ontology: &Reasoner,
    requirer: &ComponentRecord,
    pool: impl IntoIterator<Item = &'a ComponentRecord>,
) -> Vec<(&'a ComponentRecord, CompatibilityReport)> {
    filter_candidates_verbose(ontology, requirer, pool)
        .into_iter()
        .filter(|(_, r)| r.compatible)
        .collect()
}
