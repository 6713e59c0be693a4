//! Human-readable renderings for the default table format.

use std::fmt::Write as _;

use serde::Serialize;

use semreg_core::api::{ApiError, Classification, ComponentPage, OntologySummary, RecordValidation};
use semreg_core::codegen::SkeletonDescriptor;
use semreg_core::matcher::CompatibilityReport;
use semreg_core::skill::{SkillIssue, ValidationReport};

/// Left-aligned columns, two spaces apart, under a header and a rule.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let mut l = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i + 1 == cells.len() {
                l.push_str(cell);
            } else {
                let _ = write!(l, "{cell:<w$}  ");
            }
        }
        out.push_str(l.trim_end());
        out.push('\n');
    };
    line(headers.to_vec());
    let rules: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    line(rules.iter().map(String::as_str).collect());
    for row in rows {
        line(row.iter().map(String::as_str).collect());
    }
    out
}

pub fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).unwrap_or_default();
    s.push('\n');
    s
}

pub fn error(e: &ApiError) -> String {
    let code = serde_json::to_value(e.code)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    let mut s = format!("error[{code}]: {}", e.message);
    if let Some(serde_json::Value::Array(items)) = &e.details {
        for item in items {
            let _ = write!(s, "\n  - {}", compact(item));
        }
    }
    s
}

fn compact(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn summary(s: &OntologySummary) -> String {
    let rows = [
        ("concepts", s.concepts),
        ("capabilities", s.capabilities),
        ("roles", s.roles),
        ("attributes", s.attributes),
        ("axioms", s.axioms),
    ]
    .iter()
    .map(|(k, v)| vec![k.to_string(), v.to_string()])
    .collect::<Vec<_>>();
    let mut out = table(&["ITEM", "COUNT"], &rows);
    if s.unsatisfiable.is_empty() {
        out.push_str("all concepts satisfiable\n");
    } else {
        let _ = writeln!(out, "unsatisfiable: {}", s.unsatisfiable.join(", "));
    }
    out
}

pub fn classification(c: &Classification) -> String {
    c.lines().into_iter().map(|l| l + "\n").collect()
}

pub fn page(p: &ComponentPage) -> String {
    let rows: Vec<Vec<String>> = p
        .components
        .iter()
        .map(|r| {
            let devices: Vec<String> = r
                .supported_devices
                .iter()
                .map(|d| format!("{} {}", d.manufacturer, d.model_name).trim().to_string())
                .collect();
            vec![
                r.id.clone(),
                r.kind.to_string(),
                r.meta.status.to_string(),
                r.sw_types.join(", "),
                devices.join(", "),
            ]
        })
        .collect();
    let mut out = table(&["ID", "KIND", "STATUS", "TYPES", "DEVICES"], &rows);
    let _ = writeln!(out, "{} of {} component(s)", p.components.len(), p.total);
    out
}

pub fn record_validation(v: &RecordValidation) -> String {
    if v.valid {
        return format!("{}: valid\n", v.id);
    }
    let mut out = format!("{}: {} violation(s)\n", v.id, v.violations.len());
    for violation in &v.violations {
        let _ = writeln!(out, "  - {violation}");
    }
    out
}

pub fn skeleton(s: &SkeletonDescriptor) -> String {
    let rows: Vec<Vec<String>> = s
        .endpoints
        .iter()
        .map(|e| {
            vec![
                e.kind.to_string(),
                e.direction.to_string(),
                e.name.clone(),
                e.message_type.clone(),
                e.placeholder_hook.clone(),
            ]
        })
        .collect();
    let mut out = format!("package {}\n", s.package_name);
    out.push_str(&table(&["KIND", "DIRECTION", "NAME", "MESSAGE TYPE", "HOOK"], &rows));
    if !s.parameters.is_empty() {
        let _ = writeln!(out, "parameters: {}", s.parameters.join(", "));
    }
    out
}

fn issue(i: &SkillIssue) -> String {
    let mut v = serde_json::to_value(i).unwrap_or_default();
    let code = v
        .as_object_mut()
        .and_then(|o| o.remove("code"))
        .map(|c| compact(&c))
        .unwrap_or_default();
    match v.as_object() {
        Some(o) if !o.is_empty() => format!("{code} {v}"),
        _ => code,
    }
}

pub fn skill_report(r: &ValidationReport) -> String {
    let mut out = String::new();
    for (label, issues) in [("error", &r.errors), ("warning", &r.warnings)] {
        for i in issues {
            let _ = writeln!(out, "{label}: {}", issue(i));
        }
    }
    let _ = writeln!(out, "{} error(s), {} warning(s)", r.errors.len(), r.warnings.len());
    out
}

pub fn compatibility(r: &CompatibilityReport) -> String {
    let rows: Vec<Vec<String>> = r
        .checks
        .iter()
        .map(|c| {
            let subject = match (&c.subject.device, &c.subject.model_name) {
                (Some(i), Some(m)) if !m.is_empty() => format!("{} device {i} ({m})", c.subject.record),
                (Some(i), _) => format!("{} device {i}", c.subject.record),
                _ => c.subject.record.clone(),
            };
            vec![
                c.constraint.to_string(),
                subject,
                c.observed.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
                format!("{:?}", c.verdict),
                c.note.clone().unwrap_or_default(),
            ]
        })
        .collect();
    let mut out = format!("{} requires of {}\n", r.requirer, r.provider);
    out.push_str(&table(&["REQUIREMENT", "SUBJECT", "OBSERVED", "VERDICT", "NOTE"], &rows));
    for n in &r.not_applicable {
        let _ = writeln!(out, "not applicable: {n}");
    }
    let _ = writeln!(out, "compatible: {}", if r.compatible { "yes" } else { "no" });
    out
}
