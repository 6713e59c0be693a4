//! Package manifest and interface skeleton generation from a record.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::registry::{ComponentRecord, Direction, InterfaceKind};

/// Package name: the id lowercased, anything but ASCII alphanumerics as `_`.
pub fn package_name(record: &ComponentRecord) -> String {
    record
        .id
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect()
}

/// Packages of every interface message type, sorted and deduplicated.
pub fn message_dependencies(record: &ComponentRecord) -> Vec<String> {
    record
        .interfaces()
        .iter()
        .filter_map(|i| i.message_package())
        .map(str::to_string)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// `package.xml`-style manifest: name, version, description, author, then
/// one `depend` per message package.
pub fn generate_manifest(record: &ComponentRecord) -> String {
    let version = record
        .meta
        .version
        .as_ref()
        .map(|v| v.to_string())
        .unwrap_or_else(|| "0.0.0".into());
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<package format=\"2\">\n");
    let mut element = |tag: &str, text: &str| {
        let _ = writeln!(out, "  <{tag}>{}</{tag}>", escape(text));
    };
    element("name", &package_name(record));
    element("version", &version);
    element("description", &record.meta.description);
    element("author", &record.meta.author);
    for dep in message_dependencies(record) {
        element("depend", &dep);
    }
    out.push_str("</package>\n");
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SkeletonEndpoint {
    pub kind: InterfaceKind,
    pub direction: Direction,
    pub name: String,
    pub message_type: String,
    /// Where application code for this endpoint goes.
    pub placeholder_hook: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SkeletonDescriptor {
    pub package_name: String,
    pub manifest: String,
    pub endpoints: Vec<SkeletonEndpoint>,
    pub parameters: Vec<String>,
}

impl SkeletonDescriptor {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("skeletons always serialize");
        s.push('\n');
        s
    }
}

fn hook_name(kind: InterfaceKind, direction: Direction, name: &str) -> String {
    let verb = match (kind, direction) {
        (InterfaceKind::Topic, Direction::Provides) => "publish",
        (InterfaceKind::Topic, Direction::Requires) => "on_message",
        (InterfaceKind::Service, Direction::Provides) => "handle_request",
        (InterfaceKind::Service, Direction::Requires) => "call",
        (InterfaceKind::Action, Direction::Provides) => "execute_goal",
        (InterfaceKind::Action, Direction::Requires) => "send_goal",
    };
    let ident: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect();
    format!("{verb}_{ident}")
}

/// One endpoint per interface, in declaration order, each with a hook.
pub fn generate_skeleton(record: &ComponentRecord) -> SkeletonDescriptor {
    SkeletonDescriptor {
        package_name: package_name(record),
        manifest: generate_manifest(record),
        endpoints: record
            .interfaces()
            .iter()
            .map(|i| SkeletonEndpoint {
                kind: i.kind,
                direction: i.direction,
                name: i.name.clone(),
                message_type: i.message_type.clone(),
                placeholder_hook: hook_name(i.kind, i.direction, &i.name),
            })
            .collect(),
        parameters: record.parameters.clone(),
    }
}
