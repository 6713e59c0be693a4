use std::fmt;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::decimal::Decimal;
use crate::matcher::RequirementConstraint;
use crate::skill::SkillGraph;
use crate::vocab;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub enum ComponentKind {
    #[default]
    SWComponent,
    HAComponent,
    Skill,
}

impl ComponentKind {
    pub const ALL: [ComponentKind; 3] = [
        ComponentKind::SWComponent,
        ComponentKind::HAComponent,
        ComponentKind::Skill,
    ];

    /// The upper-ontology concept for this kind.
    pub fn concept(self) -> &'static str {
        match self {
            ComponentKind::SWComponent => vocab::SW_COMPONENT,
            ComponentKind::HAComponent => vocab::HA_COMPONENT,
            ComponentKind::Skill => vocab::SKILL,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.concept() == s)
    }
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.concept())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub enum Status {
    #[default]
    Model,
    Prototype,
    Released,
}

impl Status {
    pub const ALL: [Status; 3] = [Status::Model, Status::Prototype, Status::Released];

    /// The only status this one may move to.
    pub fn next(self) -> Option<Status> {
        match self {
            Status::Model => Some(Status::Prototype),
            Status::Prototype => Some(Status::Released),
            Status::Released => None,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.to_string() == s)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Model => "Model",
            Status::Prototype => "Prototype",
            Status::Released => "Released",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct MetaInfo {
    pub author: String,
    pub owner: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub created_at: Option<DateTime<Utc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub version: Option<semver::Version>,
    pub description: String,
    pub status: Status,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InterfaceKind {
    Topic,
    Service,
    Action,
}

impl fmt::Display for InterfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    Provides,
    Requires,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Role that encodes an interface of this kind and direction.
pub fn interface_role(kind: InterfaceKind, direction: Direction) -> &'static str {
    match (kind, direction) {
        (InterfaceKind::Topic, Direction::Provides) => vocab::PUBLISHES_TOPIC,
        (InterfaceKind::Topic, Direction::Requires) => vocab::SUBSCRIBES_TOPIC,
        (InterfaceKind::Service, Direction::Provides) => vocab::PROVIDES_SERVICE,
        (InterfaceKind::Service, Direction::Requires) => vocab::REQUIRES_SERVICE,
        (InterfaceKind::Action, Direction::Provides) => vocab::PROVIDES_ACTION,
        (InterfaceKind::Action, Direction::Requires) => vocab::REQUIRES_ACTION,
    }
}

/// Inverse of [`interface_role`].
pub fn role_interface(role: &str) -> Option<(InterfaceKind, Direction)> {
    [InterfaceKind::Topic, InterfaceKind::Service, InterfaceKind::Action]
        .into_iter()
        .flat_map(|k| [(k, Direction::Provides), (k, Direction::Requires)])
        .find(|(k, d)| interface_role(*k, *d) == role)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InterfaceSpec {
    pub kind: InterfaceKind,
    pub direction: Direction,
    pub name: String,
    pub message_type: String,
}

impl InterfaceSpec {
    pub fn new(
        kind: InterfaceKind,
        direction: Direction,
        name: impl Into<String>,
        message_type: impl Into<String>,
    ) -> Self {
        InterfaceSpec {
            kind,
            direction,
            name: name.into(),
            message_type: message_type.into(),
        }
    }

    /// `pkg/Type`: the package part is the first segment.
    pub fn message_package(&self) -> Option<&str> {
        self.message_type.split_once('/').map(|(p, _)| p)
    }
}

/// `pkg/Type` with both segments identifiers without further slashes.
pub fn is_message_type(s: &str) -> bool {
    let Some((pkg, ty)) = s.split_once('/') else {
        return false;
    };
    let seg = |x: &str| {
        let mut c = x.chars();
        matches!(c.next(), Some(ch) if ch.is_ascii_alphabetic() || ch == '_')
            && c.all(|ch| ch.is_ascii_alphanumeric() || ch == '_')
    };
    seg(pkg) && seg(ty)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AttributeValue {
    pub attribute: String,
    pub value: Decimal,
}

impl AttributeValue {
    pub fn new(attribute: impl Into<String>, value: Decimal) -> Self {
        AttributeValue {
            attribute: attribute.into(),
            value,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct DeviceSpec {
    pub manufacturer: String,
    pub model_name: String,
    pub model_number: String,
    pub hw_types: Vec<String>,
    pub attributes: Vec<AttributeValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub geometry_model_ref: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation_model_ref: Option<String>,
}

impl DeviceSpec {
    pub fn attribute(&self, name: &str) -> Option<Decimal> {
        self.attributes
            .iter()
            .find(|a| a.attribute == name)
            .map(|a| a.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Medium {
    Usb,
    Rs232,
    Ethernet,
    Can,
    Other(String),
}

impl Medium {
    pub fn as_str(&self) -> &str {
        match self {
            Medium::Usb => "USB",
            Medium::Rs232 => "RS232",
            Medium::Ethernet => "Ethernet",
            Medium::Can => "CAN",
            Medium::Other(s) => s,
        }
    }

    pub fn parse(s: &str) -> Medium {
        match s {
            "USB" => Medium::Usb,
            "RS232" => Medium::Rs232,
            "Ethernet" => Medium::Ethernet,
            "CAN" => Medium::Can,
            other => Medium::Other(other.to_string()),
        }
    }
}

impl Serialize for Medium {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Medium {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Medium::parse(&String::deserialize(d)?))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HwInterfaceSpec {
    pub medium: Medium,
    pub protocol: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct NonTypeSpecific {
    pub capabilities: Vec<String>,
    pub interfaces: Vec<InterfaceSpec>,
    pub attributes: Vec<AttributeValue>,
}

/// One App's semantic model.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct ComponentRecord {
    pub id: String,
    pub meta: MetaInfo,
    pub kind: ComponentKind,
    pub sw_types: Vec<String>,
    pub non_type_specific: NonTypeSpecific,
    pub requirements: Vec<RequirementConstraint>,
    pub supported_devices: Vec<DeviceSpec>,
    pub hw_interfaces: Vec<HwInterfaceSpec>,
    /// Parameter keys a Solution must bind for each instance of this App.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parameters: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skill_body: Option<SkillGraph>,
}

impl ComponentRecord {
    pub fn interfaces(&self) -> &[InterfaceSpec] {
        &self.non_type_specific.interfaces
    }

    pub fn attribute(&self, name: &str) -> Option<Decimal> {
        self.non_type_specific
            .attributes
            .iter()
            .find(|a| a.attribute == name)
            .map(|a| a.value)
    }

    /// Canonical file content: pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("records always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Result ordering: Released, then Prototype, then Model; ties by id.
    pub fn rank_key(&self) -> (std::cmp::Reverse<Status>, &str) {
        (std::cmp::Reverse(self.meta.status), &self.id)
    }
}

/// Ids double as file names: ASCII letters, digits, `_` and `-`.
pub fn is_valid_id(id: &str) -> bool {
    !id.is_empty()
        && id.len() <= 128
        && id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-')
}
