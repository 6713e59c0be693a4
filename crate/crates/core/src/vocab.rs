//! Names of the fixed upper ontology the registry builds on.

pub const HA_COMPONENT: &str = "HAComponent";
pub const SW_COMPONENT: &str = "SWComponent";
pub const SKILL: &str = "Skill";
pub const APP: &str = "App";
pub const COORDINATOR: &str = "Coordinator";
pub const SOFTWARE_TYPE: &str = "SoftwareType";
pub const HARDWARE_TYPE: &str = "HardwareType";
pub const CAPABILITY: &str = "Capability";
pub const MESSAGE_TYPE: &str = "MessageType";

pub const HAS_CAPABILITY: &str = "hasCapability";
pub const SUPPORTS_DEVICE: &str = "supportsDevice";
pub const HAS_ATTRIBUTE: &str = "hasAttribute";
pub const PUBLISHES_TOPIC: &str = "publishesTopic";
pub const SUBSCRIBES_TOPIC: &str = "subscribesTopic";
pub const PROVIDES_SERVICE: &str = "providesService";
pub const REQUIRES_SERVICE: &str = "requiresService";
pub const PROVIDES_ACTION: &str = "providesAction";
pub const REQUIRES_ACTION: &str = "requiresAction";

pub const KIND_CONCEPTS: [&str; 5] = [HA_COMPONENT, SW_COMPONENT, SKILL, APP, COORDINATOR];

pub const UPPER_CONCEPTS: [&str; 9] = [
    HA_COMPONENT,
    SW_COMPONENT,
    SKILL,
    APP,
    COORDINATOR,
    SOFTWARE_TYPE,
    HARDWARE_TYPE,
    CAPABILITY,
    MESSAGE_TYPE,
];

pub const UPPER_ROLES: [&str; 9] = [
    HAS_CAPABILITY,
    SUPPORTS_DEVICE,
    HAS_ATTRIBUTE,
    PUBLISHES_TOPIC,
    SUBSCRIBES_TOPIC,
    PROVIDES_SERVICE,
    REQUIRES_SERVICE,
    PROVIDES_ACTION,
    REQUIRES_ACTION,
];
