mod support;

use std::path::PathBuf;

use semreg_core::codegen::{generate_manifest, generate_skeleton, message_dependencies, package_name};
use semreg_core::registry::ComponentRecord;
use support::demo;

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

// Set SEMREG_BLESS=1 to rewrite the expected files.
fn assert_golden(name: &str, actual: &str) {
    let path = golden(name);
    if std::env::var_os("SEMREG_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "{name} differs from golden output");
}

#[test]
fn detector_manifest_depends_on_its_message_packages() {
    let r = demo::record("ravision_detector");
    assert_eq!(message_dependencies(&r), ["object_detection", "sensor_msgs"]);
    let xml = generate_manifest(&r);
    assert!(xml.contains("<depend>sensor_msgs</depend>"));
    assert!(xml.contains("<depend>object_detection</depend>"));
    assert!(xml.contains("<version>1.4.2</version>"));
    assert_golden("ravision_detector.package.xml", &xml);
}

#[test]
fn detector_skeleton() {
    let r = demo::record("ravision_detector");
    let s = generate_skeleton(&r);
    let hooks: Vec<_> = s.endpoints.iter().map(|e| e.placeholder_hook.as_str()).collect();
    assert_eq!(hooks, ["on_message_image", "publish_object_detected"]);
    assert_eq!(s.parameters, ["model_path"]);
    assert_golden("ravision_detector.skeleton.json", &s.to_json());
}

#[test]
fn trajectory_executor_skeleton() {
    let s = generate_skeleton(&demo::record("trajectory_executor"));
    let hooks: Vec<_> = s.endpoints.iter().map(|e| e.placeholder_hook.as_str()).collect();
    assert_eq!(
        hooks,
        ["send_goal_follow_joint_trajectory", "on_message_joint_states", "on_message_target", "handle_request_execute"]
    );
    assert_golden("trajectory_executor.skeleton.json", &s.to_json());
}

#[test]
fn record_without_interfaces() {
    let mut r = demo::record("ravision_detector");
    r.non_type_specific.interfaces.clear();
    r.meta.version = None;
    let xml = generate_manifest(&r);
    assert!(!xml.contains("<depend>"));
    assert!(xml.contains("<version>0.0.0</version>"));
    assert!(generate_skeleton(&r).endpoints.is_empty());
}

#[test]
fn generation_is_deterministic() {
    for r in demo::records() {
        assert_eq!(generate_manifest(&r), generate_manifest(&r.clone()));
        let again = ComponentRecord::from_json(&r.to_json()).unwrap();
        assert_eq!(generate_skeleton(&r).to_json(), generate_skeleton(&again).to_json());
    }
}

#[test]
fn text_is_escaped() {
    let mut r = demo::record("ravision_detector");
    r.id = "RGB-D/Detector".into();
    r.meta.description = "finds <things> & \"stuff\"".into();
    let xml = generate_manifest(&r);
    assert_eq!(package_name(&r), "rgb_d_detector");
    assert!(xml.contains("<description>finds &lt;things&gt; &amp; &quot;stuff&quot;</description>"));
    // still well-formed
    let opens = xml.matches('<').count();
    let closes = xml.matches('>').count();
    assert_eq!(opens, closes);
}
