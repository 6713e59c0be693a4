mod support;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use proptest::prelude::*;
use semreg_core::decimal::Decimal;
use semreg_core::registry::{ComponentKind, ComponentRecord, Direction, InterfaceKind, InterfaceSpec};
use semreg_core::skill::{
    check_interchangeable, connect, flatten, flatten_record, parameterize, replace_instance,
    validate_skill, validate_skill_record, EndpointRef, InterchangeReason, RecordSource,
    SkillError, SkillGraph, SkillIssue, SolutionDescriptor, SolutionError,
};
use support::demo;

type Source = BTreeMap<String, Arc<ComponentRecord>>;

fn source() -> Source {
    demo::records().into_iter().map(|r| (r.id.clone(), Arc::new(r))).collect()
}

fn with(mut src: Source, r: ComponentRecord) -> Source {
    src.insert(r.id.clone(), Arc::new(r));
    src
}

fn ep(instance: &str, endpoint: &str) -> EndpointRef {
    EndpointRef::new(instance, endpoint)
}

fn body(src: &Source, id: &str) -> SkillGraph {
    src[id].skill_body.clone().unwrap()
}

fn codes(issues: &[SkillIssue]) -> Vec<String> {
    issues
        .iter()
        .map(|i| serde_json::to_value(i).unwrap()["code"].as_str().unwrap().to_string())
        .collect()
}

#[test]
fn connect_checks_each_link() {
    let src = source();
    let mut g = SkillGraph::new()
        .with_instance("scanner", "acme_lms4000_wrapper")
        .with_instance("loc", "amcl_localization")
        .with_instance("cam", "orbis_depth60_wrapper")
        .with_instance("exec", "trajectory_executor")
        .with_instance("teach", "teach_in_panel")
        .with_instance("coord", "sequence_coordinator");
    connect(&mut g, &src, ep("scanner", "scan"), ep("loc", "scan")).unwrap();
    assert_eq!(
        connect(&mut g, &src, ep("scanner", "scan"), ep("loc", "scan")),
        Err(SkillError::DuplicateConnection { from: ep("scanner", "scan"), to: ep("loc", "scan") })
    );
    assert_eq!(
        connect(&mut g, &src, ep("cam", "image"), ep("loc", "scan")),
        Err(SkillError::TypeMismatch {
            expected: "sensor_msgs/LaserScan".into(),
            found: "sensor_msgs/Image".into()
        })
    );
    assert!(matches!(
        connect(&mut g, &src, ep("loc", "scan"), ep("scanner", "scan")),
        Err(SkillError::DirectionMismatch { .. })
    ));
    assert!(matches!(
        connect(&mut g, &src, ep("nobody", "x"), ep("loc", "scan")),
        Err(SkillError::UnknownInstance { .. })
    ));
    assert!(matches!(
        connect(&mut g, &src, ep("scanner", "nope"), ep("loc", "scan")),
        Err(SkillError::UnknownEndpoint { .. })
    ));
    // Topics fan in, services take a single provider.
    connect(&mut g, &src, ep("exec", "execute"), ep("teach", "execute")).unwrap();
    connect(&mut g, &src, ep("exec", "execute"), ep("coord", "execute")).unwrap();
    let mut g2 = g.clone().with_instance("exec2", "trajectory_executor");
    assert!(matches!(
        connect(&mut g2, &src, ep("exec2", "execute"), ep("coord", "execute")),
        Err(SkillError::MultiplicityViolation { .. })
    ));
    assert_eq!(g.connections.len(), 3);
}

#[test]
fn connect_reports_kind_mismatch() {
    let mut svc = demo::record("sequence_coordinator");
    svc.id = "pose_service".into();
    svc.non_type_specific.interfaces = vec![InterfaceSpec::new(
        InterfaceKind::Service,
        Direction::Requires,
        "pose",
        "geometry_msgs/Pose2D",
    )];
    let src = with(source(), svc);
    let mut g = SkillGraph::new()
        .with_instance("loc", "amcl_localization")
        .with_instance("svc", "pose_service");
    assert_eq!(
        connect(&mut g, &src, ep("loc", "pose"), ep("svc", "pose")),
        Err(SkillError::KindMismatch { from: InterfaceKind::Topic, to: InterfaceKind::Service })
    );
}

#[test]
fn every_demo_skill_validates_without_errors() {
    let ontology = demo::ontology();
    let src = source();
    for r in src.values().filter(|r| r.kind == ComponentKind::Skill) {
        let report = validate_skill_record(&ontology, &src, r).unwrap();
        assert!(report.is_clean(), "{}: {:#?}", r.id, report.errors);
    }
    let door = validate_skill_record(&ontology, &src, &src["door_pressing_skill"]).unwrap();
    assert_eq!(door.warnings, []);
}

#[test]
fn sub_skills_without_a_coordinator_warn() {
    let ontology = demo::ontology();
    let src = source();
    let report = validate_skill_record(&ontology, &src, &src["localization_skill"]).unwrap();
    assert_eq!(report.warnings, [SkillIssue::MissingCoordinator]);
}

#[test]
fn slow_camera_violates_the_detector_requirement() {
    let ontology = demo::ontology();
    let src = source();
    let mut skill = body(&src, "detection_skill");
    skill.instances.insert("camera".into(), "orbis_depth25_wrapper".into());
    let report = validate_skill(&ontology, &src, &skill).unwrap();
    assert_eq!(report.errors.len(), 1);
    match &report.errors[0] {
        SkillIssue::RequirementViolation { requirer, provider, constraint, observed, .. } => {
            assert_eq!((requirer.as_str(), provider.as_str()), ("detector", "camera"));
            assert_eq!(constraint.to_string(), "RGBD-Camera_Wrapper.FPS > 30.0");
            assert_eq!(*observed, Some(Decimal::from_int(25)));
        }
        other => panic!("{other:?}"),
    }
    // The same camera nested two levels down is caught too.
    let mut nested = body(&src, "door_pressing_skill");
    let mut slow = (*src["detection_skill"]).clone();
    slow.id = "slow_detection_skill".into();
    slow.skill_body = Some(skill);
    let src = with(src, slow);
    nested.instances.insert("detection".into(), "slow_detection_skill".into());
    let report = validate_skill(&ontology, &src, &nested).unwrap();
    assert_eq!(codes(&report.errors), ["requirementViolation"]);
    assert!(matches!(&report.errors[0], SkillIssue::RequirementViolation { requirer, .. } if requirer == "detection/detector"));
}

#[test]
fn wiring_errors_are_collected() {
    let ontology = demo::ontology();
    let src = source();
    let mut g = SkillGraph::new()
        .with_instance("scanner", "acme_lms4000_wrapper")
        .with_instance("cam", "orbis_depth60_wrapper")
        .with_instance("loc", "amcl_localization")
        .with_instance("exec", "trajectory_executor")
        .with_instance("exec2", "trajectory_executor")
        .with_instance("coord", "sequence_coordinator");
    g.coordinator = Some("loc".into());
    let link = |f: (&str, &str), t: (&str, &str)| semreg_core::skill::Connection { from: ep(f.0, f.1), to: ep(t.0, t.1) };
    g.connections = vec![
        link(("cam", "image"), ("loc", "scan")),
        link(("scanner", "scan"), ("loc", "scan")),
        link(("scanner", "scan"), ("loc", "scan")),
        link(("ghost", "x"), ("loc", "scan")),
        link(("exec", "execute"), ("coord", "execute")),
        link(("exec2", "execute"), ("coord", "execute")),
        link(("scanner", "bogus"), ("loc", "scan")),
    ];
    let report = validate_skill(&ontology, &src, &g).unwrap();
    let errs: BTreeSet<String> = codes(&report.errors).into_iter().collect();
    for code in [
        "invalidCoordinator",
        "typeMismatch",
        "duplicateConnection",
        "unknownInstance",
        "unknownEndpoint",
        "multiplicityViolation",
        "unboundRequires",
    ] {
        assert!(errs.contains(code), "{code} missing: {errs:?}");
    }
    assert!(report.errors.iter().all(|e| e.is_connection_error()));
    assert!(codes(&report.warnings).contains(&"unconnectedProvides".to_string()));
}

#[test]
fn nesting_cycle_is_reported() {
    let ontology = demo::ontology();
    let mut a = (*source()["detection_skill"]).clone();
    a.id = "loop_a".into();
    let mut b = a.clone();
    b.id = "loop_b".into();
    a.skill_body.as_mut().unwrap().instances.insert("inner".into(), "loop_b".into());
    b.skill_body.as_mut().unwrap().instances.insert("inner".into(), "loop_a".into());
    let src = with(with(source(), a.clone()), b);
    let report = validate_skill_record(&ontology, &src, &a).unwrap();
    assert_eq!(
        report.errors,
        [SkillIssue::NestingCycle { path: vec!["loop_a".into(), "loop_b".into(), "loop_a".into()] }]
    );
    let mut selfish = (*src["detection_skill"]).clone();
    selfish.id = "selfish".into();
    selfish.skill_body.as_mut().unwrap().instances.insert("me".into(), "selfish".into());
    let src = with(src, selfish.clone());
    assert!(matches!(
        flatten_record(&selfish, &src),
        Err(SkillError::CycleDetected { path }) if path == ["selfish", "selfish"]
    ));
}

#[test]
fn flatten_leaves_flat_skills_unchanged() {
    let src = source();
    let g = body(&src, "localization_skill");
    assert_eq!(flatten(&g, &src).unwrap(), g);
}

#[test]
fn flatten_door_pressing() {
    let src = source();
    let flat = flatten(&body(&src, "door_pressing_skill"), &src).unwrap();
    let leaves: Vec<&str> = flat.instances.keys().map(String::as_str).collect();
    assert_eq!(
        leaves,
        [
            "coordinator",
            "detection/camera",
            "detection/detector",
            "localization/localizer",
            "localization/scanner",
            "safety/monitor",
            "safety/plc",
            "teach_in/joystick",
            "teach_in/panel",
            "trajectory/arm",
            "trajectory/executor",
        ]
    );
    assert!(flat.instances.values().all(|id| src[id].kind != ComponentKind::Skill));
    let links: BTreeSet<(String, String)> = flat
        .connections
        .iter()
        .map(|c| (c.from.to_string(), c.to.to_string()))
        .collect();
    for (f, t) in [
        ("detection/detector.object_detected", "coordinator.detections"),
        ("teach_in/panel.taught_pose", "trajectory/executor.target"),
        ("trajectory/executor.execute", "teach_in/panel.execute"),
        ("detection/camera.image", "detection/detector.image"),
    ] {
        assert!(links.contains(&(f.to_string(), t.to_string())), "{f} -> {t} in {links:?}");
    }
    assert_eq!(flat.connections.len(), 12);
    assert_eq!(flat.parameters["detection/detector"]["model_path"], "models/doors.onnx");
    assert_eq!(flat.parameters["trajectory/executor"]["velocity_scaling"], 0.5);
    // Flattening is idempotent.
    assert_eq!(flatten(&flat, &src).unwrap(), flat);
}

#[test]
fn unresolved_record_is_an_error() {
    let ontology = demo::ontology();
    let g = SkillGraph::new().with_instance("x", "missing_record");
    assert!(matches!(
        validate_skill(&ontology, &source(), &g),
        Err(SkillError::UnresolvedReference { .. })
    ));
}

#[test]
fn solution_for_door_pressing() {
    let ontology = demo::ontology();
    let src = source();
    let g = body(&src, "door_pressing_skill");
    let sol = parameterize(&ontology, &src, &g, &BTreeMap::new()).unwrap();
    assert_eq!(sol.resolved_versions.len(), 11);
    assert_eq!(sol.resolved_versions["detection/detector"].record, "ravision_detector");
    assert_eq!(sol.resolved_versions["detection/detector"].version, "1.4.2");
    let json = sol.to_json();
    assert_eq!(SolutionDescriptor::from_json(&json).unwrap(), sol);
    // Overrides win over skill defaults.
    let over = BTreeMap::from([(
        "localization/localizer".to_string(),
        BTreeMap::from([("max_particles".to_string(), serde_json::json!(2000))]),
    )]);
    let sol = parameterize(&ontology, &src, &g, &over).unwrap();
    assert_eq!(sol.skill.parameters["localization/localizer"]["max_particles"], 2000);
}

#[test]
fn solution_errors() {
    let ontology = demo::ontology();
    let src = source();
    let mut g = body(&src, "door_pressing_skill");
    g.parameters.remove("detection");
    assert_eq!(
        parameterize(&ontology, &src, &g, &BTreeMap::new()),
        Err(SolutionError::UnboundParameter { missing: vec!["detection/detector.model_path".into()] })
    );
    let stray = BTreeMap::from([("nobody".to_string(), BTreeMap::from([("k".to_string(), serde_json::json!(1))]))]);
    assert_eq!(
        parameterize(&ontology, &src, &g, &stray),
        Err(SolutionError::UnknownParameterTarget { targets: vec!["nobody".into()] })
    );
    g.connections.clear();
    assert!(matches!(
        parameterize(&ontology, &src, &g, &BTreeMap::new()),
        Err(SolutionError::ValidationErrorsPresent { .. })
    ));
}

#[test]
fn skill_json_round_trip() {
    let src = source();
    for r in src.values().filter(|r| r.kind == ComponentKind::Skill) {
        let g = r.skill_body.clone().unwrap();
        assert_eq!(SkillGraph::from_json(&g.to_json()).unwrap(), g);
    }
}

#[test]
fn every_record_is_interchangeable_with_itself() {
    let ontology = demo::ontology();
    for r in demo::records() {
        let i = check_interchangeable(&ontology, &r, &r);
        assert!(i.interchangeable && i.reasons.is_empty(), "{}: {:?}", r.id, i.reasons);
    }
}

#[test]
fn localizers_are_interchangeable_one_way() {
    let ontology = demo::ontology();
    let amcl = demo::record("amcl_localization");
    let hector = demo::record("hector_localization");
    // hector asks for a faster scanner
    let forward = check_interchangeable(&ontology, &amcl, &hector);
    assert!(!forward.interchangeable);
    assert_eq!(forward.reasons.iter().map(|r| r.clause()).collect::<Vec<_>>(), ['d']);
    let back = check_interchangeable(&ontology, &hector, &amcl);
    assert!(back.interchangeable, "{:?}", back.reasons);
}

#[test]
fn interchange_clauses() {
    let ontology = demo::ontology();
    let amcl = demo::record("amcl_localization");
    let mut r = amcl.clone();
    r.id = "variant".into();
    r.sw_types = vec!["Localization".into()];
    r.non_type_specific.interfaces.retain(|i| i.direction == Direction::Requires);
    r.non_type_specific.interfaces.push(InterfaceSpec::new(
        InterfaceKind::Topic,
        Direction::Requires,
        "imu",
        "sensor_msgs/Imu",
    ));
    let i = check_interchangeable(&ontology, &amcl, &r);
    assert_eq!(
        i.reasons,
        [
            InterchangeReason::FunctionalityNotPreserved { sw_type: "TwoD".into() },
            InterchangeReason::MissingProvides {
                kind: InterfaceKind::Topic,
                message_type: "geometry_msgs/Pose2D".into()
            },
            InterchangeReason::ExtraRequires {
                kind: InterfaceKind::Topic,
                message_type: "sensor_msgs/Imu".into()
            },
        ]
    );
    // A requirement only the replacement states is flagged, not rejected.
    let mut detector = demo::record("ravision_detector");
    let mut strict = detector.clone();
    detector.requirements.clear();
    strict.id = "strict".into();
    let i = check_interchangeable(&ontology, &detector, &strict);
    assert!(i.interchangeable);
    assert_eq!(i.warnings.len(), 1);
}

#[test]
fn replacing_the_localizer_rebinds_endpoints() {
    let ontology = demo::ontology();
    let src = source();
    let g = body(&src, "localization_skill");
    let replaced = replace_instance(&g, "localizer", &src["amcl_localization"], &src["hector_localization"]);
    assert_eq!(replaced.instances["localizer"], "hector_localization");
    assert_eq!(replaced.connections[0].to.endpoint, "scan_in");
    assert_eq!(replaced.exports["pose"].endpoint, "pose_out");
    let report = validate_skill(&ontology, &src, &replaced).unwrap();
    assert!(report.is_clean(), "{:?}", report.errors);
    // With a 25 Hz scanner the stronger requirement bites.
    let mut slow = replaced.clone();
    slow.instances.insert("scanner".into(), "cobalt_cl25_wrapper".into());
    let report = validate_skill(&ontology, &src, &slow).unwrap();
    assert_eq!(codes(&report.errors), ["requirementViolation"]);
}

// Substitution soundness: a replacement judged interchangeable keeps a
// clean skill clean.
fn localizer(id: &str, threshold: i64, extra_provides: bool, extra: bool, two_d: bool) -> ComponentRecord {
    let mut r = demo::record("amcl_localization");
    r.id = id.into();
    r.requirements = vec![format!("LaserScanner.UpdateFrequencyInHz >= {threshold}").parse().unwrap()];
    if !two_d {
        r.sw_types = vec!["Localization".into()];
        r.non_type_specific.interfaces.retain(|i| i.direction == Direction::Requires);
    }
    if extra_provides {
        r.non_type_specific.interfaces.push(InterfaceSpec::new(
            InterfaceKind::Topic,
            Direction::Provides,
            "diag",
            "std_msgs/Bool",
        ));
    }
    if extra {
        r.non_type_specific.interfaces.push(InterfaceSpec::new(
            InterfaceKind::Topic,
            Direction::Requires,
            "trigger",
            "std_msgs/Bool",
        ));
    }
    r
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn interchangeable_replacement_keeps_skill_valid(
        laser in prop::sample::select(vec![
            "acme_lms4000_wrapper", "borealis_bx50_wrapper", "cobalt_cl25_wrapper",
            "dynaflex_ranger_wrapper", "acme_lms100_wrapper",
        ]),
        a in (0..60i64, any::<bool>(), any::<bool>(), any::<bool>()),
        b in (0..60i64, any::<bool>(), any::<bool>(), any::<bool>()),
    ) {
        let ontology = demo::ontology();
        let inc = localizer("inc", a.0, a.1, a.2, a.3);
        let rep = localizer("rep", b.0, b.1, b.2, b.3);
        let src = with(with(source(), inc.clone()), rep.clone());
        let mut g = SkillGraph::new().with_instance("scanner", laser).with_instance("loc", "inc");
        connect(&mut g, &src, ep("scanner", "scan"), ep("loc", "scan")).unwrap();
        if inc.interfaces().iter().any(|i| i.name == "trigger") {
            g = g.with_instance("plc", "safety_plc_wrapper");
            connect(&mut g, &src, ep("plc", "fields_clear"), ep("loc", "trigger")).unwrap();
        }
        let before = validate_skill(&ontology, &src, &g).unwrap();
        prop_assume!(before.is_clean());
        let verdict = check_interchangeable(&ontology, &inc, &rep);
        prop_assume!(verdict.interchangeable);
        let after = validate_skill(&ontology, &src, &replace_instance(&g, "loc", &inc, &rep)).unwrap();
        prop_assert!(after.is_clean(), "{:?}", after.errors);
    }
}

#[test]
fn store_is_a_record_source() {
    let ontology = demo::ontology();
    let store = demo::store();
    let src: &dyn RecordSource = &store;
    let door = src.record("door_pressing_skill").unwrap();
    assert!(validate_skill_record(&ontology, src, &door).unwrap().is_clean());
    let snap = store.snapshot();
    assert!(validate_skill_record(&ontology, &*snap, &door).unwrap().is_clean());
}
