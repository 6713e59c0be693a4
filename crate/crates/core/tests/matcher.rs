mod support;

use proptest::prelude::*;
use semreg_core::decimal::Decimal;
use semreg_core::matcher::{
    check_compatibility, filter_candidates, filter_candidates_verbose, parse_requirement,
    RequirementConstraint, RequirementError, Verdict, ATTRIBUTE_UNKNOWN,
};
use semreg_core::ontology::CompareOp;
use semreg_core::registry::{AttributeValue, ComponentRecord, SearchFilters, Store};
use support::demo;

fn d(s: &str) -> Decimal {
    s.parse().unwrap()
}

fn with_fps(id: &str, fps: &str) -> ComponentRecord {
    let mut r = demo::record("orbis_depth60_wrapper");
    r.id = id.into();
    for a in &mut r.non_type_specific.attributes {
        if a.attribute == "FPS" {
            a.value = d(fps);
        }
    }
    r
}

#[test]
fn camera_frame_rate_boundary() {
    let ontology = demo::ontology();
    let detector = demo::record("ravision_detector");
    for (fps, ok) in [("60", true), ("31", true), ("30.01", true), ("30", false), ("30.0", false), ("25", false)] {
        let cam = with_fps("cam", fps);
        let report = check_compatibility(&ontology, &detector, &cam);
        assert_eq!(report.compatible, ok, "fps {fps}");
        assert_eq!(report.checks.len(), 1);
        assert_eq!(report.checks[0].observed, Some(d(fps)));
        assert_eq!(report.checks[0].subject.device, None);
        assert!(report.not_applicable.is_empty());
    }
}

#[test]
fn demo_cameras() {
    let ontology = demo::ontology();
    let detector = demo::record("ravision_detector");
    let cams: Vec<_> = ["orbis_depth25_wrapper", "orbis_depth30_wrapper", "orbis_depth60_wrapper"]
        .into_iter()
        .map(demo::record)
        .collect();
    let ok: Vec<_> = filter_candidates(&ontology, &detector, &cams)
        .into_iter()
        .map(|(r, _)| r.id.as_str())
        .collect();
    assert_eq!(ok, ["orbis_depth60_wrapper"]);
}

#[test]
fn laser_frequency_checks_each_device() {
    let ontology = demo::ontology();
    let amcl = demo::record("amcl_localization");
    let records = demo::records();
    let lasers: Vec<_> = records
        .iter()
        .filter(|r| r.supported_devices.iter().any(|d| d.hw_types.iter().any(|t| t == "LaserScanner")))
        .collect();
    assert_eq!(lasers.len(), 5);
    let verbose = filter_candidates_verbose(&ontology, &amcl, lasers.iter().copied());
    assert_eq!(verbose.len(), 5);
    for (r, report) in &verbose {
        // The oracle: every laser device states a frequency of at least 30.
        let expected = r
            .supported_devices
            .iter()
            .filter(|d| d.hw_types.iter().any(|t| t == "LaserScanner"))
            .all(|d| d.attribute("UpdateFrequencyInHz").is_some_and(|v| v >= Decimal::from_int(30)));
        assert_eq!(report.compatible, expected, "{}", r.id);
        assert!(report.checks.iter().all(|c| c.subject.device.is_some()));
    }
    let ok: Vec<_> = filter_candidates(&ontology, &amcl, lasers.iter().copied())
        .into_iter()
        .map(|(r, _)| r.id.as_str())
        .collect();
    assert_eq!(ok, ["acme_lms4000_wrapper", "dynaflex_ranger_wrapper", "borealis_bx50_wrapper"]);
}

#[test]
fn missing_attribute_fails_with_a_note() {
    let ontology = demo::ontology();
    let amcl = demo::record("amcl_localization");
    let mut laser = demo::record("cobalt_cl25_wrapper");
    laser.supported_devices[0].attributes.retain(|a| a.attribute != "UpdateFrequencyInHz");
    let report = check_compatibility(&ontology, &amcl, &laser);
    assert!(!report.compatible);
    let fail = report.failures().next().unwrap();
    assert_eq!(fail.observed, None);
    assert_eq!(fail.note.as_deref(), Some(ATTRIBUTE_UNKNOWN));
    assert_eq!(fail.verdict, Verdict::Fail);
}

#[test]
fn record_attribute_serves_devices_without_one() {
    let ontology = demo::ontology();
    let amcl = demo::record("amcl_localization");
    let mut laser = demo::record("cobalt_cl25_wrapper");
    laser.supported_devices[0].attributes.retain(|a| a.attribute != "UpdateFrequencyInHz");
    laser
        .non_type_specific
        .attributes
        .push(AttributeValue::new("UpdateFrequencyInHz", Decimal::from_int(45)));
    let report = check_compatibility(&ontology, &amcl, &laser);
    assert!(report.compatible, "{report:?}");
}

#[test]
fn unrelated_provider_is_not_applicable() {
    let ontology = demo::ontology();
    let amcl = demo::record("amcl_localization");
    let cam = demo::record("orbis_depth60_wrapper");
    let report = check_compatibility(&ontology, &amcl, &cam);
    assert!(report.compatible);
    assert!(report.checks.is_empty());
    assert_eq!(report.not_applicable, amcl.requirements);
}

#[test]
fn no_requirements_is_vacuously_compatible() {
    let ontology = demo::ontology();
    let mapper = demo::record("grid_mapper");
    assert!(mapper.requirements.is_empty());
    for p in demo::records() {
        let report = check_compatibility(&ontology, &mapper, &p);
        assert!(report.compatible && report.checks.is_empty() && report.not_applicable.is_empty());
    }
}

#[test]
fn requirement_targets_follow_subsumption() {
    // Targeting a supertype reaches the subtype's records.
    let ontology = demo::ontology();
    let mut detector = demo::record("ravision_detector");
    detector.requirements = vec!["Camera_Wrapper.FPS >= 30".parse().unwrap()];
    let pool: Vec<_> = demo::records();
    let ok: Vec<_> = filter_candidates(&ontology, &detector, &pool)
        .into_iter()
        .filter(|(_, r)| !r.checks.is_empty())
        .map(|(r, _)| r.id.clone())
        .collect();
    assert_eq!(ok, ["orbis_depth60_wrapper", "orbis_depth30_wrapper"]);
}

#[test]
fn requirement_syntax() {
    let c = parse_requirement("  LaserScanner.UpdateFrequencyInHz>=30 ").unwrap();
    assert_eq!(c.target_type, "LaserScanner");
    assert_eq!(c.attribute, "UpdateFrequencyInHz");
    assert_eq!(c.op, CompareOp::Ge);
    assert_eq!(c.value, Decimal::from_int(30));
    assert_eq!(c.to_string(), "LaserScanner.UpdateFrequencyInHz >= 30");
    for op in ["<", "<=", "==", ">", ">="] {
        let text = format!("A.b {op} -1.25");
        assert_eq!(parse_requirement(&text).unwrap().to_string(), text);
    }
    for bad in ["", "A.b", "A.b >= x", "Ab >= 1", "A. >= 1", "1A.b >= 1", "A.b != 1"] {
        assert!(matches!(parse_requirement(bad), Err(RequirementError::Syntax { .. })), "{bad}");
    }
    let tbox = demo::ontology();
    assert!(matches!(
        RequirementConstraint::parse_in("Nope.FPS > 1", tbox.tbox()),
        Err(RequirementError::UndeclaredIdentifier { name }) if name == "Nope"
    ));
    let json = serde_json::to_string(&c).unwrap();
    assert_eq!(json, "\"LaserScanner.UpdateFrequencyInHz >= 30\"");
    assert_eq!(serde_json::from_str::<RequirementConstraint>(&json).unwrap(), c);
}

fn op() -> impl Strategy<Value = CompareOp> {
    prop_oneof![
        Just(CompareOp::Lt),
        Just(CompareOp::Le),
        Just(CompareOp::Eq),
        Just(CompareOp::Ge),
        Just(CompareOp::Gt),
    ]
}

fn laser(i: usize, hz: i64) -> ComponentRecord {
    let mut r = demo::record("acme_lms4000_wrapper");
    r.id = format!("laser{i}");
    r.supported_devices[0]
        .attributes
        .iter_mut()
        .find(|a| a.attribute == "UpdateFrequencyInHz")
        .unwrap()
        .value = Decimal::from_int(hz);
    r
}

/// Checks that the matcher, the semantic query for the same restriction and
/// plain arithmetic all accept the same providers.
fn agree(pool: Vec<ComponentRecord>, values: &[Decimal], requirement: String, query: String, op: CompareOp, value: Decimal)
    -> Result<(), TestCaseError>
{
    let ontology = demo::ontology();
    let mut requirer = demo::record("amcl_localization");
    requirer.requirements = vec![requirement.parse().unwrap()];
    let store = Store::in_memory(ontology.clone());
    for r in &pool {
        store.add_component(r.clone()).unwrap();
    }
    let by_matcher: Vec<String> = filter_candidates(&ontology, &requirer, &pool)
        .into_iter()
        .map(|(r, _)| r.id.clone())
        .collect();
    let found = store.search(Some(&ontology.parse(&query).unwrap()), &SearchFilters::default()).unwrap();
    let by_query: Vec<String> = found.ids().into_iter().map(str::to_string).collect();
    prop_assert_eq!(&by_matcher, &by_query);
    let mut expected: Vec<String> = pool
        .iter()
        .zip(values)
        .filter(|(_, v)| op.holds(**v, value))
        .map(|(r, _)| r.id.clone())
        .collect();
    expected.sort();
    let mut got = by_matcher;
    got.sort();
    prop_assert_eq!(got, expected);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn int_requirement_agrees_with_query(hzs in prop::collection::vec(1..80i64, 1..8), op in op(), t in 1..80i64) {
        let pool: Vec<_> = hzs.iter().enumerate().map(|(i, hz)| laser(i, *hz)).collect();
        let values: Vec<_> = hzs.iter().map(|h| Decimal::from_int(*h)).collect();
        let value = Decimal::from_int(t);
        agree(
            pool,
            &values,
            format!("LaserScanner.UpdateFrequencyInHz {} {value}", op.symbol()),
            format!("some(supportsDevice, and(LaserScanner, attr(UpdateFrequencyInHz, {}, {value})))", op.symbol()),
            op,
            value,
        )?;
    }

    #[test]
    fn decimal_requirement_agrees_with_query(
        fps in prop::collection::vec((1..80i64, 0..4i64), 1..8),
        op in op(),
        whole in 1..80i64,
        frac in 0..4i64,
    ) {
        // quarter steps make ties on the threshold common
        let value: Decimal = format!("{whole}.{:02}", frac * 25).parse().unwrap();
        let values: Vec<Decimal> = fps.iter().map(|(w, f)| format!("{w}.{:02}", f * 25).parse().unwrap()).collect();
        let pool: Vec<_> = values.iter().enumerate().map(|(i, v)| with_fps(&format!("cam{i}"), &v.to_string())).collect();
        agree(
            pool,
            &values,
            format!("RGBD-Camera_Wrapper.FPS {} {value}", op.symbol()),
            format!("and(RGBD-Camera_Wrapper, attr(FPS, {}, {value}))", op.symbol()),
            op,
            value,
        )?;
    }
}
