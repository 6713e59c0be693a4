use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use serde_json::{json, Value};

use semreg_core::api::{self, CompatibilityRequest, QueryRequest};
use semreg_core::registry::{load_ontology_files, SearchFilters, Store};

const SCANNER_QUERY: &str = "and(HAComponent, some(supportsDevice, and(LaserScanner, attr(UpdateFrequencyInHz, >=, 30), some(hasAttribute, MeasuredReflectance))))";

fn demo() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../demo")
}

fn ontology_dir() -> String {
    demo().join("ontology").display().to_string()
}

/// A scratch copy of the demo store.
fn scratch_store() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for entry in std::fs::read_dir(demo().join("store")).unwrap() {
        let p = entry.unwrap().path();
        if p.to_string_lossy().ends_with(".component.json") {
            std::fs::copy(&p, dir.path().join(p.file_name().unwrap())).unwrap();
        }
    }
    dir
}

struct Run {
    code: u8,
    out: String,
    err: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.out).unwrap_or_else(|e| panic!("{e}: {}", self.out))
    }
    fn err_json(&self) -> Value {
        serde_json::from_str(&self.err).unwrap_or_else(|e| panic!("{e}: {}", self.err))
    }
}

fn run(args: &[&str]) -> Run {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("semreg").chain(args.iter().copied());
    let code = semreg_cli::run(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn in_memory(store_dir: &Path) -> Store {
    let mut files: Vec<PathBuf> = std::fs::read_dir(demo().join("ontology"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    Store::open(store_dir, load_ontology_files(&files).unwrap()).unwrap()
}

#[test]
fn no_arguments_prints_usage() {
    let r = run(&[]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("Usage"));
    assert!(r.out.is_empty());
    let r = run(&["--help"]);
    assert_eq!(r.code, 0);
    assert!(r.out.contains("ontology"));
    let r = run(&["frobnicate"]);
    assert_eq!(r.code, 2);
}

#[test]
fn classify_reports_the_derived_capability() {
    let r = run(&["ontology", "classify", &ontology_dir()]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.lines().any(|l| l == "ObjectDetectionType ⊑ ∃hasCapability.PerceptionCapability"));
    let r = run(&["--format", "json", "ontology", "classify", &ontology_dir()]);
    let derived = json!({ "sub": "ObjectDetectionType", "role": "hasCapability", "filler": "PerceptionCapability" });
    assert!(r.json()["existentials"].as_array().unwrap().contains(&derived));
}

#[test]
fn ontology_check_exit_codes() {
    let r = run(&["ontology", "check", &ontology_dir()]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains("all concepts satisfiable"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.rdsl");
    std::fs::write(&bad, "concept A\nattribute hz : int\naxiom A SubClassOf and(attr(hz, >=, 5), attr(hz, <, 3))\n").unwrap();
    let r = run(&["--format", "json", "ontology", "check", bad.to_str().unwrap()]);
    assert_eq!(r.code, 1);
    assert!(r.json()["unsatisfiable"].as_array().unwrap().contains(&json!("A")));

    std::fs::write(&bad, "concept A\naxiom A SubClassOf B\n").unwrap();
    let r = run(&["--format", "json", "ontology", "check", bad.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert_eq!(r.err_json()["code"], "undeclaredIdentifier");
    std::fs::write(&bad, "concept A\naxiom A SubClassOf\n").unwrap();
    let r = run(&["ontology", "check", bad.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert!(r.err.starts_with("error[parseError]"), "{}", r.err);

    let r = run(&["ontology", "check", "/definitely/not/here.rdsl"]);
    assert_eq!(r.code, 2);
}

#[test]
fn scanner_query_from_the_command_line() {
    let store = scratch_store();
    let s = store.path().to_str().unwrap();
    let r = run(&["--format", "json", "query", &ontology_dir(), "--store", s, "--expr", SCANNER_QUERY]);
    assert_eq!(r.code, 0, "{}", r.err);
    let page = r.json();
    let ids: Vec<&str> = page["components"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["id"].as_str().unwrap())
        .collect();
    assert_eq!(ids, ["acme_lms4000_wrapper", "borealis_bx50_wrapper"]);
    let r = run(&["--format", "json", "query", &ontology_dir(), "--store", s, "--expr", SCANNER_QUERY, "--manufacturer", "Acme"]);
    assert_eq!(r.json()["total"], 1);
    let r = run(&["query", &ontology_dir(), "--store", s, "--expr", SCANNER_QUERY]);
    assert!(r.out.contains("acme_lms4000_wrapper"));
    assert!(r.out.ends_with("2 of 2 component(s)\n"), "{}", r.out);
    // Without a store there is nothing to find; the expression is still checked.
    let r = run(&["--format", "json", "query", &ontology_dir(), "--expr", SCANNER_QUERY]);
    assert_eq!(r.json()["total"], 0);
    let r = run(&["query", &ontology_dir(), "--expr", "NoSuchType"]);
    assert_eq!(r.code, 2);
}

#[test]
fn json_output_is_stable_and_matches_the_api() {
    let store = scratch_store();
    let s = store.path().to_str().unwrap();
    let args = ["--format", "json", "query", &ontology_dir(), "--store", s, "--expr", SCANNER_QUERY];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.out, second.out);

    // The HTTP API answers with serde_json of the same shared operations.
    let direct = in_memory(store.path());
    let request = QueryRequest {
        expression: Some(SCANNER_QUERY.into()),
        filters: SearchFilters::default(),
        offset: 0,
        limit: None,
    };
    let expected = serde_json::to_value(api::query(&direct.snapshot(), &request).unwrap()).unwrap();
    assert_eq!(first.json(), expected);

    let r = run(&["--format", "json", "compat", "ravision_detector", "orbis_depth25_wrapper", "-O", &ontology_dir(), "--store", s]);
    let request = CompatibilityRequest { requirer: "ravision_detector".into(), provider: "orbis_depth25_wrapper".into() };
    let expected = serde_json::to_value(api::compatibility(&direct.snapshot(), &request).unwrap()).unwrap();
    assert_eq!(r.json(), expected);
    assert_eq!(r.code, 1);
}

#[test]
fn store_comes_from_the_environment() {
    let store = scratch_store();
    let bin = env!("CARGO_BIN_EXE_semreg");
    let output = Command::new(bin)
        .args(["--format", "json", "component", "show", "amcl_localization", "-O", &ontology_dir()])
        .env("SEMREG_STORE", store.path())
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let record: Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(record["swTypes"], json!(["Localization", "TwoD"]));
    let output = Command::new(bin)
        .args(["component", "show", "amcl_localization", "-O", &ontology_dir()])
        .env_remove("SEMREG_STORE")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn component_lifecycle() {
    let store = scratch_store();
    let s = store.path().to_str().unwrap();
    let o = ontology_dir();

    let r = run(&["--format", "json", "component", "draft", "Localization", "TwoD", "-O", &o]);
    assert_eq!(r.code, 0, "{}", r.err);
    let mut draft = r.json();
    let work = tempfile::tempdir().unwrap();
    let file = work.path().join("draft.json");
    std::fs::write(&file, draft.to_string()).unwrap();
    let f = file.to_str().unwrap();
    let r = run(&["component", "validate", f, "-O", &o]);
    assert_eq!(r.code, 1);
    assert!(r.out.contains("violation(s)"));

    draft["id"] = json!("my_localizer");
    draft["meta"]["author"] = json!("Ada");
    draft["meta"]["owner"] = json!("lab");
    draft["meta"]["description"] = json!("draft made whole");
    draft["meta"]["version"] = json!("0.1.0");
    draft["meta"]["createdAt"] = json!("2026-01-01T00:00:00Z");
    std::fs::write(&file, draft.to_string()).unwrap();
    let r = run(&["component", "validate", f, "-O", &o]);
    assert_eq!(r.code, 0, "{}", r.out);
    let r = run(&["--format", "json", "component", "add", f, "-O", &o, "--store", s]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(r.json(), json!({ "id": "my_localizer" }));
    assert!(store.path().join("my_localizer.component.json").exists());
    let r = run(&["--format", "json", "component", "add", f, "-O", &o, "--store", s]);
    assert_eq!(r.code, 1);
    assert_eq!(r.err_json()["code"], "duplicateId");

    let r = run(&["component", "status", "my_localizer", "Released", "-O", &o, "--store", s]);
    assert_eq!(r.code, 1);
    let r = run(&["--format", "json", "component", "status", "my_localizer", "Prototype", "-O", &o, "--store", s]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(r.json()["meta"]["status"], "Prototype");
    let r = run(&["component", "show", "nobody", "-O", &o, "--store", s]);
    assert_eq!(r.code, 2);
    assert!(r.err.starts_with("error[notFound]"));

    let r = run(&["--format", "json", "component", "add", "/no/such/file.json", "-O", &o, "--store", s]);
    assert_eq!(r.code, 2);
    std::fs::write(&file, "{ nope").unwrap();
    let r = run(&["--format", "json", "component", "validate", f, "-O", &o]);
    assert_eq!(r.code, 2);
    assert_eq!(r.err_json()["code"], "parseError");
}

#[test]
fn codegen_commands() {
    let store = scratch_store();
    let s = store.path().to_str().unwrap();
    let o = ontology_dir();
    let r = run(&["component", "skeleton", "ravision_detector", "-O", &o, "--store", s]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.starts_with("package ravision_detector\n"));
    assert!(r.out.contains("on_message_image"));
    let r = run(&["component", "manifest", "ravision_detector", "-O", &o, "--store", s]);
    assert!(r.out.contains("<depend>sensor_msgs</depend>"));
    let file = store.path().join("ravision_detector.component.json");
    let by_file = run(&["component", "manifest", file.to_str().unwrap(), "-O", &o]);
    assert_eq!(by_file.out, r.out);
    let r = run(&["--format", "json", "component", "manifest", "ravision_detector", "-O", &o, "--store", s]);
    assert!(r.json().as_str().unwrap().starts_with("<?xml"));
}

#[test]
fn skill_commands() {
    let store = scratch_store();
    let s = store.path().to_str().unwrap();
    let o = ontology_dir();
    let r = run(&["skill", "validate", "door_pressing_skill", "-O", &o, "--store", s]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.ends_with("0 error(s), 0 warning(s)\n"), "{}", r.out);

    let mistyped = demo().join("skills/mistyped_localization.skill.json");
    let r = run(&["--format", "json", "skill", "validate", mistyped.to_str().unwrap(), "-O", &o, "--store", s]);
    assert_eq!(r.code, 1);
    assert_eq!(r.json()["errors"][0]["code"], "typeMismatch");

    let r = run(&["--format", "json", "skill", "flatten", "door_pressing_skill", "-O", &o, "--store", s]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json()["instances"].as_object().unwrap().len(), 11);

    let r = run(&["--format", "json", "skill", "solution", "detection_skill", "-O", &o, "--store", s]);
    assert_eq!(r.code, 1);
    assert_eq!(r.err_json()["code"], "unboundParameter");
    let r = run(&[
        "--format", "json", "skill", "solution", "detection_skill", "--param", "detector.model_path=/m.onnx", "-O", &o, "--store", s,
    ]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(r.json()["parameters"]["detector"]["model_path"], "/m.onnx");
    let r = run(&["skill", "solution", "detection_skill", "--param", "garbage", "-O", &o, "--store", s]);
    assert_eq!(r.code, 2);

    let slow = demo().join("skills/slow_camera_detection.skill.json");
    let r = run(&["--format", "json", "skill", "solution", slow.to_str().unwrap(), "-O", &o, "--store", s]);
    assert_eq!(r.code, 1);
    assert_eq!(r.err_json()["code"], "skillInvalid");
    assert_eq!(r.err_json()["details"][0]["code"], "requirementViolation");
}

#[test]
fn compat_table() {
    let store = scratch_store();
    let s = store.path().to_str().unwrap();
    let r = run(&["compat", "ravision_detector", "orbis_depth60_wrapper", "-O", &ontology_dir(), "--store", s]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.ends_with("compatible: yes\n"));
    let r = run(&["compat", "ravision_detector", "ghost", "-O", &ontology_dir(), "--store", s]);
    assert_eq!(r.code, 2);
}

#[test]
fn internal_failures_exit_3() {
    let store = scratch_store();
    let r = run(&["serve", "--bind", "not-an-address", "-O", &ontology_dir(), "--store", store.path().to_str().unwrap()]);
    assert_eq!(r.code, 3);
    assert!(r.err.starts_with("error[internal]"), "{}", r.err);
}

#[test]
fn serve_answers_http() {
    let store = scratch_store();
    let mut child = Command::new(env!("CARGO_BIN_EXE_semreg"))
        .args(["serve", "--bind", "127.0.0.1:0", "-O", &ontology_dir()])
        .env("SEMREG_STORE", store.path())
        .stderr(Stdio::piped())
        .stdout(Stdio::null())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stderr.take().unwrap()).read_line(&mut line).unwrap();
    let addr = line.trim().strip_prefix("listening on http://").unwrap_or_else(|| panic!("{line}")).to_string();

    let body = json!({ "expression": SCANNER_QUERY }).to_string();
    let mut conn = TcpStream::connect(&addr).unwrap();
    write!(
        conn,
        "POST /api/query HTTP/1.1\r\nHost: {addr}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
        body.len()
    )
    .unwrap();
    let mut response = String::new();
    conn.read_to_string(&mut response).unwrap();
    child.kill().unwrap();
    let _ = child.wait();

    assert!(response.starts_with("HTTP/1.1 200"), "{response}");
    let payload = response.split("\r\n\r\n").nth(1).unwrap();
    let cli = run(&["--format", "json", "query", &ontology_dir(), "--store", store.path().to_str().unwrap(), "--expr", SCANNER_QUERY]);
    let from_http: Value = serde_json::from_str(payload).unwrap();
    assert_eq!(from_http, cli.json());
}
