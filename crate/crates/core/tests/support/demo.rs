use std::path::{Path, PathBuf};

use semreg_core::reasoner::Reasoner;
use semreg_core::registry::{load_ontology_files, ComponentRecord, Store};

pub fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../demo")
}

pub fn ontology_files() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(root().join("ontology"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "rdsl"))
        .collect();
    files.sort();
    files
}

pub fn ontology() -> Reasoner {
    load_ontology_files(&ontology_files()).expect("demo ontology loads")
}

pub fn records() -> Vec<ComponentRecord> {
    let mut out: Vec<ComponentRecord> = std::fs::read_dir(root().join("store"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.to_string_lossy().ends_with(".component.json"))
        .map(|p| ComponentRecord::from_json(&std::fs::read_to_string(&p).unwrap()).unwrap())
        .collect();
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}

pub fn record(id: &str) -> ComponentRecord {
    records().into_iter().find(|r| r.id == id).unwrap_or_else(|| panic!("no demo record {id}"))
}

/// In-memory store holding every demo record.
pub fn store() -> Store {
    let store = Store::in_memory(ontology());
    for r in records() {
        store.add_component(r).unwrap();
    }
    store
}
