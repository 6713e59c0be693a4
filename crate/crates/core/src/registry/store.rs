use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, OnceLock};

use parking_lot::{Mutex, RwLock};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ontology::ConceptExpression;
use crate::reasoner::{Reasoner, ReasonerError};
use crate::skill::RecordSource;

use super::index::SemanticIndex;
use super::record::{ComponentKind, ComponentRecord, Status};
use super::validate::{validate_record, Violation};
use super::{io_error, RegistryError};

pub const INDEX_FILE: &str = "index.bin";
pub const INDEX_FORMAT_VERSION: u8 = 1;
const RECORD_SUFFIX: &str = ".component.json";

/// Literal filters applied after the semantic pre-filter; all must hold.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct SearchFilters {
    pub status: Option<Status>,
    pub kind: Option<ComponentKind>,
    /// Some supported device has this manufacturer (case-insensitive).
    pub manufacturer: Option<String>,
    /// Some supported device has this model name (case-insensitive).
    pub model: Option<String>,
    /// Case-insensitive substring of the id, description, author or owner.
    pub text: Option<String>,
}

impl SearchFilters {
    pub fn matches(&self, r: &ComponentRecord) -> bool {
        let eq = |a: &str, b: &str| a.eq_ignore_ascii_case(b);
        self.status.is_none_or(|s| r.meta.status == s)
            && self.kind.is_none_or(|k| r.kind == k)
            && self.manufacturer.as_deref().is_none_or(|m| {
                r.supported_devices.iter().any(|d| eq(&d.manufacturer, m))
            })
            && self.model.as_deref().is_none_or(|m| {
                r.supported_devices.iter().any(|d| eq(&d.model_name, m))
            })
            && self.text.as_deref().is_none_or(|t| {
                let t = t.to_lowercase();
                [&r.id, &r.meta.description, &r.meta.author, &r.meta.owner]
                    .iter()
                    .any(|f| f.to_lowercase().contains(&t))
            })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    pub records: Vec<Arc<ComponentRecord>>,
    pub warnings: Vec<String>,
}

impl SearchResult {
    pub fn ids(&self) -> Vec<&str> {
        self.records.iter().map(|r| r.id.as_str()).collect()
    }
}

/// An immutable view of the store; readers keep using theirs while
/// writers publish new ones.
#[derive(Debug)]
pub struct Snapshot {
    ontology: Reasoner,
    records: BTreeMap<String, Arc<ComponentRecord>>,
    index: OnceLock<Result<Arc<SemanticIndex>, ReasonerError>>,
}

impl Snapshot {
    fn new(ontology: Reasoner, records: BTreeMap<String, Arc<ComponentRecord>>) -> Self {
        Snapshot {
            ontology,
            records,
            index: OnceLock::new(),
        }
    }

    pub fn ontology(&self) -> &Reasoner {
        &self.ontology
    }

    pub fn get(&self, id: &str) -> Option<&Arc<ComponentRecord>> {
        self.records.get(id)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// All records in ranking order.
    pub fn list(&self) -> Vec<Arc<ComponentRecord>> {
        let mut out: Vec<_> = self.records.values().cloned().collect();
        out.sort_by(|a, b| a.rank_key().cmp(&b.rank_key()));
        out
    }

    pub fn records(&self) -> &BTreeMap<String, Arc<ComponentRecord>> {
        &self.records
    }

    /// The semantic index, built on first use.
    pub fn index(&self) -> Result<Arc<SemanticIndex>, RegistryError> {
        self.index
            .get_or_init(|| {
                SemanticIndex::build(self.ontology.tbox(), self.records.values().map(|r| &**r))
                    .map(Arc::new)
            })
            .clone()
            .map_err(RegistryError::from)
    }

    /// Records subsumed by `query` (all records if none) that pass
    /// `filters`, in ranking order.
    pub fn search(
        &self,
        query: Option<&ConceptExpression>,
        filters: &SearchFilters,
    ) -> Result<SearchResult, RegistryError> {
        let (candidates, warnings) = match query {
            Some(q) => {
                self.ontology
                    .tbox()
                    .check_expression(q)
                    .map_err(ReasonerError::from)?;
                let (ids, warnings) = self.index()?.query(q)?;
                let records = ids.iter().filter_map(|id| self.records.get(id).cloned()).collect();
                (records, warnings)
            }
            None => (self.records.values().cloned().collect::<Vec<_>>(), Vec::new()),
        };
        let mut records: Vec<_> = candidates.into_iter().filter(|r| filters.matches(r)).collect();
        records.sort_by(|a, b| a.rank_key().cmp(&b.rank_key()));
        Ok(SearchResult { records, warnings })
    }

    /// Records that no longer validate against the ontology, with why.
    pub fn revalidate(&self) -> Vec<(String, Vec<Violation>)> {
        self.records
            .values()
            .filter_map(|r| {
                let v = validate_record(&self.ontology, r);
                (!v.is_empty()).then(|| (r.id.clone(), v))
            })
            .collect()
    }
}

impl RecordSource for Snapshot {
    fn record(&self, id: &str) -> Option<Arc<ComponentRecord>> {
        self.records.get(id).cloned()
    }
}

/// Record store: one `<id>.component.json` per record in a directory plus a
/// rebuildable `index.bin` cache. Single writer, many readers.
#[derive(Debug)]
pub struct Store {
    dir: Option<PathBuf>,
    current: RwLock<Arc<Snapshot>>,
    writer: Mutex<()>,
    index_rebuilt: bool,
}

fn record_path(dir: &Path, id: &str) -> PathBuf {
    dir.join(format!("{id}{RECORD_SUFFIX}"))
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), RegistryError> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes).map_err(|e| io_error(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_error(path, e))
}

fn status_code(s: Status) -> u8 {
    Status::ALL.iter().position(|x| *x == s).unwrap_or(0) as u8
}

fn kind_code(k: ComponentKind) -> u8 {
    ComponentKind::ALL.iter().position(|x| *x == k).unwrap_or(0) as u8
}

/// `index.bin`: version byte, u32 count, then per record (sorted by id)
/// u16 id length, id bytes, SHA-256 of the record file, status and kind.
fn encode_index(records: &BTreeMap<String, Arc<ComponentRecord>>) -> Vec<u8> {
    let mut out = vec![INDEX_FORMAT_VERSION];
    out.extend_from_slice(&(records.len() as u32).to_le_bytes());
    for (id, r) in records {
        out.extend_from_slice(&(id.len() as u16).to_le_bytes());
        out.extend_from_slice(id.as_bytes());
        out.extend_from_slice(&Sha256::digest(r.to_json().as_bytes()));
        out.push(status_code(r.meta.status));
        out.push(kind_code(r.kind));
    }
    out
}

impl Store {
    /// A store that keeps records only in memory.
    pub fn in_memory(ontology: Reasoner) -> Self {
        Store {
            dir: None,
            current: RwLock::new(Arc::new(Snapshot::new(ontology, BTreeMap::new()))),
            writer: Mutex::new(()),
            index_rebuilt: false,
        }
    }

    /// Opens (creating if needed) the store in `dir`. A missing, stale or
    /// unreadable `index.bin` is rewritten from the record files.
    pub fn open(dir: impl AsRef<Path>, ontology: Reasoner) -> Result<Self, RegistryError> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir).map_err(|e| io_error(&dir, e))?;
        let mut records = BTreeMap::new();
        let entries = fs::read_dir(&dir).map_err(|e| io_error(&dir, e))?;
        for entry in entries {
            let path = entry.map_err(|e| io_error(&dir, e))?.path();
            let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
                continue;
            };
            let Some(id) = name.strip_suffix(RECORD_SUFFIX) else {
                continue;
            };
            let text = fs::read_to_string(&path).map_err(|e| io_error(&path, e))?;
            let record = ComponentRecord::from_json(&text).map_err(|e| RegistryError::Corrupt {
                path: path.clone(),
                message: e.to_string(),
            })?;
            if record.id != id {
                return Err(RegistryError::Corrupt {
                    path,
                    message: format!("file holds record `{}`", record.id),
                });
            }
            records.insert(record.id.clone(), Arc::new(record));
        }

        let expected = encode_index(&records);
        let index_path = dir.join(INDEX_FILE);
        let stale = fs::read(&index_path).map_or(true, |bytes| bytes != expected);
        if stale {
            write_atomic(&index_path, &expected)?;
        }
        Ok(Store {
            dir: Some(dir),
            current: RwLock::new(Arc::new(Snapshot::new(ontology, records))),
            writer: Mutex::new(()),
            index_rebuilt: stale,
        })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// Whether [`Store::open`] had to rewrite `index.bin`.
    pub fn index_was_rebuilt(&self) -> bool {
        self.index_rebuilt
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.current.read().clone()
    }

    pub fn ontology(&self) -> Reasoner {
        self.snapshot().ontology.clone()
    }

    pub fn get(&self, id: &str) -> Option<Arc<ComponentRecord>> {
        self.snapshot().get(id).cloned()
    }

    pub fn search(
        &self,
        query: Option<&ConceptExpression>,
        filters: &SearchFilters,
    ) -> Result<SearchResult, RegistryError> {
        self.snapshot().search(query, filters)
    }

    // Applies `change` to a copy of the records, persists, then publishes.
    fn mutate<T>(
        &self,
        change: impl FnOnce(
            &Reasoner,
            &mut BTreeMap<String, Arc<ComponentRecord>>,
        ) -> Result<(T, Option<String>, Option<String>), RegistryError>,
    ) -> Result<T, RegistryError> {
        let _guard = self.writer.lock();
        let base = self.snapshot();
        let mut records = base.records.clone();
        let (out, written, removed) = change(&base.ontology, &mut records)?;
        if let Some(dir) = &self.dir {
            if let Some(id) = written {
                write_atomic(&record_path(dir, &id), records[&id].to_json().as_bytes())?;
            }
            if let Some(id) = removed {
                let path = record_path(dir, &id);
                fs::remove_file(&path).map_err(|e| io_error(&path, e))?;
            }
            write_atomic(&dir.join(INDEX_FILE), &encode_index(&records))?;
        }
        *self.current.write() = Arc::new(Snapshot::new(base.ontology.clone(), records));
        Ok(out)
    }

    /// Validates and stores `record`, returning its id.
    pub fn add_component(&self, record: ComponentRecord) -> Result<String, RegistryError> {
        self.mutate(|ontology, records| {
            if records.contains_key(&record.id) {
                return Err(RegistryError::DuplicateId(record.id.clone()));
            }
            let violations = validate_record(ontology, &record);
            if !violations.is_empty() {
                return Err(RegistryError::ValidationFailed {
                    id: record.id.clone(),
                    violations,
                });
            }
            let id = record.id.clone();
            records.insert(id.clone(), Arc::new(record));
            Ok((id.clone(), Some(id), None))
        })
    }

    pub fn remove_component(&self, id: &str) -> Result<Arc<ComponentRecord>, RegistryError> {
        self.mutate(|_, records| {
            let r = records
                .remove(id)
                .ok_or_else(|| RegistryError::NotFound(id.to_string()))?;
            Ok((r, None, Some(id.to_string())))
        })
    }

    /// Moves a record one step along Model → Prototype → Released.
    pub fn set_status(&self, id: &str, status: Status) -> Result<Arc<ComponentRecord>, RegistryError> {
        self.mutate(|_, records| {
            let current = records
                .get(id)
                .ok_or_else(|| RegistryError::NotFound(id.to_string()))?;
            let from = current.meta.status;
            if from.next() != Some(status) {
                return Err(RegistryError::IllegalTransition { from, to: status });
            }
            let mut updated = (**current).clone();
            updated.meta.status = status;
            let updated = Arc::new(updated);
            records.insert(id.to_string(), updated.clone());
            Ok((updated, Some(id.to_string()), None))
        })
    }
}

impl RecordSource for Store {
    fn record(&self, id: &str) -> Option<Arc<ComponentRecord>> {
        self.get(id)
    }
}
