//! File-backed case store.
//!
//! Each case lives in its own directory as `case.json` (the case without its
//! audit trail, plus a version counter) and `audit.jsonl` (one audit record
//! per line, append-only). A write appends the new audit lines first and then
//! atomically replaces `case.json`; on load, audit lines beyond the committed
//! count are dropped, so a crash between the two steps rolls back cleanly.
//!
//! Writers to one case are serialized and must name the version they read.
//! Readers take the latest committed snapshot without waiting for writers.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use elens_core::model::{AssuranceCase, AuditRecord, SCHEMA_VERSION};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tokio::sync::Mutex;

use crate::error::ApiError;

const CASE_FILE: &str = "case.json";
const AUDIT_FILE: &str = "audit.jsonl";

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Corrupt { path: PathBuf, message: String },
    #[error("case `{0}` already exists")]
    Exists(String),
    #[error("unknown case `{0}`")]
    NotFound(String),
    #[error("case version is {current}, request expected {expected}")]
    VersionConflict { expected: u64, current: u64 },
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// A committed case state.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub version: u64,
    pub case: AssuranceCase,
}

/// On-disk document. Fields this version does not know are kept verbatim.
#[derive(Serialize, Deserialize)]
struct Document {
    schema_version: u32,
    version: u64,
    audit_len: usize,
    case: AssuranceCase,
    #[serde(flatten)]
    extra: serde_json::Map<String, serde_json::Value>,
}

struct Slot {
    dir: PathBuf,
    current: RwLock<Arc<Snapshot>>,
    extra: RwLock<serde_json::Map<String, serde_json::Value>>,
    writer: Mutex<()>,
}

impl Slot {
    fn snapshot(&self) -> Arc<Snapshot> {
        self.current.read().expect("snapshot lock").clone()
    }
}

pub struct FileStore {
    dir: PathBuf,
    cases: RwLock<BTreeMap<String, Arc<Slot>>>,
}

impl FileStore {
    /// Opens `dir`, creating it if needed, and loads every case in it.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(io(&dir))?;
        let mut cases = BTreeMap::new();
        for entry in fs::read_dir(&dir).map_err(io(&dir))? {
            let entry = entry.map_err(io(&dir))?;
            let path = entry.path();
            if !path.join(CASE_FILE).is_file() {
                continue;
            }
            let (snapshot, extra) = load(&path)?;
            cases.insert(
                snapshot.case.id().to_string(),
                Arc::new(Slot {
                    dir: path,
                    current: RwLock::new(Arc::new(snapshot)),
                    extra: RwLock::new(extra),
                    writer: Mutex::new(()),
                }),
            );
        }
        Ok(Self {
            dir,
            cases: RwLock::new(cases),
        })
    }

    fn slot(&self, id: &str) -> Result<Arc<Slot>, StoreError> {
        self.cases
            .read()
            .expect("case table lock")
            .get(id)
            .cloned()
            .ok_or_else(|| StoreError::NotFound(id.to_string()))
    }

    pub fn get(&self, id: &str) -> Result<Arc<Snapshot>, StoreError> {
        Ok(self.slot(id)?.snapshot())
    }

    pub fn list(&self) -> Vec<Arc<Snapshot>> {
        self.cases
            .read()
            .expect("case table lock")
            .values()
            .map(|s| s.snapshot())
            .collect()
    }

    /// Stores a new case at version 1.
    pub fn create(&self, case: AssuranceCase) -> Result<Arc<Snapshot>, StoreError> {
        let id = case.id().to_string();
        let mut cases = self.cases.write().expect("case table lock");
        if cases.contains_key(&id) {
            return Err(StoreError::Exists(id));
        }
        let dir = self.dir.join(&id);
        if dir.exists() {
            return Err(StoreError::Exists(id));
        }
        fs::create_dir_all(&dir).map_err(io(&dir))?;
        let snapshot = Snapshot { version: 1, case };
        let extra = serde_json::Map::new();
        commit(&dir, &snapshot, 0, &extra)?;
        let snapshot = Arc::new(snapshot);
        cases.insert(
            id,
            Arc::new(Slot {
                dir,
                current: RwLock::new(snapshot.clone()),
                extra: RwLock::new(extra),
                writer: Mutex::new(()),
            }),
        );
        Ok(snapshot)
    }

    /// Applies `change` to the case if its version is still `expected`. A
    /// change that appends no audit record leaves the version unchanged.
    pub async fn update<T>(
        &self,
        id: &str,
        expected: u64,
        change: impl FnOnce(&mut AssuranceCase) -> Result<T, ApiError>,
    ) -> Result<(T, Arc<Snapshot>), ApiError> {
        let slot = self.slot(id)?;
        let _guard = slot.writer.lock().await;
        let current = slot.snapshot();
        if current.version != expected {
            return Err(StoreError::VersionConflict {
                expected,
                current: current.version,
            }
            .into());
        }
        let mut case = current.case.clone();
        let value = change(&mut case)?;
        if case.audit().len() == current.case.audit().len() {
            return Ok((value, current));
        }
        let next = Snapshot {
            version: current.version + 1,
            case,
        };
        let extra = slot.extra.read().expect("extra lock").clone();
        commit(&slot.dir, &next, current.case.audit().len(), &extra)?;
        let next = Arc::new(next);
        *slot.current.write().expect("snapshot lock") = next.clone();
        Ok((value, next))
    }
}

fn commit(
    dir: &Path,
    snapshot: &Snapshot,
    committed_audit: usize,
    extra: &serde_json::Map<String, serde_json::Value>,
) -> Result<(), StoreError> {
    let audit_path = dir.join(AUDIT_FILE);
    let mut lines = Vec::new();
    for record in &snapshot.case.audit()[committed_audit..] {
        serde_json::to_writer(&mut lines, record).expect("audit record serializes");
        lines.push(b'\n');
    }
    let mut audit = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&audit_path)
        .map_err(io(&audit_path))?;
    audit.write_all(&lines).map_err(io(&audit_path))?;
    audit.sync_data().map_err(io(&audit_path))?;

    let mut case = snapshot.case.clone();
    let audit_len = case.take_audit().len();
    let doc = Document {
        schema_version: SCHEMA_VERSION,
        version: snapshot.version,
        audit_len,
        case,
        extra: extra.clone(),
    };
    let case_path = dir.join(CASE_FILE);
    let tmp = dir.join(format!("{CASE_FILE}.tmp"));
    let mut file = File::create(&tmp).map_err(io(&tmp))?;
    serde_json::to_writer_pretty(&mut file, &doc).expect("case serializes");
    file.write_all(b"\n").map_err(io(&tmp))?;
    file.sync_all().map_err(io(&tmp))?;
    fs::rename(&tmp, &case_path).map_err(io(&case_path))?;
    Ok(())
}

fn load(dir: &Path) -> Result<(Snapshot, serde_json::Map<String, serde_json::Value>), StoreError> {
    let case_path = dir.join(CASE_FILE);
    let text = fs::read_to_string(&case_path).map_err(io(&case_path))?;
    let doc: Document = serde_json::from_str(&text).map_err(|e| StoreError::Corrupt {
        path: case_path.clone(),
        message: e.to_string(),
    })?;
    if doc.schema_version > SCHEMA_VERSION {
        return Err(StoreError::Corrupt {
            path: case_path,
            message: format!("schema version {} is newer than {SCHEMA_VERSION}", doc.schema_version),
        });
    }
    let audit_path = dir.join(AUDIT_FILE);
    let mut audit: Vec<AuditRecord> = Vec::new();
    let mut uncommitted = false;
    if audit_path.exists() {
        let file = File::open(&audit_path).map_err(io(&audit_path))?;
        for (n, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(io(&audit_path))?;
            if audit.len() == doc.audit_len {
                uncommitted = true;
                break;
            }
            let record = serde_json::from_str(&line).map_err(|e| StoreError::Corrupt {
                path: audit_path.clone(),
                message: format!("line {}: {e}", n + 1),
            })?;
            audit.push(record);
        }
    }
    if audit.len() != doc.audit_len {
        return Err(StoreError::Corrupt {
            path: audit_path,
            message: format!("{} audit records, case expects {}", audit.len(), doc.audit_len),
        });
    }
    if uncommitted {
        let mut text = Vec::new();
        for record in &audit {
            serde_json::to_writer(&mut text, record).expect("audit record serializes");
            text.push(b'\n');
        }
        let tmp = dir.join(format!("{AUDIT_FILE}.tmp"));
        fs::write(&tmp, text).map_err(io(&tmp))?;
        fs::rename(&tmp, &audit_path).map_err(io(&audit_path))?;
    }
    let mut case = doc.case;
    case.restore_audit(audit);
    case.validate().map_err(|e| StoreError::Corrupt {
        path: case_path,
        message: e.to_string(),
    })?;
    Ok((
        Snapshot {
            version: doc.version,
            case,
        },
        doc.extra,
    ))
}
