//! Assessment history: an append-only record log and the level-evolution
//! series derived from it.
//!
//! ## Store file format
//!
//! UTF-8, one canonical-JSON [`AssessmentRecord`] per line, each line
//! terminated by `\n`:
//!
//! ```text
//! {"record_id":"…","result":{…},"stored_at":"2024-05-01T10:00:00.000Z","submission":{…}}
//! ```
//!
//! A trailing segment without its newline is the remains of an interrupted
//! write. It is never read as data: a writable open truncates it away, a
//! read-only open skips it. Both log a warning.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::canonical::to_canonical_string;
use crate::catalog::{ActionCatalog, DimensionId};
use crate::scoring::{assess, AssessmentResult};
use crate::submission::{format_timestamp, AssessmentSubmission, ValidatedSubmission};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RecordId(String);

impl RecordId {
    pub fn new(id: impl Into<String>) -> Self {
        RecordId(id.into())
    }

    pub fn generate() -> Self {
        RecordId(uuid::Uuid::new_v4().to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RecordId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

mod millis {
    use chrono::{DateTime, SecondsFormat, Utc};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(ts: &DateTime<Utc>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&ts.to_rfc3339_opts(SecondsFormat::Millis, true))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DateTime<Utc>, D::Error> {
        let text = String::deserialize(d)?;
        DateTime::parse_from_rfc3339(&text)
            .map(|t| t.with_timezone(&Utc))
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssessmentRecord {
    pub record_id: RecordId,
    pub submission: AssessmentSubmission,
    pub result: AssessmentResult,
    #[serde(with = "millis")]
    pub stored_at: DateTime<Utc>,
}

impl AssessmentRecord {
    /// Scores `submission` against `catalog`; the record's result is always
    /// the assessment of its own submission.
    pub fn new(
        record_id: RecordId,
        submission: ValidatedSubmission,
        catalog: &ActionCatalog,
        stored_at: DateTime<Utc>,
    ) -> Self {
        let result = assess(&submission, catalog);
        AssessmentRecord {
            record_id,
            submission: submission.into_inner(),
            result,
            stored_at: truncate_millis(stored_at),
        }
    }

    pub fn company_id(&self) -> &str {
        self.submission.company_id()
    }

    /// One line of the store file, without the trailing newline.
    pub fn to_canonical_line(&self) -> String {
        to_canonical_string(&serde_json::to_value(self).expect("record serializes"))
    }

    fn sort_key(&self) -> (DateTime<Utc>, DateTime<Utc>, &RecordId) {
        (self.submission.timestamp(), self.stored_at, &self.record_id)
    }
}

fn truncate_millis(ts: DateTime<Utc>) -> DateTime<Utc> {
    let text = ts.to_rfc3339_opts(SecondsFormat::Millis, true);
    DateTime::parse_from_rfc3339(&text)
        .expect("formatted timestamp parses")
        .with_timezone(&Utc)
}

/// Evolution ordering: submission timestamp, then stored_at, then record id.
pub fn sort_records(records: &mut [AssessmentRecord]) {
    records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionOrdinals {
    pub human: u32,
    pub economic: u32,
    pub environmental: u32,
}

impl DimensionOrdinals {
    pub fn get(&self, dimension: DimensionId) -> u32 {
        match dimension {
            DimensionId::Human => self.human,
            DimensionId::Economic => self.economic,
            DimensionId::Environmental => self.environmental,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvolutionPoint {
    pub record_id: RecordId,
    pub timestamp: String,
    pub levels: DimensionOrdinals,
    pub overall: u32,
    pub catalog_digest: String,
    /// True when this point was scored under a different catalog than the
    /// previous point. Always false for the first point.
    pub catalog_digest_changed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvolutionSeries {
    pub company_id: String,
    pub points: Vec<EvolutionPoint>,
}

/// Projects already-sorted records onto the evolution series.
pub fn project_evolution(company_id: &str, records: &[AssessmentRecord]) -> EvolutionSeries {
    let mut previous_digest: Option<&str> = None;
    let points = records
        .iter()
        .map(|r| {
            let digest = r.result.catalog_digest.as_str();
            let changed = previous_digest.is_some_and(|p| p != digest);
            previous_digest = Some(digest);
            EvolutionPoint {
                record_id: r.record_id.clone(),
                timestamp: format_timestamp(r.submission.timestamp()),
                levels: DimensionOrdinals {
                    human: r.result.score(DimensionId::Human).level.ordinal,
                    economic: r.result.score(DimensionId::Economic).level.ordinal,
                    environmental: r.result.score(DimensionId::Environmental).level.ordinal,
                },
                overall: r.result.overall.ordinal,
                catalog_digest: digest.to_string(),
                catalog_digest_changed: changed,
            }
        })
        .collect();
    EvolutionSeries {
        company_id: company_id.to_string(),
        points,
    }
}

#[derive(Debug, thiserror::Error)]
pub enum HistoryError {
    #[error("storage failure: {0}")]
    Storage(String),
    #[error("duplicate record id `{0}`")]
    DuplicateRecordId(RecordId),
}

impl From<std::io::Error> for HistoryError {
    fn from(e: std::io::Error) -> Self {
        HistoryError::Storage(e.to_string())
    }
}

/// Persistence contract for assessment records. Appends take `&mut self`:
/// writers are serialized by whoever owns the store.
pub trait AssessmentStore {
    fn append(&mut self, record: AssessmentRecord) -> Result<RecordId, HistoryError>;

    /// All records of `company_id` in evolution order. Unknown company → empty.
    fn list_assessments(&self, company_id: &str) -> Result<Vec<AssessmentRecord>, HistoryError>;

    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn evolution(&self, company_id: &str) -> Result<EvolutionSeries, HistoryError> {
        let records = self.list_assessments(company_id)?;
        Ok(project_evolution(company_id, &records))
    }
}

/// Line-delimited record log with an in-memory index built at open.
#[derive(Debug)]
pub struct FileStore {
    path: PathBuf,
    writer: Option<File>,
    file_len: u64,
    records: Vec<AssessmentRecord>,
    ids: HashSet<RecordId>,
    by_company: HashMap<String, Vec<usize>>,
    warnings: Vec<String>,
}

impl FileStore {
    /// Opens (creating if needed) a store for reading and appending.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, HistoryError> {
        let path = path.as_ref();
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(path)
            .map_err(|e| HistoryError::Storage(format!("{}: {e}", path.display())))?;
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes)?;
        let mut store = Self::from_bytes(path, &bytes)?;
        if store.file_len < bytes.len() as u64 {
            file.set_len(store.file_len)?;
            file.sync_data()?;
        }
        store.writer = Some(file);
        Ok(store)
    }

    /// Opens an existing store without modifying it. Appends fail.
    pub fn open_read_only(path: impl AsRef<Path>) -> Result<Self, HistoryError> {
        let path = path.as_ref();
        let bytes = std::fs::read(path)
            .map_err(|e| HistoryError::Storage(format!("{}: {e}", path.display())))?;
        Self::from_bytes(path, &bytes)
    }

    fn from_bytes(path: &Path, bytes: &[u8]) -> Result<Self, HistoryError> {
        let complete_len = bytes
            .iter()
            .rposition(|&b| b == b'\n')
            .map_or(0, |i| i + 1);
        let mut store = FileStore {
            path: path.to_path_buf(),
            writer: None,
            file_len: complete_len as u64,
            records: Vec::new(),
            ids: HashSet::new(),
            by_company: HashMap::new(),
            warnings: Vec::new(),
        };
        if complete_len < bytes.len() {
            let msg = format!(
                "{}: ignoring {} byte(s) of incomplete trailing record",
                path.display(),
                bytes.len() - complete_len
            );
            tracing::warn!("{msg}");
            store.warnings.push(msg);
        }
        for (n, line) in bytes[..complete_len].split(|&b| b == b'\n').enumerate() {
            if line.iter().all(u8::is_ascii_whitespace) {
                continue;
            }
            let record: AssessmentRecord = std::str::from_utf8(line)
                .map_err(|e| e.to_string())
                .and_then(|text| serde_json::from_str(text).map_err(|e| e.to_string()))
                .map_err(|e| {
                    HistoryError::Storage(format!(
                        "{}: corrupt record on line {}: {e}",
                        path.display(),
                        n + 1
                    ))
                })?;
            if store.ids.contains(&record.record_id) {
                return Err(HistoryError::Storage(format!(
                    "{}: record id `{}` repeated on line {}",
                    path.display(),
                    record.record_id,
                    n + 1
                )));
            }
            store.index(record);
        }
        Ok(store)
    }

    fn index(&mut self, record: AssessmentRecord) {
        self.ids.insert(record.record_id.clone());
        self.by_company
            .entry(record.company_id().to_string())
            .or_default()
            .push(self.records.len());
        self.records.push(record);
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Problems tolerated while loading, e.g. a torn final line.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Every record in append order.
    pub fn records(&self) -> &[AssessmentRecord] {
        &self.records
    }
}

impl AssessmentStore for FileStore {
    fn append(&mut self, record: AssessmentRecord) -> Result<RecordId, HistoryError> {
        if self.ids.contains(&record.record_id) {
            return Err(HistoryError::DuplicateRecordId(record.record_id));
        }
        let file = self.writer.as_mut().ok_or_else(|| {
            HistoryError::Storage(format!("{} is open read-only", self.path.display()))
        })?;
        let mut line = record.to_canonical_line();
        line.push('\n');
        let written = file
            .write_all(line.as_bytes())
            .and_then(|()| file.sync_data());
        if let Err(e) = written {
            // roll back whatever part of the line reached the file
            let _ = file.set_len(self.file_len);
            return Err(e.into());
        }
        self.file_len += line.len() as u64;
        let id = record.record_id.clone();
        self.index(record);
        Ok(id)
    }

    fn list_assessments(&self, company_id: &str) -> Result<Vec<AssessmentRecord>, HistoryError> {
        let mut out: Vec<AssessmentRecord> = self
            .by_company
            .get(company_id)
            .into_iter()
            .flatten()
            .map(|&i| self.records[i].clone())
            .collect();
        sort_records(&mut out);
        Ok(out)
    }

    fn len(&self) -> usize {
        self.records.len()
    }
}
