//! Assessment submissions: which catalog actions a company declares as
//! implemented at a given instant.

use std::collections::BTreeSet;

use chrono::{DateTime, SecondsFormat, Timelike, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::catalog::ActionCatalog;
use crate::schema::{index, wrong_type, Object, SchemaError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubmissionError {
    #[error("malformed submission document: {detail}")]
    MalformedDocument { detail: String },
    #[error("schema violation at {path}: {detail}")]
    SchemaViolation { path: String, detail: String },
    #[error("unknown action id(s): {}", .0.join(", "))]
    UnknownActionId(Vec<String>),
    #[error("company_id must not be empty")]
    EmptyCompanyId,
}

impl From<SchemaError> for SubmissionError {
    fn from(e: SchemaError) -> Self {
        SubmissionError::SchemaViolation {
            path: e.path,
            detail: e.detail,
        }
    }
}

/// A company's declared set of implemented actions at one instant.
///
/// The timestamp is kept at whole-second precision in UTC.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AssessmentSubmission {
    company_id: String,
    timestamp: DateTime<Utc>,
    implemented: BTreeSet<String>,
}

impl AssessmentSubmission {
    pub fn new<I, S>(company_id: impl Into<String>, timestamp: DateTime<Utc>, implemented: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        AssessmentSubmission {
            company_id: company_id.into(),
            timestamp: timestamp.with_nanosecond(0).expect("zero nanoseconds is valid"),
            implemented: implemented.into_iter().map(Into::into).collect(),
        }
    }

    pub fn company_id(&self) -> &str {
        &self.company_id
    }

    pub fn timestamp(&self) -> DateTime<Utc> {
        self.timestamp
    }

    pub fn implemented(&self) -> &BTreeSet<String> {
        &self.implemented
    }
}

impl Serialize for AssessmentSubmission {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("AssessmentSubmission", 3)?;
        s.serialize_field("company_id", &self.company_id)?;
        s.serialize_field("timestamp", &format_timestamp(self.timestamp))?;
        s.serialize_field("implemented", &self.implemented)?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for AssessmentSubmission {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = Value::deserialize(deserializer)?;
        submission_from_value(&value).map_err(serde::de::Error::custom)
    }
}

/// A submission known to reference only actions of a particular catalog.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ValidatedSubmission(AssessmentSubmission);

impl ValidatedSubmission {
    pub fn submission(&self) -> &AssessmentSubmission {
        &self.0
    }

    pub fn into_inner(self) -> AssessmentSubmission {
        self.0
    }

    pub fn implemented(&self) -> &BTreeSet<String> {
        &self.0.implemented
    }
}

impl std::ops::Deref for ValidatedSubmission {
    type Target = AssessmentSubmission;

    fn deref(&self) -> &AssessmentSubmission {
        &self.0
    }
}

pub fn format_timestamp(ts: DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// Checks the submission against `catalog`. Unknown ids are all reported.
pub fn validate_submission(
    submission: AssessmentSubmission,
    catalog: &ActionCatalog,
) -> Result<ValidatedSubmission, SubmissionError> {
    if submission.company_id.trim().is_empty() {
        return Err(SubmissionError::EmptyCompanyId);
    }
    let unknown: Vec<String> = submission
        .implemented
        .iter()
        .filter(|id| !catalog.contains_action(id))
        .cloned()
        .collect();
    if !unknown.is_empty() {
        return Err(SubmissionError::UnknownActionId(unknown));
    }
    Ok(ValidatedSubmission(submission))
}

/// Parses a submission document (also the CLI answers file format).
pub fn parse_submission(document: &[u8]) -> Result<AssessmentSubmission, SubmissionError> {
    let text = std::str::from_utf8(document).map_err(|e| SubmissionError::MalformedDocument {
        detail: format!("not UTF-8: {e}"),
    })?;
    let value: Value =
        serde_json::from_str(text).map_err(|e| SubmissionError::MalformedDocument {
            detail: e.to_string(),
        })?;
    submission_from_value(&value)
}

fn submission_from_value(value: &Value) -> Result<AssessmentSubmission, SubmissionError> {
    let obj = Object::new(value, "$", &["company_id", "timestamp", "implemented"])?;
    let company_id = obj.string("company_id")?;
    let ts_text = obj.string("timestamp")?;
    let timestamp = parse_timestamp(ts_text).map_err(|detail| SchemaError {
        path: obj.path_of("timestamp"),
        detail,
    })?;
    let path = obj.path_of("implemented");
    let mut implemented = BTreeSet::new();
    for (i, item) in obj.array("implemented")?.iter().enumerate() {
        let id = item
            .as_str()
            .ok_or_else(|| wrong_type(&index(&path, i), "string", item))?;
        implemented.insert(id.to_string());
    }
    Ok(AssessmentSubmission {
        company_id: company_id.to_string(),
        timestamp,
        implemented,
    })
}

/// RFC 3339, any offset (normalized to UTC), no sub-second part.
pub fn parse_timestamp(text: &str) -> Result<DateTime<Utc>, String> {
    let parsed = DateTime::parse_from_rfc3339(text)
        .map_err(|e| format!("`{text}` is not an RFC 3339 timestamp: {e}"))?;
    if parsed.nanosecond() != 0 {
        return Err(format!("`{text}` has sub-second precision"));
    }
    Ok(parsed.with_timezone(&Utc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::TimeZone;
    use serde_json::json;

    fn ts() -> DateTime<Utc> {
        Utc.with_ymd_and_hms(2024, 3, 1, 12, 0, 0).unwrap()
    }

    fn parse(v: &Value) -> Result<AssessmentSubmission, SubmissionError> {
        parse_submission(v.to_string().as_bytes())
    }

    #[test]
    fn empty_implemented_set_is_valid() {
        let sub = AssessmentSubmission::new("acme", ts(), Vec::<String>::new());
        assert!(validate_submission(sub, &ActionCatalog::example()).is_ok());
    }

    #[test]
    fn known_id_is_valid() {
        let sub = AssessmentSubmission::new("acme", ts(), ["env-01"]);
        let v = validate_submission(sub.clone(), &ActionCatalog::example()).unwrap();
        assert_eq!(v.submission(), &sub);
    }

    #[test]
    fn unknown_ids_are_all_listed() {
        let sub = AssessmentSubmission::new("acme", ts(), ["env-99", "env-01", "zzz"]);
        assert_eq!(
            validate_submission(sub, &ActionCatalog::example()),
            Err(SubmissionError::UnknownActionId(vec![
                "env-99".into(),
                "zzz".into()
            ]))
        );
    }

    #[test]
    fn empty_company_rejected() {
        for company in ["", "   "] {
            let sub = AssessmentSubmission::new(company, ts(), ["env-01"]);
            assert_eq!(
                validate_submission(sub, &ActionCatalog::example()),
                Err(SubmissionError::EmptyCompanyId)
            );
        }
    }

    #[test]
    fn duplicates_collapse() {
        let sub = parse(&json!({
            "company_id": "acme",
            "timestamp": "2024-03-01T12:00:00Z",
            "implemented": ["env-01", "env-01", "hum-01"]
        }))
        .unwrap();
        assert_eq!(sub.implemented().len(), 2);
    }

    #[test]
    fn offsets_normalize_to_utc() {
        let sub = parse(&json!({
            "company_id": "acme",
            "timestamp": "2024-03-01T13:00:00+01:00",
            "implemented": []
        }))
        .unwrap();
        assert_eq!(sub.timestamp(), ts());
        assert_eq!(
            serde_json::to_value(&sub).unwrap()["timestamp"],
            json!("2024-03-01T12:00:00Z")
        );
    }

    #[test]
    fn schema_errors_name_the_path() {
        let cases = [
            (json!({"company_id": "a", "timestamp": "2024-03-01T12:00:00Z"}), "$.implemented"),
            (
                json!({"company_id": "a", "timestamp": "yesterday", "implemented": []}),
                "$.timestamp",
            ),
            (
                json!({"company_id": "a", "timestamp": "2024-03-01T12:00:00.5Z", "implemented": []}),
                "$.timestamp",
            ),
            (
                json!({"company_id": "a", "timestamp": "2024-03-01T12:00:00Z", "implemented": ["x", 3]}),
                "$.implemented[1]",
            ),
            (
                json!({"company_id": 7, "timestamp": "2024-03-01T12:00:00Z", "implemented": []}),
                "$.company_id",
            ),
            (
                json!({"company_id": "a", "timestamp": "2024-03-01T12:00:00Z", "implemented": [], "extra": 1}),
                "$.extra",
            ),
        ];
        for (doc, expected) in cases {
            match parse(&doc) {
                Err(SubmissionError::SchemaViolation { path, .. }) => assert_eq!(path, expected),
                other => panic!("{doc}: {other:?}"),
            }
        }
    }

    #[test]
    fn malformed_submission() {
        assert!(matches!(
            parse_submission(b"{\"company_id\":"),
            Err(SubmissionError::MalformedDocument { .. })
        ));
    }

    #[test]
    fn constructor_truncates_to_seconds() {
        let precise = ts() + chrono::Duration::milliseconds(750);
        assert_eq!(AssessmentSubmission::new("a", precise, ["x"]).timestamp(), ts());
    }

    #[test]
    fn serde_round_trip() {
        let sub = AssessmentSubmission::new("acme", ts(), ["hum-02", "env-01"]);
        let text = serde_json::to_string(&sub).unwrap();
        assert_eq!(
            text,
            r#"{"company_id":"acme","timestamp":"2024-03-01T12:00:00Z","implemented":["env-01","hum-02"]}"#
        );
        let back: AssessmentSubmission = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sub);
    }
}
