//! Catalog-driven software sustainability scorecard.
//!
//! A company declares which catalog actions its CSR document implements.
//! The submission is scored per dimension (human, economic, environmental),
//! every missing action becomes a recommendation, and each scored
//! submission can be appended to a history to follow level evolution.
//!
//! ```
//! use chrono::{TimeZone, Utc};
//! use csre4soc_core::{assess, recommend, validate_submission, ActionCatalog, AssessmentSubmission};
//!
//! let catalog = ActionCatalog::example();
//! let sub = AssessmentSubmission::new(
//!     "acme",
//!     Utc.with_ymd_and_hms(2024, 5, 1, 0, 0, 0).unwrap(),
//!     ["env-01", "hum-01"],
//! );
//! let sub = validate_submission(sub, &catalog).unwrap();
//! let result = assess(&sub, &catalog);
//! assert_eq!(result.overall.ordinal, 1);
//! assert_eq!(recommend(&sub, &catalog).len(), 10);
//! ```

mod canonical;
pub mod catalog;
pub mod history;
pub mod number;
pub mod recommendations;
mod schema;
pub mod scoring;
pub mod submission;

pub use canonical::to_canonical_string;
pub use catalog::{
    catalog_digest, default_thresholds, parse_catalog, ActionCatalog, ActionItem, CatalogError,
    Dimension, DimensionId, EXAMPLE_CATALOG_JSON,
};
pub use history::{
    project_evolution, sort_records, AssessmentRecord, AssessmentStore, DimensionOrdinals,
    EvolutionPoint, EvolutionSeries, FileStore, HistoryError, RecordId,
};
pub use number::{Decimal, DecimalError};
pub use recommendations::{recommend, Recommendation};
pub use scoring::{
    assess, level_from_coverage, level_label, score_dimension, weighted_coverage,
    AssessmentResult, Coverage, DimensionScore, SustainabilityLevel,
};
pub use submission::{
    format_timestamp, parse_submission, parse_timestamp, validate_submission,
    AssessmentSubmission, SubmissionError, ValidatedSubmission,
};
