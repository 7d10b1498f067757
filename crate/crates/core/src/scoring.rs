//! Default scoring model: weighted coverage per dimension, mapped onto ordinal
//! levels through the catalog's thresholds, with the overall level taken as
//! the weakest dimension.
//!
//! Thresholds and weights are catalog data, so a different level scheme is a
//! catalog change rather than a code change. All comparisons are exact.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::catalog::{ActionCatalog, Dimension, DimensionId};
use crate::number::Decimal;
use crate::submission::ValidatedSubmission;

const FIVE_LEVEL_LABELS: [&str; 5] = ["Initial", "Basic", "Intermediate", "Advanced", "Leader"];

/// Weighted fraction of a dimension's actions that are implemented, in [0, 1].
///
/// Serialized as an exact fraction string such as `"1/2"`, `"0"` or `"1"`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coverage(BigRational);

impl Coverage {
    pub fn new(value: BigRational) -> Self {
        debug_assert!(value >= BigRational::zero() && value <= BigRational::from_integer(1.into()));
        Coverage(value)
    }

    pub fn from_fraction(numer: i64, denom: i64) -> Self {
        Coverage::new(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    /// Approximate value for display only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Coverage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Coverage {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Coverage {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        let value: BigRational = text
            .parse()
            .map_err(|_| serde::de::Error::custom(format!("invalid fraction `{text}`")))?;
        let zero = BigRational::zero();
        let one = BigRational::from_integer(1.into());
        if value < zero || value > one {
            return Err(serde::de::Error::custom(format!(
                "coverage {text} outside [0, 1]"
            )));
        }
        Ok(Coverage(value))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SustainabilityLevel {
    pub ordinal: u32,
    pub label: String,
}

impl SustainabilityLevel {
    /// `level_count` is the catalog's threshold count plus one.
    pub fn new(ordinal: u32, level_count: u32) -> Self {
        assert!(
            (1..=level_count).contains(&ordinal),
            "ordinal {ordinal} outside 1..={level_count}"
        );
        SustainabilityLevel {
            ordinal,
            label: level_label(ordinal, level_count),
        }
    }
}

/// Five-level schemes use the named labels; any other scheme uses `Level n`.
pub fn level_label(ordinal: u32, level_count: u32) -> String {
    if level_count == FIVE_LEVEL_LABELS.len() as u32 {
        FIVE_LEVEL_LABELS[ordinal as usize - 1].to_string()
    } else {
        format!("Level {ordinal}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionScore {
    pub dimension: DimensionId,
    pub coverage: Coverage,
    pub level: SustainabilityLevel,
    pub implemented_count: usize,
    pub total_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssessmentResult {
    /// One score per dimension, in [`DimensionId::ALL`] order.
    pub scores: Vec<DimensionScore>,
    pub overall: SustainabilityLevel,
    pub catalog_digest: String,
}

impl AssessmentResult {
    pub fn score(&self, dimension: DimensionId) -> &DimensionScore {
        self.scores
            .iter()
            .find(|s| s.dimension == dimension)
            .expect("one score per dimension")
    }
}

fn sum_weights<'a>(weights: impl Iterator<Item = &'a Decimal>) -> BigRational {
    weights.fold(BigRational::zero(), |acc, w| acc + w.as_ratio())
}

/// Σ weights of implemented actions / Σ weights of all actions of `dimension`.
/// Ids from other dimensions are ignored.
pub fn weighted_coverage(dimension: &Dimension, implemented: &BTreeSet<String>) -> Coverage {
    let total = sum_weights(dimension.actions.iter().map(|a| &a.weight));
    let done = sum_weights(
        dimension
            .actions
            .iter()
            .filter(|a| implemented.contains(&a.id))
            .map(|a| &a.weight),
    );
    Coverage::new(done / total)
}

/// `1 + |{t : coverage >= t}|`. A coverage exactly on a threshold earns the
/// higher level.
pub fn level_from_coverage(coverage: &Coverage, thresholds: &[Decimal]) -> SustainabilityLevel {
    let reached = thresholds
        .iter()
        .take_while(|t| coverage.as_ratio() >= t.as_ratio())
        .count();
    SustainabilityLevel::new(reached as u32 + 1, thresholds.len() as u32 + 1)
}

pub fn score_dimension(
    dimension: &Dimension,
    implemented: &BTreeSet<String>,
    thresholds: &[Decimal],
) -> DimensionScore {
    let coverage = weighted_coverage(dimension, implemented);
    let level = level_from_coverage(&coverage, thresholds);
    DimensionScore {
        dimension: dimension.id,
        level,
        implemented_count: dimension
            .actions
            .iter()
            .filter(|a| implemented.contains(&a.id))
            .count(),
        total_count: dimension.actions.len(),
        coverage,
    }
}

/// Scores a validated submission. Pure and deterministic.
pub fn assess(submission: &ValidatedSubmission, catalog: &ActionCatalog) -> AssessmentResult {
    let scores: Vec<DimensionScore> = catalog
        .dimensions()
        .iter()
        .map(|d| score_dimension(d, submission.implemented(), catalog.thresholds()))
        .collect();
    let overall_ordinal = scores
        .iter()
        .map(|s| s.level.ordinal)
        .min()
        .expect("three dimensions");
    AssessmentResult {
        scores,
        overall: SustainabilityLevel::new(overall_ordinal, catalog.level_count()),
        catalog_digest: catalog.digest().to_string(),
    }
}
