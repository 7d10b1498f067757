//! The action catalog: three sustainability dimensions, each a list of
//! weighted actions with the improvement text shown when an action is missing.
//!
//! Catalogs are external, versioned JSON documents. [`parse_catalog`] is the
//! only way in from bytes and enforces every structural rule, so any
//! [`ActionCatalog`] value in the program is valid.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::canonical::to_canonical_string;
use crate::number::Decimal;
use crate::schema::{index, wrong_type, Object, SchemaError};

/// Example catalog shipped with the crate. Illustrative only.
pub const EXAMPLE_CATALOG_JSON: &str = include_str!("../data/example_catalog.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DimensionId {
    Human,
    Economic,
    Environmental,
}

impl DimensionId {
    /// Fixed presentation order.
    pub const ALL: [DimensionId; 3] = [
        DimensionId::Human,
        DimensionId::Economic,
        DimensionId::Environmental,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DimensionId::Human => "human",
            DimensionId::Economic => "economic",
            DimensionId::Environmental => "environmental",
        }
    }
}

impl fmt::Display for DimensionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DimensionId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DimensionId::ALL
            .into_iter()
            .find(|d| d.as_str() == s)
            .ok_or_else(|| format!("unknown dimension `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActionItem {
    pub id: String,
    pub statement: String,
    pub weight: Decimal,
    pub recommendation: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Dimension {
    pub id: DimensionId,
    pub name: String,
    pub actions: Vec<ActionItem>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CatalogError {
    #[error("malformed catalog document: {detail}")]
    MalformedDocument { detail: String },
    #[error("schema violation at {path}: {detail}")]
    SchemaViolation { path: String, detail: String },
    #[error("invariant violation at {path}: {detail}")]
    InvariantViolation { path: String, detail: String },
}

impl CatalogError {
    pub fn path(&self) -> Option<&str> {
        match self {
            CatalogError::MalformedDocument { .. } => None,
            CatalogError::SchemaViolation { path, .. }
            | CatalogError::InvariantViolation { path, .. } => Some(path),
        }
    }

    fn invariant(path: impl Into<String>, detail: impl Into<String>) -> Self {
        CatalogError::InvariantViolation {
            path: path.into(),
            detail: detail.into(),
        }
    }
}

impl From<SchemaError> for CatalogError {
    fn from(e: SchemaError) -> Self {
        CatalogError::SchemaViolation {
            path: e.path,
            detail: e.detail,
        }
    }
}

/// Default level thresholds: five levels.
pub fn default_thresholds() -> Vec<Decimal> {
    [25, 50, 75, 100]
        .into_iter()
        .map(|m| Decimal::new(m, 2).expect("small decimals are representable"))
        .collect()
}

/// A validated catalog. Dimensions are held in [`DimensionId::ALL`] order
/// regardless of their order in the source document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionCatalog {
    catalog_version: String,
    thresholds: Vec<Decimal>,
    dimensions: Vec<Dimension>,
    digest: String,
}

impl ActionCatalog {
    /// Validates and assembles a catalog. Error paths index `dimensions` in
    /// the order given here.
    pub fn new(
        catalog_version: impl Into<String>,
        thresholds: Vec<Decimal>,
        dimensions: Vec<Dimension>,
    ) -> Result<Self, CatalogError> {
        check_thresholds(&thresholds)?;
        let dimensions = check_dimensions(dimensions)?;
        let mut catalog = ActionCatalog {
            catalog_version: catalog_version.into(),
            thresholds,
            dimensions,
            digest: String::new(),
        };
        catalog.digest = compute_digest(&catalog);
        Ok(catalog)
    }

    pub fn example() -> Self {
        parse_catalog(EXAMPLE_CATALOG_JSON.as_bytes()).expect("bundled example catalog is valid")
    }

    pub fn catalog_version(&self) -> &str {
        &self.catalog_version
    }

    pub fn thresholds(&self) -> &[Decimal] {
        &self.thresholds
    }

    pub fn dimensions(&self) -> &[Dimension] {
        &self.dimensions
    }

    pub fn dimension(&self, id: DimensionId) -> &Dimension {
        self.dimensions
            .iter()
            .find(|d| d.id == id)
            .expect("all dimensions present")
    }

    /// Every action paired with its dimension, in presentation order.
    pub fn actions(&self) -> impl Iterator<Item = (DimensionId, &ActionItem)> {
        self.dimensions
            .iter()
            .flat_map(|d| d.actions.iter().map(move |a| (d.id, a)))
    }

    pub fn action(&self, id: &str) -> Option<(DimensionId, &ActionItem)> {
        self.actions().find(|(_, a)| a.id == id)
    }

    pub fn contains_action(&self, id: &str) -> bool {
        self.action(id).is_some()
    }

    pub fn action_count(&self) -> usize {
        self.dimensions.iter().map(|d| d.actions.len()).sum()
    }

    /// Number of ordinal levels (thresholds + 1).
    pub fn level_count(&self) -> u32 {
        self.thresholds.len() as u32 + 1
    }

    /// `sha256:<hex>` over the canonical serialization.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn to_json_value(&self) -> Value {
        serde_json::to_value(self).expect("catalog serializes")
    }

    /// Canonical serialization: sorted keys, compact.
    pub fn to_canonical_json(&self) -> String {
        to_canonical_string(&self.to_json_value())
    }
}

/// Digest of the catalog identified by its canonical serialization.
pub fn catalog_digest(catalog: &ActionCatalog) -> &str {
    catalog.digest()
}

fn compute_digest(catalog: &ActionCatalog) -> String {
    let hash = Sha256::digest(catalog.to_canonical_json().as_bytes());
    format!("sha256:{}", hex::encode(hash))
}

impl Serialize for ActionCatalog {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("ActionCatalog", 3)?;
        s.serialize_field("catalog_version", &self.catalog_version)?;
        s.serialize_field("thresholds", &self.thresholds)?;
        s.serialize_field("dimensions", &self.dimensions)?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for ActionCatalog {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = Value::deserialize(deserializer)?;
        catalog_from_value(&value).map_err(serde::de::Error::custom)
    }
}

fn check_thresholds(thresholds: &[Decimal]) -> Result<(), CatalogError> {
    if thresholds.is_empty() {
        return Err(CatalogError::invariant(
            "$.thresholds",
            "at least one threshold is required",
        ));
    }
    let one = Decimal::one();
    for (i, t) in thresholds.iter().enumerate() {
        let path = index("$.thresholds", i);
        if !t.is_positive() || *t > one {
            return Err(CatalogError::invariant(
                path,
                format!("threshold {t} outside (0, 1]"),
            ));
        }
        if i > 0 && thresholds[i - 1] >= *t {
            return Err(CatalogError::invariant(
                path,
                format!(
                    "thresholds must be strictly increasing ({} then {t})",
                    thresholds[i - 1]
                ),
            ));
        }
    }
    if thresholds.last() != Some(&one) {
        return Err(CatalogError::invariant(
            index("$.thresholds", thresholds.len() - 1),
            "final threshold must equal 1",
        ));
    }
    Ok(())
}

fn check_dimensions(dimensions: Vec<Dimension>) -> Result<Vec<Dimension>, CatalogError> {
    let mut seen_dims = HashSet::new();
    let mut seen_actions = HashSet::new();
    for (di, dim) in dimensions.iter().enumerate() {
        let dpath = index("$.dimensions", di);
        if !seen_dims.insert(dim.id) {
            return Err(CatalogError::invariant(
                format!("{dpath}.id"),
                format!("dimension `{}` appears more than once", dim.id),
            ));
        }
        if dim.actions.is_empty() {
            return Err(CatalogError::invariant(
                format!("{dpath}.actions"),
                "a dimension needs at least one action",
            ));
        }
        for (ai, action) in dim.actions.iter().enumerate() {
            let apath = index(&format!("{dpath}.actions"), ai);
            for (field, text) in [
                ("id", &action.id),
                ("statement", &action.statement),
                ("recommendation", &action.recommendation),
            ] {
                if text.trim().is_empty() {
                    return Err(CatalogError::invariant(
                        format!("{apath}.{field}"),
                        format!("`{field}` must not be empty"),
                    ));
                }
            }
            if !action.weight.is_positive() {
                return Err(CatalogError::invariant(
                    format!("{apath}.weight"),
                    format!("weight must be > 0, got {}", action.weight),
                ));
            }
            if !seen_actions.insert(action.id.as_str()) {
                return Err(CatalogError::invariant(
                    format!("{apath}.id"),
                    format!("duplicate action id `{}`", action.id),
                ));
            }
        }
    }
    if let Some(missing) = DimensionId::ALL.iter().find(|d| !seen_dims.contains(*d)) {
        return Err(CatalogError::invariant(
            "$.dimensions",
            format!("dimension `{missing}` is missing"),
        ));
    }
    let mut dimensions = dimensions;
    dimensions.sort_by_key(|d| d.id);
    Ok(dimensions)
}

/// Parses and validates a catalog document.
pub fn parse_catalog(document: &[u8]) -> Result<ActionCatalog, CatalogError> {
    let text = std::str::from_utf8(document).map_err(|e| CatalogError::MalformedDocument {
        detail: format!("not UTF-8: {e}"),
    })?;
    let value: Value =
        serde_json::from_str(text).map_err(|e| CatalogError::MalformedDocument {
            detail: e.to_string(),
        })?;
    catalog_from_value(&value)
}

fn decimal_at(value: &Value, path: &str) -> Result<Decimal, CatalogError> {
    let n = value
        .as_number()
        .ok_or_else(|| wrong_type(path, "number", value))?;
    Decimal::from_json_number(n).ok_or_else(|| {
        CatalogError::SchemaViolation {
            path: path.to_string(),
            detail: format!("unrepresentable number {n}"),
        }
    })
}

fn catalog_from_value(value: &Value) -> Result<ActionCatalog, CatalogError> {
    let root = Object::new(value, "$", &["catalog_version", "thresholds", "dimensions"])?;
    let version = root.string("catalog_version")?;
    let thresholds = match root.optional("thresholds") {
        None => default_thresholds(),
        Some(v) => {
            let path = root.path_of("thresholds");
            let items = v.as_array().ok_or_else(|| wrong_type(&path, "array", v))?;
            items
                .iter()
                .enumerate()
                .map(|(i, t)| decimal_at(t, &index(&path, i)))
                .collect::<Result<_, _>>()?
        }
    };
    let dims_path = root.path_of("dimensions");
    let dimensions = root
        .array("dimensions")?
        .iter()
        .enumerate()
        .map(|(i, d)| dimension_from_value(d, &index(&dims_path, i)))
        .collect::<Result<Vec<_>, _>>()?;
    ActionCatalog::new(version, thresholds, dimensions)
}

fn dimension_from_value(value: &Value, path: &str) -> Result<Dimension, CatalogError> {
    let obj = Object::new(value, path, &["id", "name", "actions"])?;
    let id_text = obj.string("id")?;
    let id = id_text
        .parse::<DimensionId>()
        .map_err(|detail| SchemaError {
            path: obj.path_of("id"),
            detail: format!("{detail}; expected one of human, economic, environmental"),
        })?;
    let name = obj.string("name")?.to_string();
    let actions_path = obj.path_of("actions");
    let actions = obj
        .array("actions")?
        .iter()
        .enumerate()
        .map(|(i, a)| action_from_value(a, &index(&actions_path, i)))
        .collect::<Result<_, _>>()?;
    Ok(Dimension { id, name, actions })
}

fn action_from_value(value: &Value, path: &str) -> Result<ActionItem, CatalogError> {
    let obj = Object::new(value, path, &["id", "statement", "weight", "recommendation"])?;
    let weight = match obj.optional("weight") {
        None => Decimal::one(),
        Some(w) => decimal_at(w, &obj.path_of("weight"))?,
    };
    Ok(ActionItem {
        id: obj.string("id")?.to_string(),
        statement: obj.string("statement")?.to_string(),
        weight,
        recommendation: obj.string("recommendation")?.to_string(),
    })
}
