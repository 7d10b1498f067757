//! Strict, path-reporting accessors over a parsed JSON tree.

use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct SchemaError {
    pub path: String,
    pub detail: String,
}

pub(crate) type SchemaResult<T> = Result<T, SchemaError>;

pub(crate) fn join(path: &str, key: &str) -> String {
    format!("{path}.{key}")
}

pub(crate) fn index(path: &str, i: usize) -> String {
    format!("{path}[{i}]")
}

fn type_name(value: &Value) -> &'static str {
    match value {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

pub(crate) fn wrong_type(path: &str, expected: &str, found: &Value) -> SchemaError {
    SchemaError {
        path: path.to_string(),
        detail: format!("expected {expected}, found {}", type_name(found)),
    }
}

/// An object whose keys must all come from `allowed`.
pub(crate) struct Object<'a> {
    map: &'a Map<String, Value>,
    path: String,
}

impl<'a> Object<'a> {
    pub fn new(value: &'a Value, path: &str, allowed: &[&str]) -> SchemaResult<Self> {
        let map = value
            .as_object()
            .ok_or_else(|| wrong_type(path, "object", value))?;
        let mut unknown: Vec<&str> = map
            .keys()
            .map(String::as_str)
            .filter(|k| !allowed.contains(k))
            .collect();
        unknown.sort_unstable();
        if let Some(first) = unknown.first() {
            return Err(SchemaError {
                path: join(path, first),
                detail: format!("unknown field `{first}`"),
            });
        }
        Ok(Object {
            map,
            path: path.to_string(),
        })
    }

    pub fn path_of(&self, key: &str) -> String {
        join(&self.path, key)
    }

    pub fn optional(&self, key: &str) -> Option<&'a Value> {
        self.map.get(key)
    }

    pub fn required(&self, key: &str) -> SchemaResult<&'a Value> {
        self.map.get(key).ok_or_else(|| SchemaError {
            path: self.path_of(key),
            detail: format!("missing field `{key}`"),
        })
    }

    pub fn string(&self, key: &str) -> SchemaResult<&'a str> {
        let value = self.required(key)?;
        value
            .as_str()
            .ok_or_else(|| wrong_type(&self.path_of(key), "string", value))
    }

    pub fn array(&self, key: &str) -> SchemaResult<&'a Vec<Value>> {
        let value = self.required(key)?;
        value
            .as_array()
            .ok_or_else(|| wrong_type(&self.path_of(key), "array", value))
    }
}
