use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Category of a document problem. Drives the HTTP status the service maps to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Syntax,
    Shape,
    Range,
    DerivativeName,
    Weights,
}

/// One problem found in an input document, located by a dotted path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationError {
    pub path: String,
    pub message: String,
    pub kind: ErrorKind,
}

impl ValidationError {
    pub fn new(path: impl Into<String>, kind: ErrorKind, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
            kind,
        }
    }

    pub(crate) fn range(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self::new(path, ErrorKind::Range, message)
    }
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

/// Every violation found in a document; never empty when returned as an error.
#[derive(Debug, Clone, PartialEq, Default, Error)]
pub struct ValidationErrors(pub Vec<ValidationError>);

impl ValidationErrors {
    pub fn single(err: ValidationError) -> Self {
        Self(vec![err])
    }

    pub fn push(&mut self, err: ValidationError) {
        self.0.push(err);
    }

    pub fn extend(&mut self, other: ValidationErrors) {
        self.0.extend(other.0);
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ValidationError> {
        self.0.iter()
    }

    pub fn paths(&self) -> Vec<String> {
        self.0.iter().map(|e| e.path.clone()).collect()
    }

    /// Prefix every path with `prefix.` (used when a document is embedded in a request).
    pub fn prefixed(self, prefix: &str) -> Self {
        Self(
            self.0
                .into_iter()
                .map(|mut e| {
                    e.path = if e.path.is_empty() {
                        prefix.to_string()
                    } else {
                        format!("{prefix}.{}", e.path)
                    };
                    e
                })
                .collect(),
        )
    }

    pub(crate) fn into_result(self) -> Result<(), ValidationErrors> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(self)
        }
    }
}

impl fmt::Display for ValidationErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Check a value for finiteness and push a range error if it is not.
pub(crate) fn check_finite(errs: &mut ValidationErrors, path: &str, v: f64) -> bool {
    if v.is_finite() {
        true
    } else {
        errs.push(ValidationError::range(path, "must be a finite number"));
        false
    }
}

/// Parse a JSON document into `T`, reporting the failing path for shape errors.
pub(crate) fn from_json_value<T: serde::de::DeserializeOwned>(value: serde_json::Value) -> Result<T, ValidationErrors> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { String::new() } else { path };
        ValidationErrors::single(ValidationError::new(path, ErrorKind::Shape, e.into_inner().to_string()))
    })
}

pub(crate) fn parse_json_text(text: &str) -> Result<serde_json::Value, ValidationErrors> {
    serde_json::from_str(text)
        .map_err(|e| ValidationErrors::single(ValidationError::new("", ErrorKind::Syntax, e.to_string())))
}
