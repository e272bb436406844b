//! Flat key-value report text: one `key = value` pair per line, order
//! preserved, LF endings. Shared by the analysis, construction, and
//! sensing reports so downstream tooling can rely on stable key names.

use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReportError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Parse { line: usize, text: String },
    #[error("missing key `{0}`")]
    MissingKey(String),
    #[error("key `{key}` holds `{value}`, not a number")]
    NotANumber { key: String, value: String },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pairs: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.pairs.push((key.into(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.pairs.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str, ReportError> {
        self.get(key).ok_or_else(|| ReportError::MissingKey(key.to_string()))
    }

    pub fn get_f64(&self, key: &str) -> Result<f64, ReportError> {
        let v = self.require(key)?;
        v.parse().map_err(|_| ReportError::NotANumber { key: key.into(), value: v.into() })
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn write_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.pairs {
            writeln!(out, "{k} = {v}").unwrap();
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self, ReportError> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once(" = ")
                .ok_or_else(|| ReportError::Parse { line: i + 1, text: line.to_string() })?;
            pairs.push((k.to_string(), v.to_string()));
        }
        Ok(Report { pairs })
    }
}
