//! Textual model specifications: `name:dim[:param...]` or a JSON object
//! `{"name": ..., "params": [...]}`.

use serde::{Deserialize, Serialize};

use super::ManifoldModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub name: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

impl ModelSpec {
    /// Parses either form; input starting with `{` is treated as JSON.
    pub fn parse(input: &str) -> Result<Self> {
        let s = input.trim();
        if s.starts_with('{') {
            return Self::from_json(s);
        }
        let mut parts = s.split(':');
        let name = parts.next().unwrap_or_default().trim();
        if name.is_empty() {
            return Err(Error::InvalidModelSpec("empty model name".into()));
        }
        let params = parts
            .map(|p| {
                let p = p.trim();
                p.parse::<f64>().map_err(|_| {
                    Error::InvalidModelSpec(format!("parameter '{p}' is not a number"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { name: name.to_string(), params })
    }

    pub fn from_json(input: &str) -> Result<Self> {
        serde_json::from_str(input).map_err(|e| Error::InvalidModelSpec(format!("bad JSON: {e}")))
    }

    pub fn build(&self) -> Result<ManifoldModel> {
        ManifoldModel::builtin(&self.name, &self.params)
    }
}

impl std::str::FromStr for ModelSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl std::str::FromStr for ManifoldModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ModelSpec::parse(s)?.build()
    }
}
