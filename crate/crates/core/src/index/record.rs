use std::path::Path;

use serde::{Deserialize, Serialize};

use super::IndexError;
use crate::corpus::jsonl_lines;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityRecord {
    pub id: String,
    pub name: String,
    pub kb_type: String,
    pub city: String,
    pub lat: f64,
    pub lon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rating: Option<f64>,
    pub text: String,
}

impl EntityRecord {
    pub fn check(&self) -> Result<(), String> {
        if self.id.is_empty() {
            return Err("empty id".into());
        }
        if self.kb_type.trim().is_empty() {
            return Err(format!("{}: empty kb_type", self.id));
        }
        if !(self.lat.abs() <= 90.0) || !(self.lon.abs() <= 180.0) {
            return Err(format!(
                "{}: coordinates ({}, {}) out of range",
                self.id, self.lat, self.lon
            ));
        }
        if let Some(r) = self.rating {
            if !(0.0..=5.0).contains(&r) {
                return Err(format!("{}: rating {r} outside 0-5", self.id));
            }
        }
        Ok(())
    }
}

pub fn parse_records(text: &str) -> Result<Vec<EntityRecord>, IndexError> {
    jsonl_lines(text)
        .map(|(line, l)| {
            let rec: EntityRecord = serde_json::from_str(l).map_err(|e| IndexError::Record {
                line,
                message: e.to_string(),
            })?;
            rec.check().map_err(|message| IndexError::Record { line, message })?;
            Ok(rec)
        })
        .collect()
}

pub fn load_records(path: impl AsRef<Path>) -> Result<Vec<EntityRecord>, IndexError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| IndexError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_records(&text)
}
