//! Mention datasets in JSONL form, one object per line:
//! `{"doc_id", "surface", "sentence", "type", "gold"}` with `gold` an English
//! title or `null` for NIL.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EntityType {
    #[serde(rename = "GPE")]
    Gpe,
    #[serde(rename = "LOC")]
    Loc,
    #[serde(rename = "PER")]
    Per,
    #[serde(rename = "ORG")]
    Org,
}

impl EntityType {
    pub const ALL: [EntityType; 4] = [EntityType::Gpe, EntityType::Loc, EntityType::Per, EntityType::Org];

    pub fn as_str(self) -> &'static str {
        match self {
            EntityType::Gpe => "GPE",
            EntityType::Loc => "LOC",
            EntityType::Per => "PER",
            EntityType::Org => "ORG",
        }
    }

    /// Geopolitical or location entity; these go through the map provider.
    pub fn is_geo(self) -> bool {
        matches!(self, EntityType::Gpe | EntityType::Loc)
    }
}

impl fmt::Display for EntityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntityType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EntityType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown entity type `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MentionRecord {
    pub doc_id: String,
    pub surface: String,
    pub sentence: String,
    #[serde(rename = "type")]
    pub entity_type: EntityType,
    pub gold: Option<String>,
}

impl MentionRecord {
    pub fn validate(&self) -> Result<(), String> {
        if self.surface.trim().is_empty() {
            return Err("empty surface".into());
        }
        if !self.sentence.contains(&self.surface) {
            return Err(format!("surface {:?} does not occur in its sentence", self.surface));
        }
        if matches!(&self.gold, Some(g) if g.trim().is_empty()) {
            return Err("gold is an empty string; use null for NIL".into());
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("dataset {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("dataset line {line}: {message}")]
    Schema { line: usize, message: String },
}

pub fn parse_dataset<R: BufRead>(reader: R) -> Result<Vec<MentionRecord>, DatasetError> {
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| DatasetError::Io {
            path: "<stream>".into(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let schema = |message: String| DatasetError::Schema { line: line_no, message };
        let record: MentionRecord = serde_json::from_str(&line).map_err(|e| schema(e.to_string()))?;
        record.validate().map_err(schema)?;
        records.push(record);
    }
    Ok(records)
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<Vec<MentionRecord>, DatasetError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_dataset(BufReader::new(file))
}
