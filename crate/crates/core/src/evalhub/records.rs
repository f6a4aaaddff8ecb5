//! Prediction and gold rows: JSON Lines `{dialog_id, round, payload}`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use super::Task;
use crate::engine::{ActName, Speaker};
use crate::error::{Error, Result};
use crate::ontology::SpdMode;
use crate::realizer::extract_item_tokens;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Row {
    pub dialog_id: String,
    pub round: u32,
    pub payload: Json,
    /// Set on SPD gold rows only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<SpdMode>,
}

pub type Key = (String, u32);

impl Row {
    pub fn new(dialog_id: impl Into<String>, round: u32, payload: Json) -> Row {
        Row { dialog_id: dialog_id.into(), round, payload, mode: None }
    }

    pub fn key(&self) -> Key {
        (self.dialog_id.clone(), self.round)
    }
}

pub fn rows_to_jsonl(rows: &[Row]) -> String {
    let mut out = String::new();
    for r in rows {
        out.push_str(&serde_json::to_string(r).expect("row serializes"));
        out.push('\n');
    }
    out
}

pub fn write_rows(path: impl AsRef<Path>, rows: &[Row]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(rows_to_jsonl(rows).as_bytes()).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_rows(path: impl AsRef<Path>) -> Result<Vec<Row>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rows = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        rows.push(serde_json::from_str(&line).map_err(|e| Error::malformed(path, format!("line {}: {e}", n + 1)))?);
    }
    Ok(rows)
}

/// Rows indexed by key; duplicate keys are rejected.
pub(crate) fn index<'r>(rows: &'r [Row], what: &str) -> Result<BTreeMap<Key, &'r Row>> {
    let mut map = BTreeMap::new();
    for row in rows {
        if map.insert(row.key(), row).is_some() {
            return Err(Error::Validation(format!("{what}: duplicate row for ({}, {})", row.dialog_id, row.round)));
        }
    }
    Ok(map)
}

/// Keys of predictions must be a subset of the gold keys.
pub(crate) fn check_subset(preds: &BTreeMap<Key, &Row>, gold: &BTreeMap<Key, &Row>, task: Task) -> Result<()> {
    match preds.keys().find(|k| !gold.contains_key(*k)) {
        Some((d, r)) => Err(Error::TaskMismatch(format!("{task} prediction for ({d}, {r}) has no gold row"))),
        None => Ok(()),
    }
}

fn mismatch(task: Task, row: &Row, expected: &str) -> Error {
    Error::TaskMismatch(format!("{task} row ({}, {}) needs {expected}, got {}", row.dialog_id, row.round, row.payload))
}

/// Set payload for SPD (strings) or RRU/RECOMMEND (object ids).
pub(crate) fn set_payload(task: Task, row: &Row) -> Result<BTreeSet<String>> {
    let items = match &row.payload {
        Json::Array(items) => items,
        Json::Number(_) if task != Task::Spd => std::slice::from_ref(&row.payload),
        _ => return Err(mismatch(task, row, "an array")),
    };
    items
        .iter()
        .map(|item| match (task, item) {
            (Task::Spd, Json::String(s)) => Ok(s.clone()),
            (Task::Rru | Task::Recommend, Json::Number(n)) if n.as_u64().is_some_and(|v| v <= u32::MAX as u64) => {
                Ok(n.to_string())
            }
            _ => Err(mismatch(task, row, if task == Task::Spd { "value strings" } else { "object ids" })),
        })
        .collect()
}

/// Recommendation predictions may be utterances; ids are then read off
/// `<@id>` tokens.
pub(crate) fn recommend_payload(row: &Row) -> Result<BTreeSet<String>> {
    match &row.payload {
        Json::String(text) => Ok(extract_item_tokens(text).into_iter().map(|id| id.to_string()).collect()),
        _ => set_payload(Task::Recommend, row),
    }
}

pub(crate) fn act_payload(row: &Row) -> Result<ActName> {
    let name = row.payload.as_str().ok_or_else(|| mismatch(Task::Act, row, "an act name"))?;
    let act = ActName::parse_lenient(name)?;
    if act.speaker() != Speaker::Salesperson {
        return Err(Error::TaskMismatch(format!("`{name}` is not a salesperson act")));
    }
    Ok(act)
}

pub(crate) fn text_payload(row: &Row) -> Result<&str> {
    row.payload.as_str().ok_or_else(|| mismatch(Task::Response, row, "an utterance string"))
}
