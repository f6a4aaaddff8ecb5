//! Precision / recall / F1 scoring for set-valued and act-label tasks.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::records::{act_payload, check_subset, index, recommend_payload, set_payload, Row};
use super::Task;
use crate::engine::ActName;
use crate::error::{Error, Result};
use crate::ontology::SpdMode;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn f1_of(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

impl Prf {
    pub fn from_counts(tp: u64, fp: u64, fn_: u64) -> Prf {
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        Prf { precision, recall, f1: f1_of(precision, recall), true_positives: tp, false_positives: fp, false_negatives: fn_ }
    }

    pub fn of_sets<T: Ord>(pred: &BTreeSet<T>, gold: &BTreeSet<T>) -> Prf {
        let tp = pred.intersection(gold).count() as u64;
        Prf::from_counts(tp, pred.len() as u64 - tp, gold.len() as u64 - tp)
    }

    /// Unweighted mean of precision and recall; F1 is recomputed from the
    /// means. Counts are summed.
    pub fn mean<'a>(scores: impl IntoIterator<Item = &'a Prf>) -> Prf {
        let mut n = 0usize;
        let mut out = Prf::default();
        for s in scores {
            n += 1;
            out.precision += s.precision;
            out.recall += s.recall;
            out.true_positives += s.true_positives;
            out.false_positives += s.false_positives;
            out.false_negatives += s.false_negatives;
        }
        if n > 0 {
            out.precision /= n as f64;
            out.recall /= n as f64;
        }
        out.f1 = f1_of(out.precision, out.recall);
        out
    }
}

/// Score of a set-valued task; micro is the headline figure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetReport {
    pub task: Task,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<SpdMode>,
    pub rows: usize,
    pub predicted_rows: usize,
    pub micro: Prf,
    pub macro_avg: Prf,
}

fn score_pairs(task: Task, mode: Option<SpdMode>, pairs: &[(BTreeSet<String>, BTreeSet<String>)], predicted: usize) -> SetReport {
    let per_row: Vec<Prf> = pairs.iter().map(|(p, g)| Prf::of_sets(p, g)).collect();
    let (tp, fp, fn_) = per_row.iter().fold((0, 0, 0), |(a, b, c), s| {
        (a + s.true_positives, b + s.false_positives, c + s.false_negatives)
    });
    SetReport {
        task,
        mode,
        rows: pairs.len(),
        predicted_rows: predicted,
        micro: Prf::from_counts(tp, fp, fn_),
        macro_avg: Prf::mean(&per_row),
    }
}

fn gold_mode(task: Task, gold: &[Row]) -> Result<Option<SpdMode>> {
    if task != Task::Spd {
        return Ok(None);
    }
    let modes: BTreeSet<&str> = gold.iter().map(|r| r.mode.unwrap_or_default().name()).collect();
    if modes.len() > 1 {
        return Err(Error::Validation("SPD gold mixes derivation modes".into()));
    }
    Ok(Some(gold.first().and_then(|r| r.mode).unwrap_or_default()))
}

/// Micro- and macro-averaged PRF for SPD or RRU. Missing prediction rows
/// count as empty predictions.
pub fn eval_set_task(preds: &[Row], gold: &[Row], task: Task) -> Result<SetReport> {
    if !matches!(task, Task::Spd | Task::Rru) {
        return Err(Error::TaskMismatch(format!("{task} is not a set task")));
    }
    let pred_map = index(preds, "predictions")?;
    let gold_map = index(gold, "gold")?;
    check_subset(&pred_map, &gold_map, task)?;
    let mut pairs = Vec::with_capacity(gold_map.len());
    for (key, g) in &gold_map {
        let pred = match pred_map.get(key) {
            Some(p) => set_payload(task, p)?,
            None => BTreeSet::new(),
        };
        pairs.push((pred, set_payload(task, g)?));
    }
    Ok(score_pairs(task, gold_mode(task, gold)?, &pairs, pred_map.len()))
}

/// Recommendation scoring over per-dialog id sets. String payloads are
/// treated as utterances and searched for `<@id>` tokens.
pub fn eval_recommend(preds: &[Row], gold: &[Row]) -> Result<SetReport> {
    let pred_map = index(preds, "predictions")?;
    let gold_map = index(gold, "gold")?;
    check_subset(&pred_map, &gold_map, Task::Recommend)?;
    let mut pairs = Vec::with_capacity(gold_map.len());
    for (key, g) in &gold_map {
        let pred = match pred_map.get(key) {
            Some(p) => recommend_payload(p)?,
            None => BTreeSet::new(),
        };
        pairs.push((pred, set_payload(Task::Recommend, g)?));
    }
    Ok(score_pairs(Task::Recommend, None, &pairs, pred_map.len()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ActReport {
    pub rows: usize,
    pub predicted_rows: usize,
    pub accuracy: f64,
    pub per_class: BTreeMap<ActName, Prf>,
    pub micro: Prf,
    /// Mean over classes occurring in gold or predictions.
    pub macro_avg: Prf,
}

/// Per-class PRF over the salesperson acts plus micro and macro averages.
pub fn eval_act(preds: &[Row], gold: &[Row]) -> Result<ActReport> {
    let pred_map = index(preds, "predictions")?;
    let gold_map = index(gold, "gold")?;
    check_subset(&pred_map, &gold_map, Task::Act)?;
    let mut counts: BTreeMap<ActName, (u64, u64, u64)> = BTreeMap::new();
    let mut correct = 0usize;
    for (key, g) in &gold_map {
        let gold_act = act_payload(g)?;
        let pred_act = pred_map.get(key).map(|p| act_payload(p)).transpose()?;
        if pred_act == Some(gold_act) {
            correct += 1;
            counts.entry(gold_act).or_default().0 += 1;
        } else {
            counts.entry(gold_act).or_default().2 += 1;
            if let Some(p) = pred_act {
                counts.entry(p).or_default().1 += 1;
            }
        }
    }
    let per_class: BTreeMap<ActName, Prf> =
        counts.iter().map(|(act, &(tp, fp, fn_))| (*act, Prf::from_counts(tp, fp, fn_))).collect();
    let (tp, fp, fn_) = counts.values().fold((0, 0, 0), |(a, b, c), &(x, y, z)| (a + x, b + y, c + z));
    Ok(ActReport {
        rows: gold_map.len(),
        predicted_rows: pred_map.len(),
        accuracy: ratio(correct as u64, gold_map.len() as u64),
        micro: Prf::from_counts(tp, fp, fn_),
        macro_avg: Prf::mean(per_class.values()),
        per_class,
    })
}
