//! Gold rows derived from annotated dialog flows.

use serde_json::{json, Value as Json};

use super::records::Row;
use super::Task;
use crate::catalog::{AttributeType, Catalog, Scene};
use crate::engine::{ActName, CustomerAct, DialogFlow, Round};
use crate::error::{Error, Result};
use crate::ontology::{filter_scene_values, Ontology, Polarity, PreferenceClause, SpdMode};

/// The constraint a customer response places on its attribute, if any.
pub fn clause_of(act: &CustomerAct) -> Option<PreferenceClause> {
    let like = |yes: bool| if yes { Polarity::Like } else { Polarity::Dislike };
    Some(match act {
        CustomerAct::AnswerPreference { attribute, concept_id } => {
            PreferenceClause::concept(*attribute, Polarity::Like, concept_id.clone())
        }
        CustomerAct::NegatePreference { attribute, concept_id } => {
            PreferenceClause::concept(*attribute, Polarity::Dislike, concept_id.clone())
        }
        CustomerAct::RespondPrompt { attribute, concept_id, accept } => {
            PreferenceClause::concept(*attribute, like(*accept), concept_id.clone())
        }
        CustomerAct::RespondAttributeValue { attribute, value, accept } => {
            PreferenceClause::value(*attribute, like(*accept), value.clone())
        }
        CustomerAct::ChooseAttributeValue { attribute, value } => {
            PreferenceClause::value(*attribute, Polarity::Like, value.clone())
        }
        CustomerAct::JudgeRegion { .. } | CustomerAct::RespondRecommendation { .. } => return None,
    })
}

fn is_eliciting(act: ActName) -> bool {
    matches!(act, ActName::AskPreference | ActName::ExcludePreference | ActName::PromptPreference)
}

/// SPD gold for round `idx` (0-based) of `rounds`, or `None` if the round
/// does not elicit a preference. The discussed attribute is the one the
/// customer answered about.
pub fn spd_gold(
    ont: &Ontology,
    scene: &Scene,
    rounds: &[Round<'_>],
    idx: usize,
    mode: SpdMode,
) -> Result<Option<(AttributeType, Vec<String>)>> {
    let round = &rounds[idx];
    if !is_eliciting(round.salesperson.act) {
        return Ok(None);
    }
    let current = clause_of(&round.customer_act()?)
        .ok_or_else(|| Error::Validation(format!("round {} answers without a preference", round.number)))?;
    let attr = current.attribute;
    let clauses = match mode {
        SpdMode::SceneOnly => vec![current],
        SpdMode::Cumulative => {
            let mut all = Vec::new();
            for r in &rounds[..=idx] {
                if let Some(c) = clause_of(&r.customer_act()?).filter(|c| c.attribute == attr) {
                    all.push(c);
                }
            }
            all
        }
    };
    let values = filter_scene_values(ont, scene, &clauses)?;
    Ok(Some((attr, values.iter().map(|v| v.to_string()).collect())))
}

fn flow_rows(flow: &DialogFlow, ont: &Ontology, catalog: &Catalog, task: Task, mode: SpdMode) -> Result<Vec<Row>> {
    let scene = catalog
        .scene(&flow.scene_id)
        .ok_or_else(|| Error::Validation(format!("dialog {}: unknown scene `{}`", flow.dialog_id, flow.scene_id)))?;
    let rounds = flow.rounds()?;
    let mut rows = Vec::new();
    let mut push = |round: u32, payload: Json| rows.push(Row::new(flow.dialog_id.clone(), round, payload));
    match task {
        Task::Spd => {
            for idx in 0..rounds.len() {
                if let Some((_, values)) = spd_gold(ont, scene, &rounds, idx, mode)? {
                    push(rounds[idx].number, json!(values));
                }
            }
        }
        Task::Rru => {
            for round in &rounds {
                if let Some(label) = round.salesperson.slots.region_label.as_ref().filter(|_| round.salesperson.act == ActName::ReferRegion) {
                    push(round.number, json!(scene.items_in_region(label)?));
                }
            }
        }
        Task::Act => {
            for round in &rounds {
                push(round.number, json!(round.salesperson.act.as_str()));
            }
        }
        Task::Response => {
            for round in &rounds {
                let text = round.salesperson.utterance.as_ref().ok_or_else(|| {
                    Error::Validation(format!("dialog {} round {} has no utterance; realize it first", flow.dialog_id, round.number))
                })?;
                push(round.number, json!(text));
            }
        }
        Task::Recommend => {
            if let Some(last) = rounds.last() {
                push(last.number, json!([flow.target_object_id]));
            }
        }
    }
    if task == Task::Spd {
        for r in &mut rows {
            r.mode = Some(mode);
        }
    }
    Ok(rows)
}

/// Gold rows for `task`, restricted to the rounds the task is evaluated on.
/// `mode` only affects SPD.
pub fn build_gold(flows: &[DialogFlow], ont: &Ontology, catalog: &Catalog, task: Task, mode: SpdMode) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for flow in flows {
        rows.extend(flow_rows(flow, ont, catalog, task, mode)?);
    }
    Ok(rows)
}
