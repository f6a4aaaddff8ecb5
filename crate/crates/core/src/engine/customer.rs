//! Truthful customer simulator.
//!
//! The customer knows the target item's attribute values and only ever
//! emits concepts and judgements consistent with them.

use rand::seq::SliceRandom;
use rand::Rng;

use super::act::{CustomerAct, SalesAct};
use super::session::{GoalSpec, SessionState, Setting};
use crate::catalog::AttributeType;
use crate::error::{Error, Result};

/// Concepts of `attr` that exclude the target's value but still name some
/// value present in the scene.
fn truthful_dislikes<'o>(setting: &Setting<'o>, goal: &GoalSpec, attr: AttributeType) -> Result<Vec<&'o str>> {
    let target = goal.value(attr)?;
    let universe = setting.scene.scene_value_universe(attr)?;
    Ok(setting
        .ontology
        .concepts_of(attr)
        .filter(|c| !c.contains(target) && c.values.iter().any(|v| universe.contains(v)))
        .map(|c| c.concept_id.as_str())
        .collect())
}

pub fn customer_step<R: Rng + ?Sized>(
    _state: &SessionState,
    goal: &GoalSpec,
    s_act: &SalesAct,
    setting: &Setting<'_>,
    rng: &mut R,
) -> Result<CustomerAct> {
    let ont = setting.ontology;
    Ok(match s_act {
        SalesAct::AskPreference { attribute } => {
            let target = goal.value(*attribute)?;
            let concepts = ont.concepts_for_value(*attribute, target)?;
            let concept = concepts.choose(rng).ok_or(Error::NoTruthfulConcept)?;
            CustomerAct::AnswerPreference { attribute: *attribute, concept_id: concept.concept_id.clone() }
        }
        SalesAct::ExcludePreference { attribute } => {
            let own = truthful_dislikes(setting, goal, *attribute)?;
            if let Some(concept) = own.choose(rng) {
                CustomerAct::NegatePreference { attribute: *attribute, concept_id: concept.to_string() }
            } else {
                let mut others = Vec::new();
                for attr in setting.scene.domain.attributes().filter(|a| a != attribute) {
                    let options = truthful_dislikes(setting, goal, attr)?;
                    if !options.is_empty() {
                        others.push((attr, options));
                    }
                }
                let (attr, options) = others.choose(rng).ok_or(Error::NoTruthfulConcept)?;
                let concept = options.choose(rng).expect("non-empty options");
                CustomerAct::NegatePreference { attribute: *attr, concept_id: concept.to_string() }
            }
        }
        SalesAct::PromptPreference { attribute, concept_id } => {
            let accept = ont.concept(concept_id)?.contains(goal.value(*attribute)?);
            CustomerAct::RespondPrompt { attribute: *attribute, concept_id: concept_id.clone(), accept }
        }
        SalesAct::GuessAttributeValue { attribute, value } | SalesAct::ReviseAttributeValue { attribute, value } => {
            let accept = goal.value(*attribute)? == value;
            CustomerAct::RespondAttributeValue { attribute: *attribute, value: value.clone(), accept }
        }
        SalesAct::DisplayCandidateValues { attribute, values } => {
            let target = goal.value(*attribute)?;
            if !values.contains(target) {
                return Err(Error::InconsistentState(format!(
                    "displayed {attribute} values omit the target's value `{target}`"
                )));
            }
            CustomerAct::ChooseAttributeValue { attribute: *attribute, value: target.clone() }
        }
        SalesAct::ReferRegion { region_label } => {
            let accept = setting.region_items(region_label)?.contains(&goal.target_object_id);
            CustomerAct::JudgeRegion { region_label: region_label.clone(), accept }
        }
        SalesAct::RecommendItem { object_id } => {
            CustomerAct::RespondRecommendation { object_id: *object_id, accept: *object_id == goal.target_object_id }
        }
    })
}
