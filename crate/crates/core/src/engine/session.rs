//! Candidate-state tracking for one dialog session.

use std::collections::{BTreeMap, BTreeSet};

use super::act::{ActName, CustomerAct, SalesAct};
use crate::catalog::{AttributeType, Scene, Value, ValueSet};
use crate::error::{Error, Result};
use crate::ontology::Ontology;

/// Scene and ontology a session runs against, with region membership
/// precomputed.
#[derive(Debug)]
pub struct Setting<'a> {
    pub scene: &'a Scene,
    pub ontology: &'a Ontology,
    pub regions: Vec<(String, BTreeSet<u32>)>,
}

impl<'a> Setting<'a> {
    pub fn new(scene: &'a Scene, ontology: &'a Ontology) -> Result<Setting<'a>> {
        let regions = scene
            .regions
            .iter()
            .map(|r| Ok((r.label.clone(), scene.items_in_region(&r.label)?)))
            .collect::<Result<_>>()?;
        Ok(Setting { scene, ontology, regions })
    }

    pub fn region_items(&self, label: &str) -> Result<&BTreeSet<u32>> {
        self.regions
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, s)| s)
            .ok_or_else(|| Error::UnknownRegion(label.to_string()))
    }
}

/// The hidden target the customer is shopping for.
#[derive(Clone, Debug, PartialEq)]
pub struct GoalSpec {
    pub target_object_id: u32,
    pub attributes: BTreeMap<AttributeType, Value>,
}

impl GoalSpec {
    pub fn value(&self, attr: AttributeType) -> Result<&Value> {
        self.attributes
            .get(&attr)
            .ok_or_else(|| Error::UnknownAttribute { attribute: attr, domain: format!("target {}", self.target_object_id) })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Guess {
    pub attribute: AttributeType,
    pub value: Value,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SessionState {
    /// Round about to be played (1-based).
    pub round: u32,
    pub candidate_values: BTreeMap<AttributeType, ValueSet>,
    pub candidate_items: BTreeSet<u32>,
    pub history: Vec<(SalesAct, CustomerAct)>,
    /// Attributes the customer has expressed at least one preference on.
    pub elicited: BTreeSet<AttributeType>,
    pub last_guess: Option<Guess>,
    pub included_regions: Vec<String>,
    pub excluded_regions: Vec<String>,
    pub rejected_items: BTreeSet<u32>,
    pub accepted_item: Option<u32>,
}

/// Items whose every attribute value lies in the corresponding candidate set.
pub fn consistent_items(candidate_values: &BTreeMap<AttributeType, ValueSet>, scene: &Scene) -> BTreeSet<u32> {
    scene
        .items
        .iter()
        .filter(|item| {
            candidate_values
                .iter()
                .all(|(attr, allowed)| item.attributes.get(attr).is_some_and(|v| allowed.contains(v)))
        })
        .map(|item| item.object_id)
        .collect()
}

impl SessionState {
    pub fn new(scene: &Scene) -> Result<SessionState> {
        if scene.items.is_empty() {
            return Err(Error::EmptyScene(scene.scene_id.clone()));
        }
        let candidate_values = scene
            .domain
            .attributes()
            .map(|a| Ok((a, scene.scene_value_universe(a)?)))
            .collect::<Result<_>>()?;
        Ok(SessionState {
            round: 1,
            candidate_values,
            candidate_items: scene.object_ids(),
            history: Vec::new(),
            elicited: BTreeSet::new(),
            last_guess: None,
            included_regions: Vec::new(),
            excluded_regions: Vec::new(),
            rejected_items: BTreeSet::new(),
            accepted_item: None,
        })
    }

    pub fn elicited_count(&self) -> usize {
        self.elicited.len()
    }

    pub fn is_finished(&self) -> bool {
        self.accepted_item.is_some()
    }

    /// Distinct values of `attr` among the remaining candidate items.
    pub fn live_values(&self, scene: &Scene, attr: AttributeType) -> ValueSet {
        scene
            .items
            .iter()
            .filter(|i| self.candidate_items.contains(&i.object_id))
            .filter_map(|i| i.attributes.get(&attr).cloned())
            .collect()
    }

    /// Applies one salesperson/customer exchange and advances the round.
    pub fn apply(&mut self, s_act: &SalesAct, c_act: &CustomerAct, setting: &Setting<'_>) -> Result<()> {
        if s_act.name().partner() != Some(c_act.name()) {
            return Err(Error::InconsistentState(format!("{} cannot answer {}", c_act.name(), s_act.name())));
        }
        let ont = setting.ontology;
        match c_act {
            CustomerAct::AnswerPreference { attribute, concept_id } => {
                let concept = ont.concept(concept_id)?;
                self.restrict(*attribute, |v| concept.contains(v))?;
                self.elicited.insert(*attribute);
            }
            CustomerAct::NegatePreference { attribute, concept_id } => {
                let concept = ont.concept(concept_id)?;
                self.restrict(*attribute, |v| !concept.contains(v))?;
                self.elicited.insert(*attribute);
            }
            CustomerAct::RespondPrompt { attribute, concept_id, accept } => {
                let concept = ont.concept(concept_id)?;
                self.restrict(*attribute, |v| concept.contains(v) == *accept)?;
                self.elicited.insert(*attribute);
            }
            CustomerAct::RespondAttributeValue { attribute, value, accept } => {
                self.restrict(*attribute, |v| (v == value) == *accept)?;
                self.last_guess = Some(Guess { attribute: *attribute, value: value.clone(), accepted: *accept });
            }
            CustomerAct::ChooseAttributeValue { attribute, value } => {
                self.restrict(*attribute, |v| v == value)?;
            }
            CustomerAct::JudgeRegion { region_label, accept } => {
                setting.region_items(region_label)?;
                if *accept {
                    self.included_regions.push(region_label.clone());
                } else {
                    self.excluded_regions.push(region_label.clone());
                }
            }
            CustomerAct::RespondRecommendation { object_id, accept } => {
                if *accept {
                    self.accepted_item = Some(*object_id);
                } else {
                    self.rejected_items.insert(*object_id);
                }
            }
        }
        if !matches!(c_act, CustomerAct::RespondAttributeValue { .. }) {
            self.last_guess = None;
        }
        self.recompute_items(setting)?;
        self.history.push((s_act.clone(), c_act.clone()));
        self.round += 1;
        Ok(())
    }

    fn restrict(&mut self, attr: AttributeType, keep: impl Fn(&Value) -> bool) -> Result<()> {
        let set = self
            .candidate_values
            .get_mut(&attr)
            .ok_or_else(|| Error::InconsistentState(format!("attribute {attr} is not tracked in this scene")))?;
        set.retain(|v| keep(v));
        if set.is_empty() {
            return Err(Error::InconsistentState(format!("candidate values of {attr} became empty")));
        }
        Ok(())
    }

    fn recompute_items(&mut self, setting: &Setting<'_>) -> Result<()> {
        let mut items = consistent_items(&self.candidate_values, setting.scene);
        for label in &self.included_regions {
            let inside = setting.region_items(label)?;
            items.retain(|id| inside.contains(id));
        }
        for label in &self.excluded_regions {
            let inside = setting.region_items(label)?;
            items.retain(|id| !inside.contains(id));
        }
        items.retain(|id| !self.rejected_items.contains(id));
        if let Some(chosen) = self.accepted_item {
            items.retain(|id| *id == chosen);
        }
        if items.is_empty() {
            return Err(Error::InconsistentState("candidate item set became empty".into()));
        }
        self.candidate_items = items;
        Ok(())
    }

    /// Whether the previous exchange was a rejected guess or revision.
    pub fn after_rejected_guess(&self) -> Option<&Guess> {
        let last = self.history.last()?;
        let was_guess = matches!(last.0.name(), ActName::GuessAttributeValue | ActName::ReviseAttributeValue);
        self.last_guess.as_ref().filter(|g| was_guess && !g.accepted)
    }
}

/// Non-mutating form of [`SessionState::apply`].
pub fn apply_turn(
    state: &SessionState,
    s_act: &SalesAct,
    c_act: &CustomerAct,
    setting: &Setting<'_>,
) -> Result<SessionState> {
    let mut next = state.clone();
    next.apply(s_act, c_act, setting)?;
    Ok(next)
}
