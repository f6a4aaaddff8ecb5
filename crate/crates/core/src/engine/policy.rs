//! Salesperson policy: per-round act transition matrices, eligibility
//! guards, and slot selection.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::act::{ActName, SalesAct};
use super::session::{SessionState, Setting};
use crate::catalog::{read_text, AttributeType, Value, ValueSet};
use crate::error::{Error, Result};

/// Row key for the first round, which has no previous act.
pub const START: &str = "START";

const ROW_TOLERANCE: f64 = 1e-9;

/// Act probabilities conditioned on the previous act.
pub type TransitionMatrix = BTreeMap<String, BTreeMap<ActName, f64>>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyConfig {
    /// Matrices for rounds 1..=8. Round 1 uses the `START` row; later
    /// rounds use the row of the previous salesperson act.
    pub rounds: Vec<TransitionMatrix>,
    /// Used after round 8; defaults to the round-8 matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stationary: Option<TransitionMatrix>,
    pub display_min: usize,
    pub display_max: usize,
    pub recommend_max: usize,
    pub refer_region_min_elicited: usize,
    pub max_rounds: u32,
    #[serde(default)]
    pub rng_seed: u64,
}

pub const SCHEDULED_ROUNDS: usize = 8;

impl PolicyConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<PolicyConfig> {
        let path = path.as_ref();
        let cfg: PolicyConfig =
            serde_json::from_str(&read_text(path)?).map_err(|e| Error::malformed(path, e))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("policy serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Validation(format!("policy: {m}")));
        if self.rounds.len() != SCHEDULED_ROUNDS {
            return fail(format!("expected {SCHEDULED_ROUNDS} round matrices, found {}", self.rounds.len()));
        }
        if self.display_min > self.display_max {
            return fail("display_min exceeds display_max".into());
        }
        if self.max_rounds < 1 {
            return fail("max_rounds must be at least 1".into());
        }
        let act_rows: Vec<String> = ActName::SALESPERSON.iter().map(|a| a.as_str().to_string()).collect();
        for (i, matrix) in self.rounds.iter().enumerate().map(|(i, m)| (i + 1, m)).chain(self.stationary.iter().map(|m| (0, m))) {
            let which = if i == 0 { "stationary".to_string() } else { format!("round {i}") };
            let required: Vec<String> = if i == 1 { vec![START.to_string()] } else { act_rows.clone() };
            for key in &required {
                if !matrix.contains_key(key) {
                    return fail(format!("{which} matrix lacks row {key}"));
                }
            }
            for (key, row) in matrix {
                if key != START && ActName::parse_lenient(key).ok().and_then(|a| a.salesperson_index()).is_none() {
                    return fail(format!("{which} matrix has unknown row {key}"));
                }
                let mut sum = 0.0;
                for (act, p) in row {
                    if act.salesperson_index().is_none() {
                        return fail(format!("{which} row {key} targets customer act {act}"));
                    }
                    if !(p.is_finite() && *p >= 0.0) {
                        return fail(format!("{which} row {key} has invalid probability {p}"));
                    }
                    sum += p;
                }
                if (sum - 1.0).abs() > ROW_TOLERANCE {
                    return fail(format!("{which} row {key} sums to {sum}"));
                }
            }
        }
        Ok(())
    }

    /// Transition row for `round` given the previous salesperson act.
    pub fn row(&self, round: u32, previous: Option<ActName>) -> &BTreeMap<ActName, f64> {
        let key = match (round, previous) {
            (1, _) | (_, None) => START,
            (_, Some(prev)) => prev.as_str(),
        };
        let matrix = if key == START {
            &self.rounds[0]
        } else if (round as usize) <= SCHEDULED_ROUNDS {
            &self.rounds[round as usize - 1]
        } else {
            self.stationary.as_ref().unwrap_or(&self.rounds[SCHEDULED_ROUNDS - 1])
        };
        // validate() guarantees START in round 1 and act rows elsewhere.
        matrix.get(key).or_else(|| self.rounds[0].get(START)).expect("validated transition row")
    }
}

/// Attributes whose remaining candidate items still disagree, with their
/// live value sets.
fn ambiguous(state: &SessionState, setting: &Setting<'_>) -> Vec<(AttributeType, ValueSet)> {
    setting
        .scene
        .domain
        .attributes()
        .map(|a| (a, state.live_values(setting.scene, a)))
        .filter(|(_, live)| live.len() > 1)
        .collect()
}

/// A concept splits the live values if it keeps some but not all of them.
fn splitting_concepts<'o>(setting: &Setting<'o>, attr: AttributeType, live: &ValueSet) -> Vec<&'o str> {
    setting
        .ontology
        .concepts_of(attr)
        .filter(|c| {
            let inside = live.iter().filter(|v| c.contains(v)).count();
            inside > 0 && inside < live.len()
        })
        .map(|c| c.concept_id.as_str())
        .collect()
}

/// Regions whose yes/no judgement would both change the candidate items.
fn informative_regions<'s>(state: &SessionState, setting: &'s Setting<'_>) -> Vec<&'s str> {
    setting
        .regions
        .iter()
        .filter(|(_, inside)| {
            let overlap = state.candidate_items.iter().filter(|id| inside.contains(id)).count();
            overlap > 0 && overlap < state.candidate_items.len()
        })
        .map(|(label, _)| label.as_str())
        .collect()
}

/// Salesperson acts allowed in the current state. Never empty:
/// `RECOMMEND_ITEM` is added whenever nothing else applies.
pub fn eligible_acts(state: &SessionState, cfg: &PolicyConfig, setting: &Setting<'_>) -> BTreeSet<ActName> {
    let mut acts = BTreeSet::new();
    let amb = ambiguous(state, setting);
    let elicited = state.elicited_count();

    if !amb.is_empty() {
        acts.insert(ActName::AskPreference);
        acts.insert(ActName::ExcludePreference);
        if amb.iter().any(|(a, live)| !splitting_concepts(setting, *a, live).is_empty()) {
            acts.insert(ActName::PromptPreference);
        }
        if elicited >= 1 {
            acts.insert(ActName::GuessAttributeValue);
        }
        if let Some(g) = state.after_rejected_guess() {
            if amb.iter().any(|(a, _)| *a == g.attribute) {
                acts.insert(ActName::ReviseAttributeValue);
            }
        }
    }
    if elicited >= 1
        && setting.scene.domain.attributes().any(|a| {
            let n = state.live_values(setting.scene, a).len();
            n > 1 && n >= cfg.display_min && n <= cfg.display_max
        })
    {
        acts.insert(ActName::DisplayCandidateValues);
    }
    if elicited >= cfg.refer_region_min_elicited && !informative_regions(state, setting).is_empty() {
        acts.insert(ActName::ReferRegion);
    }
    if state.candidate_items.len() <= cfg.recommend_max || acts.is_empty() {
        acts.insert(ActName::RecommendItem);
    }
    acts
}

/// Whether the state offers no way to narrow candidates except recommending.
pub fn is_stalled(state: &SessionState, cfg: &PolicyConfig, setting: &Setting<'_>) -> bool {
    let acts = eligible_acts(state, cfg, setting);
    acts.len() == 1 && acts.contains(&ActName::RecommendItem) && state.candidate_items.len() > cfg.recommend_max
}

/// Samples an act from `row` restricted to `eligible`, renormalized. Falls
/// back to a uniform choice when the row puts no mass on any eligible act.
pub fn sample_act<R: Rng + ?Sized>(row: &BTreeMap<ActName, f64>, eligible: &BTreeSet<ActName>, rng: &mut R) -> ActName {
    let weighted: Vec<(ActName, f64)> =
        eligible.iter().map(|a| (*a, row.get(a).copied().unwrap_or(0.0))).collect();
    let total: f64 = weighted.iter().map(|(_, w)| w).sum();
    if total <= 0.0 {
        let acts: Vec<ActName> = eligible.iter().copied().collect();
        return acts[rng.gen_range(0..acts.len())];
    }
    let mut draw = rng.gen::<f64>() * total;
    for (act, w) in &weighted {
        if draw < *w {
            return *act;
        }
        draw -= w;
    }
    weighted.iter().rev().find(|(_, w)| *w > 0.0).map(|(a, _)| *a).expect("positive total")
}

/// Picks the attribute with the most live values, preferring attributes the
/// given act has not targeted yet; ties go to registry order.
fn pick_attribute<'a>(
    candidates: impl Iterator<Item = &'a (AttributeType, ValueSet)>,
    state: &SessionState,
    act: ActName,
) -> Option<&'a (AttributeType, ValueSet)> {
    let targeted: BTreeSet<AttributeType> =
        state.history.iter().filter(|(s, _)| s.name() == act).filter_map(|(s, _)| s.attribute()).collect();
    candidates.min_by_key(|(a, live)| (targeted.contains(a), std::cmp::Reverse(live.len()), *a))
}

fn uniform<'a, T, R: Rng + ?Sized>(items: &'a [T], rng: &mut R) -> &'a T {
    items.choose(rng).expect("non-empty choice")
}

/// Chooses the next salesperson act and its slots. `banned` removes acts
/// that were already tried this round and could not be answered.
pub fn salesperson_step<R: Rng + ?Sized>(
    state: &SessionState,
    cfg: &PolicyConfig,
    setting: &Setting<'_>,
    banned: &BTreeSet<ActName>,
    rng: &mut R,
) -> SalesAct {
    let mut eligible = eligible_acts(state, cfg, setting);
    eligible.retain(|a| !banned.contains(a));
    if eligible.is_empty() {
        eligible.insert(ActName::RecommendItem);
    }
    let previous = state.history.last().map(|(s, _)| s.name());
    let act = sample_act(cfg.row(state.round, previous), &eligible, rng);
    choose_slots(act, state, cfg, setting, rng)
}

fn choose_slots<R: Rng + ?Sized>(
    act: ActName,
    state: &SessionState,
    cfg: &PolicyConfig,
    setting: &Setting<'_>,
    rng: &mut R,
) -> SalesAct {
    let amb = ambiguous(state, setting);
    match act {
        ActName::AskPreference => {
            let (attribute, _) = pick_attribute(amb.iter(), state, act).expect("eligible ask");
            SalesAct::AskPreference { attribute: *attribute }
        }
        ActName::ExcludePreference => {
            let (attribute, _) = pick_attribute(amb.iter(), state, act).expect("eligible exclude");
            SalesAct::ExcludePreference { attribute: *attribute }
        }
        ActName::PromptPreference => {
            let with_concepts: Vec<_> =
                amb.iter().filter(|(a, live)| !splitting_concepts(setting, *a, live).is_empty()).cloned().collect();
            let (attribute, live) = pick_attribute(with_concepts.iter(), state, act).expect("eligible prompt");
            let prompted: BTreeSet<&str> = state
                .history
                .iter()
                .filter_map(|(s, _)| match s {
                    SalesAct::PromptPreference { concept_id, .. } => Some(concept_id.as_str()),
                    _ => None,
                })
                .collect();
            let options = splitting_concepts(setting, *attribute, live);
            let fresh: Vec<&str> = options.iter().copied().filter(|c| !prompted.contains(c)).collect();
            let pool = if fresh.is_empty() { &options } else { &fresh };
            SalesAct::PromptPreference { attribute: *attribute, concept_id: uniform(pool, rng).to_string() }
        }
        ActName::GuessAttributeValue => {
            let elicited: Vec<_> = amb.iter().filter(|(a, _)| state.elicited.contains(a)).cloned().collect();
            let pool = if elicited.is_empty() { &amb } else { &elicited };
            let (attribute, live) =
                pool.iter().min_by_key(|(a, live)| (std::cmp::Reverse(live.len()), *a)).expect("eligible guess");
            let values: Vec<Value> = live.iter().cloned().collect();
            SalesAct::GuessAttributeValue { attribute: *attribute, value: uniform(&values, rng).clone() }
        }
        ActName::ReviseAttributeValue => {
            let guess = state.after_rejected_guess().expect("eligible revise");
            let live = state.live_values(setting.scene, guess.attribute);
            let values: Vec<Value> = live.into_iter().collect();
            SalesAct::ReviseAttributeValue { attribute: guess.attribute, value: uniform(&values, rng).clone() }
        }
        ActName::DisplayCandidateValues => {
            let (attribute, live) = setting
                .scene
                .domain
                .attributes()
                .map(|a| (a, state.live_values(setting.scene, a)))
                .filter(|(_, live)| live.len() > 1 && live.len() >= cfg.display_min && live.len() <= cfg.display_max)
                .min_by_key(|(a, live)| (std::cmp::Reverse(live.len()), *a))
                .expect("eligible display");
            SalesAct::DisplayCandidateValues { attribute, values: live.into_iter().collect() }
        }
        ActName::ReferRegion => {
            let regions = informative_regions(state, setting);
            SalesAct::ReferRegion { region_label: uniform(&regions, rng).to_string() }
        }
        ActName::RecommendItem => {
            let items: Vec<u32> = state.candidate_items.iter().copied().collect();
            SalesAct::RecommendItem { object_id: *uniform(&items, rng) }
        }
        other => unreachable!("{other} is not a salesperson act"),
    }
}
