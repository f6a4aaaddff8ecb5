//! Self-play loop: goal generation, alternating salesperson/customer turns,
//! and batch generation over a catalog.

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::act::{ActName, Speaker};
use super::customer::customer_step;
use super::flow::{DialogFlow, Outcome, Turn};
use super::policy::{salesperson_step, PolicyConfig};
use super::session::{GoalSpec, SessionState, Setting};
use crate::catalog::{AttributeType, Catalog, Scene, Value};
use crate::error::{Error, Result};
use crate::ontology::Ontology;
use crate::par;

pub type SessionRng = ChaCha8Rng;

pub fn session_rng(seed: u64) -> SessionRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Per-session seed; independent of how sessions are scheduled.
pub fn session_seed(base_seed: u64, index: usize) -> u64 {
    base_seed ^ index as u64
}

pub fn dialog_id(index: usize) -> String {
    format!("dlg-{index:06}")
}

/// Uniformly picks the target item.
pub fn generate_goal<R: Rng + ?Sized>(scene: &Scene, rng: &mut R) -> Result<GoalSpec> {
    if scene.items.is_empty() {
        return Err(Error::EmptyScene(scene.scene_id.clone()));
    }
    let item = &scene.items[rng.gen_range(0..scene.items.len())];
    Ok(GoalSpec { target_object_id: item.object_id, attributes: item.attributes.clone() })
}

fn annotate(state: &SessionState, round: u32, speaker: Speaker, act: ActName, slots: super::act::Slots) -> Turn {
    let candidate_values: BTreeMap<AttributeType, Vec<Value>> =
        state.candidate_values.iter().map(|(a, vs)| (*a, vs.iter().cloned().collect())).collect();
    Turn {
        round,
        speaker,
        act,
        slots,
        candidate_items: state.candidate_items.iter().copied().collect(),
        candidate_values,
        utterance: None,
    }
}

/// Runs one dialog to success or the round cap.
pub fn run_dialog(setting: &Setting<'_>, cfg: &PolicyConfig, seed: u64, dialog_id: impl Into<String>) -> Result<DialogFlow> {
    let mut rng = session_rng(seed);
    let goal = generate_goal(setting.scene, &mut rng)?;
    let mut state = SessionState::new(setting.scene)?;
    let mut turns = Vec::new();

    while state.round <= cfg.max_rounds && !state.is_finished() {
        let mut banned = BTreeSet::new();
        let (s_act, c_act) = loop {
            let s_act = salesperson_step(&state, cfg, setting, &banned, &mut rng);
            match customer_step(&state, &goal, &s_act, setting, &mut rng) {
                Ok(c_act) => break (s_act, c_act),
                Err(Error::NoTruthfulConcept) if !banned.contains(&s_act.name()) => {
                    banned.insert(s_act.name());
                }
                Err(e) => return Err(e),
            }
        };
        let round = state.round;
        turns.push(annotate(&state, round, Speaker::Salesperson, s_act.name(), s_act.slots()));
        state.apply(&s_act, &c_act, setting)?;
        if !state.candidate_items.contains(&goal.target_object_id) {
            return Err(Error::InconsistentState(format!("target {} dropped in round {round}", goal.target_object_id)));
        }
        turns.push(annotate(&state, round, Speaker::Customer, c_act.name(), c_act.slots()));
    }

    Ok(DialogFlow {
        dialog_id: dialog_id.into(),
        scene_id: setting.scene.scene_id.clone(),
        target_object_id: goal.target_object_id,
        outcome: if state.is_finished() { Outcome::Success } else { Outcome::MaxRoundsExceeded },
        turns,
    })
}

/// Batch dialog generation over every scene of a catalog.
pub struct Simulator<'a> {
    settings: Vec<Setting<'a>>,
    config: &'a PolicyConfig,
}

impl<'a> Simulator<'a> {
    pub fn new(catalog: &'a Catalog, ontology: &'a Ontology, config: &'a PolicyConfig) -> Result<Simulator<'a>> {
        if catalog.scenes.is_empty() {
            return Err(Error::Validation("catalog has no scenes".into()));
        }
        let settings = catalog.scenes.iter().map(|s| Setting::new(s, ontology)).collect::<Result<_>>()?;
        Ok(Simulator { settings, config })
    }

    pub fn settings(&self) -> &[Setting<'a>] {
        &self.settings
    }

    pub fn setting_for(&self, scene_id: &str) -> Option<&Setting<'a>> {
        self.settings.iter().find(|s| s.scene.scene_id == scene_id)
    }

    /// Dialog `index`: scenes are assigned round-robin.
    pub fn dialog(&self, index: usize, base_seed: u64) -> Result<DialogFlow> {
        let setting = &self.settings[index % self.settings.len()];
        run_dialog(setting, self.config, session_seed(base_seed, index), dialog_id(index))
    }

    pub fn run(&self, indices: Range<usize>, base_seed: u64, jobs: usize) -> Result<Vec<DialogFlow>> {
        let start = indices.start;
        par::try_map_indexed(indices.len(), jobs, |i| self.dialog(start + i, base_seed))
    }
}
