//! Corpus statistics and salesperson act transitions.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use serde::Serialize;

use crate::engine::policy::START;
use crate::engine::{ActName, DialogFlow, Outcome, Speaker};
use crate::error::{Error, Result};

/// Rounds covered by the transition table.
pub const TRANSITION_ROUNDS: u32 = 8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Transition {
    pub round: u32,
    pub from: String,
    pub to: ActName,
    pub count: u64,
    /// Share of all transitions observed in this round.
    pub share: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatsReport {
    pub dialogs: usize,
    pub successful_dialogs: usize,
    pub utterances: usize,
    pub avg_utterances_per_dialog: f64,
    pub avg_salesperson_acts_per_dialog: f64,
    pub avg_subjective_preferences_per_dialog: f64,
    pub scenes: usize,
    pub avg_objects_per_scene: f64,
    /// Entry `r - 1`: mean candidate items at the start of round `r`. Dialogs
    /// that have already ended contribute their final count.
    pub mean_candidate_items_per_round: Vec<f64>,
    pub transitions: Vec<Transition>,
}

fn is_subjective(act: ActName) -> bool {
    matches!(act, ActName::AnswerPreference | ActName::NegatePreference | ActName::RespondPrompt)
}

pub fn corpus_stats(flows: &[DialogFlow]) -> Result<StatsReport> {
    if flows.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let n = flows.len() as f64;
    let utterances: usize = flows.iter().map(|f| f.turns.len()).sum();
    let sales: usize = flows.iter().map(|f| f.salesperson_act_count()).sum();
    let subjective = flows.iter().flat_map(|f| &f.turns).filter(|t| is_subjective(t.act)).count();

    let mut scene_objects: BTreeMap<&str, usize> = BTreeMap::new();
    for f in flows {
        if let Some(first) = f.turns.first() {
            scene_objects.entry(&f.scene_id).or_insert(first.candidate_items.len());
        }
    }

    let max_round = flows.iter().filter_map(|f| f.turns.last()).map(|t| t.round).max().unwrap_or(0);
    let mut sums = vec![0usize; max_round as usize];
    for f in flows {
        let mut current = f.turns.first().map_or(0, |t| t.candidate_items.len());
        let opening: BTreeMap<u32, usize> = f
            .turns
            .iter()
            .filter(|t| t.speaker == Speaker::Salesperson)
            .map(|t| (t.round, t.candidate_items.len()))
            .collect();
        let last = f.turns.last().map_or(current, |t| t.candidate_items.len());
        for (i, sum) in sums.iter_mut().enumerate() {
            current = opening.get(&(i as u32 + 1)).copied().unwrap_or(last.min(current));
            *sum += current;
        }
    }

    let mut counts: BTreeMap<(u32, String, ActName), u64> = BTreeMap::new();
    for f in flows {
        let mut prev = START.to_string();
        for t in f.turns.iter().filter(|t| t.speaker == Speaker::Salesperson && t.round <= TRANSITION_ROUNDS) {
            *counts.entry((t.round, prev.clone(), t.act)).or_default() += 1;
            prev = t.act.as_str().to_string();
        }
    }
    let mut per_round: BTreeMap<u32, u64> = BTreeMap::new();
    for ((round, _, _), c) in &counts {
        *per_round.entry(*round).or_default() += c;
    }
    let transitions = counts
        .into_iter()
        .map(|((round, from, to), count)| Transition { round, from, to, count, share: count as f64 / per_round[&round] as f64 })
        .collect();

    Ok(StatsReport {
        dialogs: flows.len(),
        successful_dialogs: flows.iter().filter(|f| f.outcome == Outcome::Success).count(),
        utterances,
        avg_utterances_per_dialog: utterances as f64 / n,
        avg_salesperson_acts_per_dialog: sales as f64 / n,
        avg_subjective_preferences_per_dialog: subjective as f64 / n,
        scenes: scene_objects.len(),
        avg_objects_per_scene: if scene_objects.is_empty() {
            0.0
        } else {
            scene_objects.values().sum::<usize>() as f64 / scene_objects.len() as f64
        },
        mean_candidate_items_per_round: sums.into_iter().map(|s| s as f64 / n).collect(),
        transitions,
    })
}

impl StatsReport {
    /// Share of round-`round` transitions landing on `act`, from any source.
    pub fn round_share(&self, round: u32, act: ActName) -> f64 {
        self.transitions.iter().filter(|t| t.round == round && t.to == act).fold(0.0, |acc, t| acc + t.share)
    }

    pub fn acts_in_round(&self, round: u32) -> BTreeSet<ActName> {
        self.transitions.iter().filter(|t| t.round == round).map(|t| t.to).collect()
    }

    /// Long-format CSV: `section,round,from,to,count,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("section,round,from,to,count,value\n");
        let scalars = [
            ("dialogs", self.dialogs as f64),
            ("successful_dialogs", self.successful_dialogs as f64),
            ("utterances", self.utterances as f64),
            ("avg_utterances_per_dialog", self.avg_utterances_per_dialog),
            ("avg_salesperson_acts_per_dialog", self.avg_salesperson_acts_per_dialog),
            ("avg_subjective_preferences_per_dialog", self.avg_subjective_preferences_per_dialog),
            ("avg_objects_per_scene", self.avg_objects_per_scene),
        ];
        for (name, value) in scalars {
            let _ = writeln!(out, "{name},,,,,{value}");
        }
        for (i, mean) in self.mean_candidate_items_per_round.iter().enumerate() {
            let _ = writeln!(out, "mean_candidate_items,{},,,,{mean}", i + 1);
        }
        for t in &self.transitions {
            let _ = writeln!(out, "transition,{},{},{},{},{}", t.round, t.from, t.to, t.count, t.share);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{Slots, Turn};

    fn turn(round: u32, act: ActName, items: usize) -> Turn {
        Turn {
            round,
            speaker: act.speaker(),
            act,
            slots: Slots::default(),
            candidate_items: (0..items as u32).collect(),
            candidate_values: Default::default(),
            utterance: None,
        }
    }

    fn flow(id: &str, turns: Vec<Turn>) -> DialogFlow {
        DialogFlow { dialog_id: id.into(), scene_id: "s".into(), target_object_id: 0, outcome: Outcome::Success, turns }
    }

    #[test]
    fn two_turn_dialog() {
        let f = flow("a", vec![turn(1, ActName::RecommendItem, 1), turn(1, ActName::RespondRecommendation, 1)]);
        let s = corpus_stats(&[f]).unwrap();
        assert_eq!(s.utterances, 2);
        assert_eq!(s.avg_utterances_per_dialog, 2.0);
        assert_eq!(s.avg_salesperson_acts_per_dialog, 1.0);
        assert_eq!(s.avg_objects_per_scene, 1.0);
        assert!(matches!(corpus_stats(&[]), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn round_one_point_mass_and_carry_forward() {
        let a = flow(
            "a",
            vec![
                turn(1, ActName::AskPreference, 10),
                turn(1, ActName::AnswerPreference, 4),
                turn(2, ActName::RecommendItem, 4),
                turn(2, ActName::RespondRecommendation, 1),
            ],
        );
        let b = flow("b", vec![turn(1, ActName::AskPreference, 10), turn(1, ActName::AnswerPreference, 2)]);
        let s = corpus_stats(&[a, b]).unwrap();
        assert_eq!(s.round_share(1, ActName::AskPreference), 1.0);
        assert_eq!(s.acts_in_round(1).len(), 1);
        assert_eq!(s.transitions.iter().find(|t| t.round == 2).unwrap().from, "ASK_PREFERENCE");
        assert_eq!(s.mean_candidate_items_per_round, vec![10.0, 3.0]);
        assert_eq!(s.avg_subjective_preferences_per_dialog, 1.0);
        assert!(s.to_csv().contains("transition,1,START,ASK_PREFERENCE,2,1\n"));
    }
}
