//! Dialog-flow interchange format (JSON Lines, one dialog per line).

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::act::{ActName, CustomerAct, SalesAct, Slots, Speaker};
use super::session::{SessionState, Setting};
use crate::catalog::{AttributeType, Value};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Success,
    MaxRoundsExceeded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Turn {
    pub round: u32,
    pub speaker: Speaker,
    pub act: ActName,
    pub slots: Slots,
    /// Salesperson turns carry the state the act was chosen in; customer
    /// turns carry the state after the response was applied.
    pub candidate_items: Vec<u32>,
    pub candidate_values: BTreeMap<AttributeType, Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utterance: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DialogFlow {
    pub dialog_id: String,
    pub scene_id: String,
    pub target_object_id: u32,
    pub outcome: Outcome,
    pub turns: Vec<Turn>,
}

/// One salesperson turn and the customer turn that answers it.
#[derive(Clone, Copy, Debug)]
pub struct Round<'a> {
    pub number: u32,
    pub salesperson: &'a Turn,
    pub customer: &'a Turn,
}

impl<'a> Round<'a> {
    pub fn sales_act(&self) -> Result<SalesAct> {
        SalesAct::from_wire(self.salesperson.act, self.salesperson.slots.clone())
    }

    pub fn customer_act(&self) -> Result<CustomerAct> {
        CustomerAct::from_wire(self.customer.act, self.customer.slots.clone())
    }
}

impl DialogFlow {
    /// Turns grouped into rounds. Fails if turns do not alternate
    /// salesperson/customer with matching round numbers and act pairing.
    pub fn rounds(&self) -> Result<Vec<Round<'_>>> {
        if !self.turns.len().is_multiple_of(2) {
            return Err(Error::Validation(format!("dialog {}: odd number of turns", self.dialog_id)));
        }
        self.turns
            .chunks(2)
            .enumerate()
            .map(|(i, pair)| {
                let (s, c) = (&pair[0], &pair[1]);
                let number = i as u32 + 1;
                if s.speaker != Speaker::Salesperson || c.speaker != Speaker::Customer {
                    return Err(Error::Validation(format!("dialog {}: round {number} speakers out of order", self.dialog_id)));
                }
                if s.round != number || c.round != number {
                    return Err(Error::Validation(format!("dialog {}: round numbering broken at {number}", self.dialog_id)));
                }
                if s.act.partner() != Some(c.act) {
                    return Err(Error::Validation(format!(
                        "dialog {}: round {number} pairs {} with {}",
                        self.dialog_id, s.act, c.act
                    )));
                }
                Ok(Round { number, salesperson: s, customer: c })
            })
            .collect()
    }

    /// Replays the dialog in `setting` and checks every candidate
    /// annotation, target retention and the recorded outcome.
    pub fn check(&self, setting: &Setting<'_>) -> Result<()> {
        let fail = |m: String| Err(Error::Validation(format!("dialog {}: {m}", self.dialog_id)));
        if self.scene_id != setting.scene.scene_id {
            return fail(format!("belongs to scene `{}`, not `{}`", self.scene_id, setting.scene.scene_id));
        }
        if setting.scene.item(self.target_object_id).is_none() {
            return fail(format!("target {} is not in the scene", self.target_object_id));
        }
        let annotated = |t: &Turn, state: &SessionState| {
            t.candidate_items.iter().copied().eq(state.candidate_items.iter().copied())
                && t.candidate_values.len() == state.candidate_values.len()
                && t.candidate_values.iter().all(|(a, vs)| {
                    state.candidate_values.get(a).is_some_and(|live| vs.iter().eq(live.iter()))
                })
        };
        let mut state = SessionState::new(setting.scene)?;
        for round in self.rounds()? {
            if !annotated(round.salesperson, &state) {
                return fail(format!("round {} salesperson annotation disagrees with replay", round.number));
            }
            state.apply(&round.sales_act()?, &round.customer_act()?, setting)?;
            if !annotated(round.customer, &state) {
                return fail(format!("round {} customer annotation disagrees with replay", round.number));
            }
            if !state.candidate_items.contains(&self.target_object_id) {
                return fail(format!("round {} drops the target", round.number));
            }
        }
        if state.is_finished() != (self.outcome == Outcome::Success) {
            return fail(format!("outcome {:?} does not match the final state", self.outcome));
        }
        Ok(())
    }

    pub fn salesperson_act_count(&self) -> usize {
        self.turns.iter().filter(|t| t.speaker == Speaker::Salesperson).count()
    }
}

pub fn flows_to_jsonl(flows: &[DialogFlow]) -> String {
    let mut out = String::new();
    for f in flows {
        out.push_str(&serde_json::to_string(f).expect("dialog flow serializes"));
        out.push('\n');
    }
    out
}

pub fn write_flows(path: impl AsRef<Path>, flows: &[DialogFlow]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for f in flows {
        serde_json::to_writer(&mut w, f).map_err(|e| Error::malformed(path, e))?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_flows(path: impl AsRef<Path>) -> Result<Vec<DialogFlow>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut flows = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let flow: DialogFlow =
            serde_json::from_str(&line).map_err(|e| Error::malformed(path, format!("line {}: {e}", n + 1)))?;
        flows.push(flow);
    }
    Ok(flows)
}
