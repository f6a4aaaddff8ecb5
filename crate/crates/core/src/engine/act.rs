//! Salesperson and customer acts, their pairing, and the flat slot payload
//! used on the wire.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::catalog::{AttributeType, Value};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Speaker {
    Salesperson,
    Customer,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ActName {
    AskPreference,
    ExcludePreference,
    PromptPreference,
    GuessAttributeValue,
    ReviseAttributeValue,
    DisplayCandidateValues,
    ReferRegion,
    RecommendItem,
    AnswerPreference,
    NegatePreference,
    RespondPrompt,
    RespondAttributeValue,
    ChooseAttributeValue,
    JudgeRegion,
    RespondRecommendation,
}

impl ActName {
    pub const SALESPERSON: [ActName; 8] = [
        ActName::AskPreference,
        ActName::ExcludePreference,
        ActName::PromptPreference,
        ActName::GuessAttributeValue,
        ActName::ReviseAttributeValue,
        ActName::DisplayCandidateValues,
        ActName::ReferRegion,
        ActName::RecommendItem,
    ];

    pub const CUSTOMER: [ActName; 7] = [
        ActName::AnswerPreference,
        ActName::NegatePreference,
        ActName::RespondPrompt,
        ActName::RespondAttributeValue,
        ActName::ChooseAttributeValue,
        ActName::JudgeRegion,
        ActName::RespondRecommendation,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ActName::AskPreference => "ASK_PREFERENCE",
            ActName::ExcludePreference => "EXCLUDE_PREFERENCE",
            ActName::PromptPreference => "PROMPT_PREFERENCE",
            ActName::GuessAttributeValue => "GUESS_ATTRIBUTE_VALUE",
            ActName::ReviseAttributeValue => "REVISE_ATTRIBUTE_VALUE",
            ActName::DisplayCandidateValues => "DISPLAY_CANDIDATE_VALUES",
            ActName::ReferRegion => "REFER_REGION",
            ActName::RecommendItem => "RECOMMEND_ITEM",
            ActName::AnswerPreference => "ANSWER_PREFERENCE",
            ActName::NegatePreference => "NEGATE_PREFERENCE",
            ActName::RespondPrompt => "RESPOND_PROMPT",
            ActName::RespondAttributeValue => "RESPOND_ATTRIBUTE_VALUE",
            ActName::ChooseAttributeValue => "CHOOSE_ATTRIBUTE_VALUE",
            ActName::JudgeRegion => "JUDGE_REGION",
            ActName::RespondRecommendation => "RESPOND_RECOMMENDATION",
        }
    }

    pub fn speaker(self) -> Speaker {
        if ActName::SALESPERSON.contains(&self) {
            Speaker::Salesperson
        } else {
            Speaker::Customer
        }
    }

    /// The customer act that answers a salesperson act.
    pub fn partner(self) -> Option<ActName> {
        Some(match self {
            ActName::AskPreference => ActName::AnswerPreference,
            ActName::ExcludePreference => ActName::NegatePreference,
            ActName::PromptPreference => ActName::RespondPrompt,
            ActName::GuessAttributeValue | ActName::ReviseAttributeValue => ActName::RespondAttributeValue,
            ActName::DisplayCandidateValues => ActName::ChooseAttributeValue,
            ActName::ReferRegion => ActName::JudgeRegion,
            ActName::RecommendItem => ActName::RespondRecommendation,
            _ => return None,
        })
    }

    /// Index into [`ActName::SALESPERSON`].
    pub fn salesperson_index(self) -> Option<usize> {
        ActName::SALESPERSON.iter().position(|a| *a == self)
    }

    /// Lenient parse: case-insensitive, spaces or hyphens for underscores,
    /// plus the shorthand labels seen in annotated corpora.
    pub fn parse_lenient(name: &str) -> Result<ActName> {
        let canon: String = name
            .trim()
            .chars()
            .map(|c| if c == ' ' || c == '-' { '_' } else { c.to_ascii_uppercase() })
            .collect();
        let alias = match canon.as_str() {
            "REVISE_ATTRIBUTE" => Some(ActName::ReviseAttributeValue),
            "GUESS_ATTRIBUTE" => Some(ActName::GuessAttributeValue),
            "DISPLAY_ATTRIBUTE" | "DISPLAY_CANDIDATE_VALUE" | "DISPLAY_VALUES" => Some(ActName::DisplayCandidateValues),
            "PROMPT_REFERENCE" => Some(ActName::PromptPreference),
            "CHOOSE_VALUE" => Some(ActName::ChooseAttributeValue),
            "RESPOND_RECOMMEND" => Some(ActName::RespondRecommendation),
            _ => None,
        };
        alias
            .or_else(|| ActName::SALESPERSON.iter().chain(&ActName::CUSTOMER).copied().find(|a| a.as_str() == canon))
            .ok_or_else(|| Error::UnknownActName(name.to_string()))
    }
}

impl fmt::Display for ActName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ActName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ActName::parse_lenient(s)
    }
}

/// Flat slot payload as it appears in dialog-flow files.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Slots {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attribute: Option<AttributeType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub concept_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region_label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object_id: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accept: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SalesAct {
    AskPreference { attribute: AttributeType },
    ExcludePreference { attribute: AttributeType },
    PromptPreference { attribute: AttributeType, concept_id: String },
    GuessAttributeValue { attribute: AttributeType, value: Value },
    ReviseAttributeValue { attribute: AttributeType, value: Value },
    DisplayCandidateValues { attribute: AttributeType, values: Vec<Value> },
    ReferRegion { region_label: String },
    RecommendItem { object_id: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CustomerAct {
    AnswerPreference { attribute: AttributeType, concept_id: String },
    NegatePreference { attribute: AttributeType, concept_id: String },
    RespondPrompt { attribute: AttributeType, concept_id: String, accept: bool },
    RespondAttributeValue { attribute: AttributeType, value: Value, accept: bool },
    ChooseAttributeValue { attribute: AttributeType, value: Value },
    JudgeRegion { region_label: String, accept: bool },
    RespondRecommendation { object_id: u32, accept: bool },
}

fn missing(act: ActName, slot: &str) -> Error {
    Error::Validation(format!("{act} requires slot `{slot}`"))
}

fn unexpected(act: ActName) -> Error {
    Error::Validation(format!("{act} carries slots it does not use"))
}

/// Takes named slots out of the payload, failing if any are missing or if
/// anything is left over afterwards.
struct SlotReader {
    act: ActName,
    slots: Slots,
}

impl SlotReader {
    fn attribute(&mut self) -> Result<AttributeType> {
        self.slots.attribute.take().ok_or_else(|| missing(self.act, "attribute"))
    }
    fn concept(&mut self) -> Result<String> {
        self.slots.concept_id.take().ok_or_else(|| missing(self.act, "concept_id"))
    }
    fn value(&mut self) -> Result<Value> {
        self.slots.value.take().ok_or_else(|| missing(self.act, "value"))
    }
    fn values(&mut self) -> Result<Vec<Value>> {
        self.slots.values.take().ok_or_else(|| missing(self.act, "values"))
    }
    fn region(&mut self) -> Result<String> {
        self.slots.region_label.take().ok_or_else(|| missing(self.act, "region_label"))
    }
    fn object(&mut self) -> Result<u32> {
        self.slots.object_id.take().ok_or_else(|| missing(self.act, "object_id"))
    }
    fn accept(&mut self) -> Result<bool> {
        self.slots.accept.take().ok_or_else(|| missing(self.act, "accept"))
    }
    fn finish<T>(self, act: T) -> Result<T> {
        if self.slots == Slots::default() {
            Ok(act)
        } else {
            Err(unexpected(self.act))
        }
    }
}

impl SalesAct {
    pub fn name(&self) -> ActName {
        match self {
            SalesAct::AskPreference { .. } => ActName::AskPreference,
            SalesAct::ExcludePreference { .. } => ActName::ExcludePreference,
            SalesAct::PromptPreference { .. } => ActName::PromptPreference,
            SalesAct::GuessAttributeValue { .. } => ActName::GuessAttributeValue,
            SalesAct::ReviseAttributeValue { .. } => ActName::ReviseAttributeValue,
            SalesAct::DisplayCandidateValues { .. } => ActName::DisplayCandidateValues,
            SalesAct::ReferRegion { .. } => ActName::ReferRegion,
            SalesAct::RecommendItem { .. } => ActName::RecommendItem,
        }
    }

    pub fn attribute(&self) -> Option<AttributeType> {
        match self {
            SalesAct::AskPreference { attribute }
            | SalesAct::ExcludePreference { attribute }
            | SalesAct::PromptPreference { attribute, .. }
            | SalesAct::GuessAttributeValue { attribute, .. }
            | SalesAct::ReviseAttributeValue { attribute, .. }
            | SalesAct::DisplayCandidateValues { attribute, .. } => Some(*attribute),
            _ => None,
        }
    }

    pub fn slots(&self) -> Slots {
        let mut s = Slots { attribute: self.attribute(), ..Slots::default() };
        match self {
            SalesAct::PromptPreference { concept_id, .. } => s.concept_id = Some(concept_id.clone()),
            SalesAct::GuessAttributeValue { value, .. } | SalesAct::ReviseAttributeValue { value, .. } => {
                s.value = Some(value.clone())
            }
            SalesAct::DisplayCandidateValues { values, .. } => s.values = Some(values.clone()),
            SalesAct::ReferRegion { region_label } => s.region_label = Some(region_label.clone()),
            SalesAct::RecommendItem { object_id } => s.object_id = Some(*object_id),
            SalesAct::AskPreference { .. } | SalesAct::ExcludePreference { .. } => {}
        }
        s
    }

    pub fn from_wire(act: ActName, slots: Slots) -> Result<SalesAct> {
        let mut r = SlotReader { act, slots };
        let parsed = match act {
            ActName::AskPreference => SalesAct::AskPreference { attribute: r.attribute()? },
            ActName::ExcludePreference => SalesAct::ExcludePreference { attribute: r.attribute()? },
            ActName::PromptPreference => SalesAct::PromptPreference { attribute: r.attribute()?, concept_id: r.concept()? },
            ActName::GuessAttributeValue => SalesAct::GuessAttributeValue { attribute: r.attribute()?, value: r.value()? },
            ActName::ReviseAttributeValue => SalesAct::ReviseAttributeValue { attribute: r.attribute()?, value: r.value()? },
            ActName::DisplayCandidateValues => {
                SalesAct::DisplayCandidateValues { attribute: r.attribute()?, values: r.values()? }
            }
            ActName::ReferRegion => SalesAct::ReferRegion { region_label: r.region()? },
            ActName::RecommendItem => SalesAct::RecommendItem { object_id: r.object()? },
            other => return Err(Error::Validation(format!("{other} is not a salesperson act"))),
        };
        r.finish(parsed)
    }
}

impl CustomerAct {
    pub fn name(&self) -> ActName {
        match self {
            CustomerAct::AnswerPreference { .. } => ActName::AnswerPreference,
            CustomerAct::NegatePreference { .. } => ActName::NegatePreference,
            CustomerAct::RespondPrompt { .. } => ActName::RespondPrompt,
            CustomerAct::RespondAttributeValue { .. } => ActName::RespondAttributeValue,
            CustomerAct::ChooseAttributeValue { .. } => ActName::ChooseAttributeValue,
            CustomerAct::JudgeRegion { .. } => ActName::JudgeRegion,
            CustomerAct::RespondRecommendation { .. } => ActName::RespondRecommendation,
        }
    }

    pub fn accepted(&self) -> Option<bool> {
        match self {
            CustomerAct::RespondPrompt { accept, .. }
            | CustomerAct::RespondAttributeValue { accept, .. }
            | CustomerAct::JudgeRegion { accept, .. }
            | CustomerAct::RespondRecommendation { accept, .. } => Some(*accept),
            _ => None,
        }
    }

    pub fn slots(&self) -> Slots {
        let mut s = Slots { accept: self.accepted(), ..Slots::default() };
        match self {
            CustomerAct::AnswerPreference { attribute, concept_id }
            | CustomerAct::NegatePreference { attribute, concept_id }
            | CustomerAct::RespondPrompt { attribute, concept_id, .. } => {
                s.attribute = Some(*attribute);
                s.concept_id = Some(concept_id.clone());
            }
            CustomerAct::RespondAttributeValue { attribute, value, .. }
            | CustomerAct::ChooseAttributeValue { attribute, value } => {
                s.attribute = Some(*attribute);
                s.value = Some(value.clone());
            }
            CustomerAct::JudgeRegion { region_label, .. } => s.region_label = Some(region_label.clone()),
            CustomerAct::RespondRecommendation { object_id, .. } => s.object_id = Some(*object_id),
        }
        s
    }

    pub fn from_wire(act: ActName, slots: Slots) -> Result<CustomerAct> {
        let mut r = SlotReader { act, slots };
        let parsed = match act {
            ActName::AnswerPreference => CustomerAct::AnswerPreference { attribute: r.attribute()?, concept_id: r.concept()? },
            ActName::NegatePreference => CustomerAct::NegatePreference { attribute: r.attribute()?, concept_id: r.concept()? },
            ActName::RespondPrompt => {
                CustomerAct::RespondPrompt { attribute: r.attribute()?, concept_id: r.concept()?, accept: r.accept()? }
            }
            ActName::RespondAttributeValue => {
                CustomerAct::RespondAttributeValue { attribute: r.attribute()?, value: r.value()?, accept: r.accept()? }
            }
            ActName::ChooseAttributeValue => CustomerAct::ChooseAttributeValue { attribute: r.attribute()?, value: r.value()? },
            ActName::JudgeRegion => CustomerAct::JudgeRegion { region_label: r.region()?, accept: r.accept()? },
            ActName::RespondRecommendation => {
                CustomerAct::RespondRecommendation { object_id: r.object()?, accept: r.accept()? }
            }
            other => return Err(Error::Validation(format!("{other} is not a customer act"))),
        };
        r.finish(parsed)
    }
}
