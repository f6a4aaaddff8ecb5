//! Template-based surface realization of dialog flows.
//!
//! Concept slots are rendered through a registered surface form of the
//! concept, values and region labels verbatim, and recommended items as
//! `"{color} {type} <@id> on the {region}"`.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::catalog::{read_text, AttributeType, Catalog, Scene, Value};
use crate::engine::act::{ActName, Slots};
use crate::engine::dialog::{session_rng, session_seed};
use crate::engine::flow::{DialogFlow, Turn};
use crate::error::{Error, Result};
use crate::ontology::{normalize_phrase, Concept, Ontology};
use crate::par;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Placeholder {
    Attr,
    PreferencePhrase,
    Value,
    ValuesList,
    RegionLabel,
    ItemDescription,
}

impl Placeholder {
    fn parse(name: &str) -> Option<Placeholder> {
        Some(match name {
            "attr" => Placeholder::Attr,
            "preference_phrase" => Placeholder::PreferencePhrase,
            "value" => Placeholder::Value,
            "values_list" => Placeholder::ValuesList,
            "region_label" => Placeholder::RegionLabel,
            "item_description" => Placeholder::ItemDescription,
            _ => return None,
        })
    }
}

/// (allowed, required) placeholders for an act.
fn placeholder_rules(act: ActName) -> (&'static [Placeholder], &'static [Placeholder]) {
    use Placeholder::*;
    match act {
        ActName::AskPreference | ActName::ExcludePreference => (&[Attr], &[Attr]),
        ActName::PromptPreference
        | ActName::AnswerPreference
        | ActName::NegatePreference
        | ActName::RespondPrompt => (&[Attr, PreferencePhrase], &[PreferencePhrase]),
        ActName::GuessAttributeValue
        | ActName::ReviseAttributeValue
        | ActName::RespondAttributeValue
        | ActName::ChooseAttributeValue => (&[Attr, Value], &[Value]),
        ActName::DisplayCandidateValues => (&[Attr, ValuesList], &[ValuesList]),
        ActName::ReferRegion | ActName::JudgeRegion => (&[RegionLabel], &[RegionLabel]),
        ActName::RecommendItem => (&[ItemDescription], &[ItemDescription]),
        ActName::RespondRecommendation => (&[], &[]),
    }
}

enum Piece {
    Text(String),
    Slot(Placeholder),
}

struct Template {
    pieces: Vec<Piece>,
}

fn parse_template(act: ActName, text: &str) -> Result<Template> {
    let (allowed, required) = placeholder_rules(act);
    let mut pieces = Vec::new();
    let mut rest = text;
    while let Some(open) = rest.find('{') {
        if open > 0 {
            pieces.push(Piece::Text(rest[..open].to_string()));
        }
        let close = rest[open..]
            .find('}')
            .ok_or_else(|| Error::Validation(format!("{act}: unclosed placeholder in `{text}`")))?;
        let name = &rest[open + 1..open + close];
        let slot = Placeholder::parse(name)
            .filter(|p| allowed.contains(p))
            .ok_or_else(|| Error::Validation(format!("{act}: placeholder {{{name}}} cannot be filled")))?;
        pieces.push(Piece::Slot(slot));
        rest = &rest[open + close + 1..];
    }
    if !rest.is_empty() {
        pieces.push(Piece::Text(rest.to_string()));
    }
    for req in required {
        if !pieces.iter().any(|p| matches!(p, Piece::Slot(s) if s == req)) {
            return Err(Error::Validation(format!("{act}: template `{text}` omits a required slot ({req:?})")));
        }
    }
    Ok(Template { pieces })
}

/// Utterance templates per act. Acts with a yes/no slot may be split into
/// `ACT.accept` / `ACT.reject` keys.
pub struct TemplateSet {
    templates: BTreeMap<String, Vec<Template>>,
    source: BTreeMap<String, Vec<String>>,
}

const ACCEPT_SUFFIX: &str = ".accept";
const REJECT_SUFFIX: &str = ".reject";

impl TemplateSet {
    pub fn from_map(source: BTreeMap<String, Vec<String>>) -> Result<TemplateSet> {
        let mut templates = BTreeMap::new();
        for (key, texts) in &source {
            let base = key.strip_suffix(ACCEPT_SUFFIX).or_else(|| key.strip_suffix(REJECT_SUFFIX)).unwrap_or(key);
            let act = ActName::parse_lenient(base)
                .map_err(|_| Error::Validation(format!("templates: unknown act key `{key}`")))?;
            if act.as_str() != base {
                return Err(Error::Validation(format!("templates: key `{key}` must use the canonical act name")));
            }
            if texts.is_empty() {
                return Err(Error::Validation(format!("templates: `{key}` has no templates")));
            }
            let parsed = texts.iter().map(|t| parse_template(act, t)).collect::<Result<Vec<_>>>()?;
            templates.insert(key.clone(), parsed);
        }
        let set = TemplateSet { templates, source };
        for act in ActName::SALESPERSON.iter().chain(&ActName::CUSTOMER) {
            let has_flag = matches!(
                act,
                ActName::RespondPrompt | ActName::RespondAttributeValue | ActName::JudgeRegion | ActName::RespondRecommendation
            );
            let covered = if has_flag {
                [true, false].iter().all(|a| set.lookup(*act, Some(*a)).is_some())
            } else {
                set.lookup(*act, None).is_some()
            };
            if !covered {
                return Err(Error::MissingTemplate(act.as_str().to_string()));
            }
        }
        Ok(set)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<TemplateSet> {
        let path = path.as_ref();
        let map: BTreeMap<String, Vec<String>> =
            serde_json::from_str(&read_text(path)?).map_err(|e| Error::malformed(path, e))?;
        TemplateSet::from_map(map)
    }

    pub fn source(&self) -> &BTreeMap<String, Vec<String>> {
        &self.source
    }

    fn lookup(&self, act: ActName, accept: Option<bool>) -> Option<&Vec<Template>> {
        let flagged = accept.map(|a| format!("{}{}", act.as_str(), if a { ACCEPT_SUFFIX } else { REJECT_SUFFIX }));
        flagged.and_then(|k| self.templates.get(&k)).or_else(|| self.templates.get(act.as_str()))
    }
}

/// "a", "a and b", "a, b and c".
pub fn join_values(values: &[Value]) -> String {
    match values {
        [] => String::new(),
        [one] => one.to_string(),
        [init @ .., last] => {
            let head: Vec<&str> = init.iter().map(|v| &**v).collect();
            format!("{} and {last}", head.join(", "))
        }
    }
}

/// Canonical item reference token.
pub fn item_token(object_id: u32) -> String {
    format!("<@{object_id}>")
}

pub fn describe_item(scene: &Scene, object_id: u32) -> Result<String> {
    let item = scene
        .item(object_id)
        .ok_or_else(|| Error::Validation(format!("no object {object_id} in scene {}", scene.scene_id)))?;
    let color = item.attribute_of(AttributeType::Color)?;
    let kind = item.attribute_of(AttributeType::Type)?;
    let token = item_token(object_id);
    Ok(match scene.region_of(object_id) {
        Some(region) => format!("{color} {kind} {token} on the {}", region.label),
        None => format!("{color} {kind} {token}"),
    })
}

fn require<'a, T>(slot: &'a Option<T>, act: ActName, name: &str) -> Result<&'a T> {
    slot.as_ref().ok_or_else(|| Error::Validation(format!("{act} turn lacks slot `{name}`")))
}

fn fill<R: Rng + ?Sized>(
    p: Placeholder,
    act: ActName,
    slots: &Slots,
    ont: &Ontology,
    scene: &Scene,
    rng: &mut R,
) -> Result<String> {
    Ok(match p {
        Placeholder::Attr => require(&slots.attribute, act, "attribute")?.label().to_string(),
        Placeholder::PreferencePhrase => {
            let concept = ont.concept(require(&slots.concept_id, act, "concept_id")?)?;
            concept.surface_forms.choose(rng).expect("validated surface forms").clone()
        }
        Placeholder::Value => require(&slots.value, act, "value")?.to_string(),
        Placeholder::ValuesList => join_values(require(&slots.values, act, "values")?),
        Placeholder::RegionLabel => require(&slots.region_label, act, "region_label")?.clone(),
        Placeholder::ItemDescription => describe_item(scene, *require(&slots.object_id, act, "object_id")?)?,
    })
}

pub fn realize_turn<R: Rng + ?Sized>(
    turn: &Turn,
    templates: &TemplateSet,
    ont: &Ontology,
    scene: &Scene,
    rng: &mut R,
) -> Result<String> {
    let options = templates
        .lookup(turn.act, turn.slots.accept)
        .ok_or_else(|| Error::MissingTemplate(turn.act.as_str().to_string()))?;
    let template = options.choose(rng).expect("validated non-empty templates");
    let mut out = String::new();
    for piece in &template.pieces {
        match piece {
            Piece::Text(t) => out.push_str(t),
            Piece::Slot(p) => out.push_str(&fill(*p, turn.act, &turn.slots, ont, scene, rng)?),
        }
    }
    Ok(out)
}

/// Fills every turn's utterance; acts, slots and candidate annotations are
/// left untouched.
pub fn realize_dialog(
    flow: &DialogFlow,
    templates: &TemplateSet,
    ont: &Ontology,
    scene: &Scene,
    seed: u64,
) -> Result<DialogFlow> {
    let mut rng = session_rng(seed);
    let mut out = flow.clone();
    for turn in &mut out.turns {
        turn.utterance = Some(realize_turn(turn, templates, ont, scene, &mut rng)?);
    }
    Ok(out)
}

/// Realizes a corpus; dialog `i` uses seed `base_seed ^ i`.
pub fn realize_corpus(
    flows: &[DialogFlow],
    templates: &TemplateSet,
    ont: &Ontology,
    catalog: &Catalog,
    base_seed: u64,
    jobs: usize,
) -> Result<Vec<DialogFlow>> {
    par::try_map_indexed(flows.len(), jobs, |i| {
        let flow = &flows[i];
        let scene = catalog
            .scene(&flow.scene_id)
            .ok_or_else(|| Error::Validation(format!("dialog {}: unknown scene `{}`", flow.dialog_id, flow.scene_id)))?;
        realize_dialog(flow, templates, ont, scene, session_seed(base_seed, i))
    })
}

/// Longest registered surface form occurring in `utterance`.
pub fn find_surface_form<'o>(ont: &'o Ontology, utterance: &str) -> Option<&'o Concept> {
    let text = normalize_phrase(utterance);
    ont.concepts()
        .iter()
        .flat_map(|c| c.surface_forms.iter().map(move |f| (normalize_phrase(f), c)))
        .filter(|(form, _)| text.contains(form.as_str()))
        .max_by_key(|(form, _)| form.len())
        .map(|(_, c)| c)
}

/// Every `<@digits>` token in `text`, in order of appearance.
pub fn extract_item_tokens(text: &str) -> Vec<u32> {
    use std::sync::OnceLock;
    static TOKEN: OnceLock<regex::Regex> = OnceLock::new();
    let re = TOKEN.get_or_init(|| regex::Regex::new(r"<@(\d+)>").expect("static regex"));
    re.captures_iter(text).filter_map(|c| c[1].parse().ok()).collect()
}
