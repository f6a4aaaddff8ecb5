//! Two-stage preference ontology.
//!
//! Subjective preference phrases map many-to-one onto categorization
//! concepts; each concept maps one-to-many onto concrete attribute values.
//! Numeric attributes use range concepts that are resolved against the
//! global value space at load time, so the same set algebra applies.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::catalog::{numeric_payload, read_text, AttributeKind, AttributeType, Scene, Value, ValueSet, ValueSpace};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Like,
    Dislike,
}

/// How SPD gold sets are derived: from the current round's preference
/// alone, or from every preference expressed so far in the dialog.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpdMode {
    SceneOnly,
    #[default]
    Cumulative,
}

impl SpdMode {
    pub fn name(self) -> &'static str {
        match self {
            SpdMode::SceneOnly => "scene_only",
            SpdMode::Cumulative => "cumulative",
        }
    }
}

/// Value membership of a concept as written in the ontology file.
#[derive(Clone, Debug, PartialEq)]
pub enum ConceptValues {
    Listed(ValueSet),
    /// `min` inclusive, `max` exclusive; a missing bound is unbounded.
    Range { min: Option<f64>, max: Option<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Concept {
    pub concept_id: String,
    pub attribute: AttributeType,
    pub definition: ConceptValues,
    /// Resolved value set (equals the listed set for categorical concepts).
    pub values: ValueSet,
    pub surface_forms: Vec<String>,
    pub provenance: Option<String>,
}

impl Concept {
    pub fn contains(&self, value: &str) -> bool {
        self.values.contains(value)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConceptRecord {
    concept_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    values: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max: Option<f64>,
    surface_forms: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AttributeRecord {
    attribute: AttributeType,
    concepts: Vec<ConceptRecord>,
}

/// Case-folded, whitespace-collapsed form used for surface lookups.
pub fn normalize_phrase(phrase: &str) -> String {
    phrase.split_whitespace().map(str::to_lowercase).collect::<Vec<_>>().join(" ")
}

#[derive(Clone, Debug)]
pub struct Ontology {
    concepts: Vec<Concept>,
    value_space: ValueSpace,
    by_id: HashMap<String, usize>,
    by_surface: HashMap<String, usize>,
}

impl PartialEq for Ontology {
    fn eq(&self, other: &Self) -> bool {
        self.concepts == other.concepts && self.value_space == other.value_space
    }
}

impl Ontology {
    /// Builds and validates an ontology against the global value space.
    pub fn new(concepts: Vec<Concept>, value_space: ValueSpace) -> Result<Ontology> {
        let mut by_id = HashMap::new();
        let mut by_surface = HashMap::new();
        for (idx, c) in concepts.iter().enumerate() {
            if by_id.insert(c.concept_id.clone(), idx).is_some() {
                return Err(Error::Validation(format!("duplicate concept_id `{}`", c.concept_id)));
            }
            if c.values.is_empty() {
                return Err(Error::Validation(format!("concept `{}` has an empty value set", c.concept_id)));
            }
            if c.surface_forms.is_empty() {
                return Err(Error::Validation(format!("concept `{}` has no surface forms", c.concept_id)));
            }
            let space = value_space.get(&c.attribute);
            for v in &c.values {
                if !space.is_some_and(|s| s.contains(v)) {
                    return Err(Error::Validation(format!(
                        "concept `{}`: value `{v}` is not in the {} value space",
                        c.concept_id, c.attribute
                    )));
                }
            }
            for form in &c.surface_forms {
                let key = normalize_phrase(form);
                if key.is_empty() {
                    return Err(Error::Validation(format!("concept `{}` has a blank surface form", c.concept_id)));
                }
                if let Some(prev) = by_surface.insert(key, idx) {
                    return Err(Error::Validation(format!(
                        "surface form `{form}` is registered for both `{}` and `{}`",
                        concepts[prev].concept_id, c.concept_id
                    )));
                }
            }
        }
        for (attr, values) in &value_space {
            for value in values {
                if !concepts.iter().any(|c| c.attribute == *attr && c.contains(value)) {
                    return Err(Error::Validation(format!(
                        "totality violated: {attr} value `{value}` belongs to no concept"
                    )));
                }
            }
        }
        Ok(Ontology { concepts, value_space, by_id, by_surface })
    }

    pub fn from_json(text: &str, value_space: &ValueSpace) -> Result<Ontology> {
        let records: Vec<AttributeRecord> =
            serde_json::from_str(text).map_err(|e| Error::malformed("<ontology>", e))?;
        Self::from_records(records, value_space)
    }

    pub fn load(path: impl AsRef<Path>, value_space: &ValueSpace) -> Result<Ontology> {
        let path = path.as_ref();
        let records: Vec<AttributeRecord> =
            serde_json::from_str(&read_text(path)?).map_err(|e| Error::malformed(path, e))?;
        Self::from_records(records, value_space)
    }

    fn from_records(records: Vec<AttributeRecord>, value_space: &ValueSpace) -> Result<Ontology> {
        let mut seen = BTreeSet::new();
        let mut concepts = Vec::new();
        for block in records {
            if !seen.insert(block.attribute) {
                return Err(Error::Validation(format!("attribute `{}` declared twice", block.attribute)));
            }
            for rec in block.concepts {
                concepts.push(resolve_concept(block.attribute, rec, value_space)?);
            }
        }
        Ontology::new(concepts, value_space.clone())
    }

    pub fn to_json(&self) -> String {
        let mut blocks: BTreeMap<AttributeType, Vec<ConceptRecord>> = BTreeMap::new();
        for c in &self.concepts {
            let (values, min, max) = match &c.definition {
                ConceptValues::Listed(v) => (Some(v.iter().map(|s| s.to_string()).collect()), None, None),
                ConceptValues::Range { min, max } => (None, *min, *max),
            };
            blocks.entry(c.attribute).or_default().push(ConceptRecord {
                concept_id: c.concept_id.clone(),
                values,
                min,
                max,
                surface_forms: c.surface_forms.clone(),
                provenance: c.provenance.clone(),
            });
        }
        let records: Vec<AttributeRecord> =
            blocks.into_iter().map(|(attribute, concepts)| AttributeRecord { attribute, concepts }).collect();
        serde_json::to_string_pretty(&records).expect("ontology serializes")
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn value_space(&self) -> &ValueSpace {
        &self.value_space
    }

    /// Concepts of one attribute, in file order.
    pub fn concepts_of(&self, attr: AttributeType) -> impl Iterator<Item = &Concept> {
        self.concepts.iter().filter(move |c| c.attribute == attr)
    }

    pub fn concept(&self, concept_id: &str) -> Result<&Concept> {
        self.by_id
            .get(concept_id)
            .map(|&i| &self.concepts[i])
            .ok_or_else(|| Error::UnknownConcept(concept_id.to_string()))
    }

    pub fn concept_values(&self, concept_id: &str) -> Result<&ValueSet> {
        Ok(&self.concept(concept_id)?.values)
    }

    /// Every concept of `attr` containing `value`, in file order. Never empty
    /// for a value of the global space.
    pub fn concepts_for_value(&self, attr: AttributeType, value: &str) -> Result<Vec<&Concept>> {
        if !self.value_space.get(&attr).is_some_and(|s| s.contains(value)) {
            return Err(Error::UnknownValue { attribute: attr, value: value.to_string() });
        }
        Ok(self.concepts_of(attr).filter(|c| c.contains(value)).collect())
    }

    pub fn resolve_surface(&self, phrase: &str) -> Result<&Concept> {
        self.by_surface
            .get(&normalize_phrase(phrase))
            .map(|&i| &self.concepts[i])
            .ok_or_else(|| Error::UnknownSurfaceForm(phrase.to_string()))
    }
}

fn resolve_concept(attr: AttributeType, rec: ConceptRecord, space: &ValueSpace) -> Result<Concept> {
    let (definition, values) = match (rec.values, rec.min, rec.max) {
        (Some(listed), None, None) => {
            let set: ValueSet = listed.into_iter().map(Value::from).collect();
            (ConceptValues::Listed(set.clone()), set)
        }
        (None, min, max) if min.is_some() || max.is_some() => {
            if attr.kind() != AttributeKind::Numeric {
                return Err(Error::Validation(format!(
                    "concept `{}`: range bounds on categorical attribute {attr}",
                    rec.concept_id
                )));
            }
            let values = space
                .get(&attr)
                .into_iter()
                .flatten()
                .filter(|v| {
                    numeric_payload(v).is_some_and(|x| min.is_none_or(|lo| x >= lo) && max.is_none_or(|hi| x < hi))
                })
                .cloned()
                .collect();
            (ConceptValues::Range { min, max }, values)
        }
        _ => {
            return Err(Error::Validation(format!(
                "concept `{}` must give either `values` or `min`/`max`",
                rec.concept_id
            )))
        }
    };
    Ok(Concept {
        concept_id: rec.concept_id,
        attribute: attr,
        definition,
        values,
        surface_forms: rec.surface_forms,
        provenance: rec.provenance,
    })
}

/// One constraint the customer has expressed on an attribute.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClauseTarget {
    Concept(String),
    Value(Value),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreferenceClause {
    pub attribute: AttributeType,
    pub polarity: Polarity,
    pub target: ClauseTarget,
}

impl PreferenceClause {
    pub fn concept(attribute: AttributeType, polarity: Polarity, concept_id: impl Into<String>) -> Self {
        PreferenceClause { attribute, polarity, target: ClauseTarget::Concept(concept_id.into()) }
    }

    pub fn value(attribute: AttributeType, polarity: Polarity, value: Value) -> Self {
        PreferenceClause { attribute, polarity, target: ClauseTarget::Value(value) }
    }
}

/// Scene values of the clauses' attribute that satisfy every clause:
/// inside every liked set and outside every disliked set.
pub fn filter_scene_values(ont: &Ontology, scene: &Scene, clauses: &[PreferenceClause]) -> Result<ValueSet> {
    let attr = match clauses.first() {
        Some(c) => c.attribute,
        None => return Err(Error::NoPreferenceClauses),
    };
    if let Some(other) = clauses.iter().find(|c| c.attribute != attr) {
        return Err(Error::MixedAttributeTypes(attr, other.attribute));
    }
    let mut candidates = scene.scene_value_universe(attr)?;
    for clause in clauses {
        let keep: Box<dyn Fn(&Value) -> bool> = match &clause.target {
            ClauseTarget::Concept(id) => {
                let concept = ont.concept(id)?;
                if concept.attribute != attr {
                    return Err(Error::MixedAttributeTypes(attr, concept.attribute));
                }
                let set = &concept.values;
                match clause.polarity {
                    Polarity::Like => Box::new(move |v| set.contains(v)),
                    Polarity::Dislike => Box::new(move |v| !set.contains(v)),
                }
            }
            ClauseTarget::Value(target) => match clause.polarity {
                Polarity::Like => Box::new(move |v| v == target),
                Polarity::Dislike => Box::new(move |v| v != target),
            },
        };
        candidates.retain(|v| keep(v));
    }
    Ok(candidates)
}

/// SPD ground truth: scene values of one attribute that lie in every liked
/// concept and in no disliked concept.
pub fn spd_oracle(ont: &Ontology, scene: &Scene, expressed: &[(Polarity, &str)]) -> Result<ValueSet> {
    let mut clauses = Vec::with_capacity(expressed.len());
    for (polarity, id) in expressed {
        let attr = ont.concept(id)?.attribute;
        clauses.push(PreferenceClause::concept(attr, *polarity, *id));
    }
    filter_scene_values(ont, scene, &clauses)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::catalog::tests::{fashion_attrs, v};
    use crate::catalog::{BBox, Domain, Item};

    pub(crate) const COLOR_ONTOLOGY: &str = r#"[{"attribute":"color","concepts":[
        {"concept_id":"warm_color","values":["red","brown","yellow","light pink"],
         "surface_forms":["color of passion","lively color","color of happiness"]},
        {"concept_id":"cold_color","values":["green","blue","light purple","olive"],
         "surface_forms":["cool color","color of quietness"]},
        {"concept_id":"powerful_color","values":["red","orange","light red"],
         "surface_forms":["color full of energy"]},
        {"concept_id":"mysterious_color","values":["violet","black","dark blue"],
         "surface_forms":["elusive color"]}
    ]}]"#;

    pub(crate) fn color_space() -> ValueSpace {
        let colors = [
            "red", "brown", "yellow", "light pink", "green", "blue", "light purple", "olive", "orange",
            "light red", "violet", "black", "dark blue",
        ];
        ValueSpace::from([(AttributeType::Color, colors.into_iter().map(v).collect())])
    }

    pub(crate) fn color_ontology() -> Ontology {
        Ontology::from_json(COLOR_ONTOLOGY, &color_space()).unwrap()
    }

    pub(crate) fn color_scene(colors: &[&str]) -> Scene {
        Scene {
            scene_id: "s".into(),
            domain: Domain::Fashion,
            items: colors
                .iter()
                .enumerate()
                .map(|(i, c)| Item {
                    object_id: i as u32,
                    prototype_id: format!("p{i}"),
                    bbox: BBox::new(i as f64 * 10.0, 0.0, 5.0, 5.0),
                    attributes: fashion_attrs(c, "jacket"),
                })
                .collect(),
            regions: vec![],
        }
    }

    fn set(vals: &[&str]) -> ValueSet {
        vals.iter().map(|s| v(s)).collect()
    }

    #[test]
    fn totality_violation_is_rejected() {
        let mut space = color_space();
        space.get_mut(&AttributeType::Color).unwrap().insert(v("beige"));
        assert!(matches!(Ontology::from_json(COLOR_ONTOLOGY, &space), Err(Error::Validation(m)) if m.contains("beige")));

        let no_olive = COLOR_ONTOLOGY.replace(r#","olive""#, "");
        assert!(matches!(Ontology::from_json(&no_olive, &color_space()), Err(Error::Validation(m)) if m.contains("olive")));
    }

    #[test]
    fn structural_violations() {
        let dup_surface = COLOR_ONTOLOGY.replace("elusive color", "Cool   Color");
        assert!(matches!(Ontology::from_json(&dup_surface, &color_space()), Err(Error::Validation(_))));
        let dup_id = COLOR_ONTOLOGY.replace("mysterious_color", "warm_color");
        assert!(matches!(Ontology::from_json(&dup_id, &color_space()), Err(Error::Validation(_))));
        let outside = COLOR_ONTOLOGY.replace(r#""dark blue"]"#, r#""dark blue","magenta"]"#);
        assert!(matches!(Ontology::from_json(&outside, &color_space()), Err(Error::Validation(_))));
        let empty_forms = COLOR_ONTOLOGY.replace(r#"["elusive color"]"#, "[]");
        assert!(matches!(Ontology::from_json(&empty_forms, &color_space()), Err(Error::Validation(_))));
    }

    #[test]
    fn range_concepts_resolve() {
        let space = ValueSpace::from([(AttributeType::Price, set(&["$50", "$99", "$100", "$299", "$900"]))]);
        let text = r#"[{"attribute":"price","concepts":[
            {"concept_id":"affordable_price","max":100,"surface_forms":["budget price"]},
            {"concept_id":"premium_price","min":100,"surface_forms":["luxury price"]}]}]"#;
        let ont = Ontology::from_json(text, &space).unwrap();
        assert_eq!(ont.concept_values("affordable_price").unwrap(), &set(&["$50", "$99"]));
        assert_eq!(ont.concept_values("premium_price").unwrap(), &set(&["$100", "$299", "$900"]));

        let empty = r#"[{"attribute":"price","concepts":[
            {"concept_id":"free","max":1,"surface_forms":["free"]},
            {"concept_id":"any","min":0,"surface_forms":["any"]}]}]"#;
        assert!(matches!(Ontology::from_json(empty, &space), Err(Error::Validation(_))));

        let cat_range = r#"[{"attribute":"color","concepts":[{"concept_id":"x","min":1,"surface_forms":["x"]}]}]"#;
        assert!(Ontology::from_json(cat_range, &color_space()).is_err());
    }

    #[test]
    fn lookups() {
        let ont = color_ontology();
        assert_eq!(ont.concept_values("powerful_color").unwrap(), &set(&["red", "orange", "light red"]));
        assert!(matches!(ont.concept_values("nope"), Err(Error::UnknownConcept(_))));
        let ids: BTreeSet<&str> = ont
            .concepts_for_value(AttributeType::Color, "red")
            .unwrap()
            .iter()
            .map(|c| c.concept_id.as_str())
            .collect();
        assert_eq!(ids, BTreeSet::from(["warm_color", "powerful_color"]));
        assert!(matches!(ont.concepts_for_value(AttributeType::Color, "plaid"), Err(Error::UnknownValue { .. })));
        assert_eq!(ont.resolve_surface("  Color of   PASSION ").unwrap().concept_id, "warm_color");
        assert!(matches!(ont.resolve_surface("xylophone color"), Err(Error::UnknownSurfaceForm(_))));
    }

    #[test]
    fn round_trip_serialization() {
        let ont = color_ontology();
        let again = Ontology::from_json(&ont.to_json(), ont.value_space()).unwrap();
        assert_eq!(ont, again);
    }

    #[test]
    fn spd_worked_examples() {
        let ont = color_ontology();
        let warm = ont.resolve_surface("color of happiness").unwrap().concept_id.clone();
        let scene = color_scene(&["yellow", "brown", "red", "blue"]);
        assert_eq!(spd_oracle(&ont, &scene, &[(Polarity::Like, &warm)]).unwrap(), set(&["yellow", "brown", "red"]));

        let scene = color_scene(&["red", "yellow", "orange"]);
        let both = [(Polarity::Like, "warm_color"), (Polarity::Like, "powerful_color")];
        assert_eq!(spd_oracle(&ont, &scene, &both).unwrap(), set(&["red"]));

        let scene = color_scene(&["red", "yellow"]);
        let mixed = [(Polarity::Like, "warm_color"), (Polarity::Dislike, "powerful_color")];
        assert_eq!(spd_oracle(&ont, &scene, &mixed).unwrap(), set(&["yellow"]));
    }

    #[test]
    fn spd_errors() {
        let space = {
            let mut s = color_space();
            s.insert(AttributeType::Pattern, set(&["plain"]));
            s
        };
        let text = COLOR_ONTOLOGY.trim_end_matches(']').to_string()
            + r#",{"attribute":"pattern","concepts":[{"concept_id":"modest_pattern","values":["plain"],"surface_forms":["humble pattern"]}]}]"#;
        let ont = Ontology::from_json(&text, &space).unwrap();
        let scene = color_scene(&["red"]);
        assert!(matches!(
            spd_oracle(&ont, &scene, &[(Polarity::Like, "warm_color"), (Polarity::Like, "modest_pattern")]),
            Err(Error::MixedAttributeTypes(..))
        ));
        assert!(matches!(spd_oracle(&ont, &scene, &[]), Err(Error::NoPreferenceClauses)));
    }
}
