#![allow(dead_code)]

use std::path::PathBuf;

use prefdial::engine::PolicyConfig;
use prefdial::realizer::TemplateSet;
use prefdial::{load_catalog, Catalog, Ontology};

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub struct Pack {
    pub catalog: Catalog,
    pub ontology: Ontology,
    pub policy: PolicyConfig,
    pub templates: TemplateSet,
}

pub fn pack() -> Pack {
    let dir = fixture_dir();
    let catalog = load_catalog(dir.join("scenes.json"), dir.join("metadata.json")).expect("fixture catalog");
    let ontology = Ontology::load(dir.join("ontology.json"), &catalog.value_space()).expect("fixture ontology");
    let policy = PolicyConfig::load(dir.join("policy.json")).expect("fixture policy");
    let templates = TemplateSet::load(dir.join("templates.json")).expect("fixture templates");
    Pack { catalog, ontology, policy, templates }
}

/// Fixture-style colour ontology plus a catch-all concept for every other
/// fashion attribute.
const MINI_ONTOLOGY: &str = r#"[
  {"attribute": "color", "concepts": [
    {"concept_id": "warm_color", "values": ["red", "brown", "yellow", "light pink"], "surface_forms": ["color of passion"]},
    {"concept_id": "cold_color", "values": ["green", "blue", "light purple", "olive"], "surface_forms": ["cool color"]},
    {"concept_id": "powerful_color", "values": ["red", "orange", "light red"], "surface_forms": ["color full of energy"]},
    {"concept_id": "mysterious_color", "values": ["violet", "black", "dark blue"], "surface_forms": ["elusive color"]},
    {"concept_id": "neutral_color", "values": ["white"], "surface_forms": ["plain color"]}
  ]},
  {"attribute": "type", "concepts": [{"concept_id": "any_type", "values": ["jacket"], "surface_forms": ["anything to wear"]}]},
  {"attribute": "pattern", "concepts": [{"concept_id": "any_pattern", "values": ["plain"], "surface_forms": ["any pattern"]}]},
  {"attribute": "material", "concepts": [{"concept_id": "any_material", "values": ["wool"], "surface_forms": ["any material"]}]},
  {"attribute": "price", "concepts": [{"concept_id": "any_price", "min": 0, "surface_forms": ["any price"]}]},
  {"attribute": "brand", "concepts": [{"concept_id": "any_brand", "values": ["Modern Arts"], "surface_forms": ["any brand"]}]},
  {"attribute": "size", "concepts": [{"concept_id": "any_size", "values": ["M"], "surface_forms": ["any size"]}]},
  {"attribute": "customer_review", "concepts": [{"concept_id": "any_review", "min": 0, "surface_forms": ["any review"]}]},
  {"attribute": "sleeve_length", "concepts": [{"concept_id": "any_sleeve", "values": ["full"], "surface_forms": ["any sleeve"]}]}
]"#;

pub const MINI_COLORS: [&str; 14] = [
    "red", "brown", "yellow", "light pink", "green", "blue", "light purple", "olive", "orange", "light red", "violet",
    "black", "dark blue", "white",
];

/// One fashion item per colour, laid out left to right; items differ only
/// in colour.
pub fn mini_scene(colors: &[&str]) -> prefdial::Scene {
    use prefdial::catalog::{BBox, Item};
    use prefdial::AttributeType as A;
    let items = colors
        .iter()
        .enumerate()
        .map(|(i, c)| Item {
            object_id: i as u32,
            prototype_id: format!("p{i}"),
            bbox: BBox::new(i as f64 * 10.0, 0.0, 8.0, 8.0),
            attributes: [
                (A::Type, "jacket"),
                (A::Color, *c),
                (A::Pattern, "plain"),
                (A::Material, "wool"),
                (A::Price, "$120"),
                (A::Brand, "Modern Arts"),
                (A::Size, "M"),
                (A::CustomerReview, "4.0"),
                (A::SleeveLength, "full"),
            ]
            .into_iter()
            .map(|(a, v)| (a, prefdial::Value::from(v)))
            .collect(),
        })
        .collect();
    prefdial::Scene { scene_id: "mini".into(), domain: prefdial::Domain::Fashion, items, regions: vec![] }
}

/// Ontology whose value space is every colour in [`MINI_COLORS`] plus the
/// constant values used by [`mini_scene`].
pub fn mini_ontology() -> Ontology {
    let scene = mini_scene(&MINI_COLORS);
    let mut space = prefdial::catalog::ValueSpace::new();
    for item in &scene.items {
        for (a, v) in &item.attributes {
            space.entry(*a).or_default().insert(v.clone());
        }
    }
    Ontology::from_json(MINI_ONTOLOGY, &space).expect("mini ontology")
}
