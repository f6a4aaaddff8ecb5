mod common;

use std::collections::BTreeSet;

use prefdial::catalog::ValueSet;
use prefdial::ontology::spd_oracle;
use prefdial::{AttributeType, Error, Ontology, Polarity, Scene};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn set(values: &[&str]) -> BTreeSet<String> {
    values.iter().map(|v| v.to_string()).collect()
}

fn strings(values: &ValueSet) -> BTreeSet<String> {
    values.iter().map(|v| v.to_string()).collect()
}

fn ids<'a>(concepts: impl IntoIterator<Item = &'a prefdial::ontology::Concept>) -> BTreeSet<&'a str> {
    concepts.into_iter().map(|c| c.concept_id.as_str()).collect()
}

#[test]
fn published_concepts_are_present() {
    let ont = common::pack().ontology;
    assert!(strings(ont.concept_values("warm_color").unwrap()).is_superset(&set(&["red", "brown", "yellow", "light pink"])));
    assert!(strings(ont.concept_values("cold_color").unwrap()).is_superset(&set(&["green", "blue", "light purple", "olive"])));
    assert_eq!(strings(ont.concept_values("powerful_color").unwrap()), set(&["red", "orange", "light red"]));
    assert_eq!(strings(ont.concept_values("mysterious_color").unwrap()), set(&["violet", "black", "dark blue"]));
    assert!(matches!(ont.concept_values("sparkly_color"), Err(Error::UnknownConcept(_))));
}

#[test]
fn shared_values_map_to_several_concepts() {
    let ont = common::pack().ontology;
    let red = ont.concepts_for_value(AttributeType::Color, "red").unwrap();
    assert_eq!(ids(red), BTreeSet::from(["warm_color", "powerful_color"]));
    let leather = ont.concepts_for_value(AttributeType::Material, "leather").unwrap();
    assert_eq!(ids(leather), BTreeSet::from(["soft_material", "gorgeous_material"]));
    assert!(matches!(ont.concepts_for_value(AttributeType::Color, "plaid"), Err(Error::UnknownValue { .. })));
}

#[test]
fn concept_membership_is_inverse_consistent() {
    let ont = common::pack().ontology;
    for (attr, values) in ont.value_space() {
        for v in values {
            let owners = ids(ont.concepts_for_value(*attr, v).unwrap());
            assert!(!owners.is_empty(), "{attr} {v} uncovered");
            for c in ont.concepts().iter().filter(|c| c.attribute == *attr) {
                assert_eq!(owners.contains(c.concept_id.as_str()), c.values.contains(v));
            }
        }
    }
    for c in ont.concepts() {
        assert!(c.values.is_subset(&ont.value_space()[&c.attribute]));
    }
}

#[test]
fn range_concepts_resolve_against_numeric_payloads() {
    let ont = common::pack().ontology;
    let premium = ont.concept_values("premium_price").unwrap();
    assert!(premium.contains("$349") && premium.contains("$1,299") && !premium.contains("$299"));
    let moderate = ont.concept_values("moderate_price").unwrap();
    assert!(moderate.contains("$299") && moderate.contains("$120") && !moderate.contains("$89"));
    let solid = ont.concept_values("solid_review").unwrap();
    assert!(solid.contains("3.6") && solid.contains("4.4") && !solid.contains("4.5"));
}

#[test]
fn surface_forms_resolve() {
    let ont = common::pack().ontology;
    assert_eq!(ont.resolve_surface("color of passion").unwrap().concept_id, "warm_color");
    assert_eq!(ont.resolve_surface("  Durable   MATERIAL ").unwrap().concept_id, "reliable_material");
    assert!(matches!(ont.resolve_surface("xylophone color"), Err(Error::UnknownSurfaceForm(_))));
    for c in ont.concepts() {
        for form in &c.surface_forms {
            assert_eq!(ont.resolve_surface(form).unwrap().concept_id, c.concept_id);
        }
    }
}

#[test]
fn serialized_ontology_reloads_equal() {
    let ont = common::pack().ontology;
    let again = Ontology::from_json(&ont.to_json(), ont.value_space()).unwrap();
    assert_eq!(again, ont);
}

#[test]
fn happiness_example_on_a_scene_with_blue() {
    let pack = common::pack();
    let mut scene = pack.catalog.scene("fashion-01").unwrap().clone();
    let colors = ["yellow", "brown", "red", "blue"];
    scene.items.truncate(colors.len());
    for (item, c) in scene.items.iter_mut().zip(colors) {
        item.attributes.insert(AttributeType::Color, c.into());
    }
    let concept = pack.ontology.resolve_surface("color of happiness").unwrap();
    let got = spd_oracle(&pack.ontology, &scene, &[(Polarity::Like, &concept.concept_id)]).unwrap();
    assert_eq!(strings(&got), set(&["yellow", "brown", "red"]));
    let mixed = spd_oracle(&pack.ontology, &scene, &[(Polarity::Like, "warm_color"), (Polarity::Like, "soft_material")]);
    assert!(matches!(mixed, Err(Error::MixedAttributeTypes(..))));
}

/// Keeps each item's value when it satisfies every clause, item by item.
fn brute_force(ont: &Ontology, scene: &Scene, attr: AttributeType, clauses: &[(Polarity, String)]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for item in &scene.items {
        let v = item.attributes[&attr].to_string();
        let ok = clauses.iter().all(|(pol, id)| {
            let inside = ont.concepts().iter().find(|c| &c.concept_id == id).unwrap().values.iter().any(|x| **x == *v);
            inside == (*pol == Polarity::Like)
        });
        if ok {
            out.insert(v);
        }
    }
    out
}

fn random_clauses(ont: &Ontology, attr: AttributeType, rng: &mut ChaCha8Rng) -> Vec<(Polarity, String)> {
    let concepts: Vec<&str> = ont.concepts_of(attr).map(|c| c.concept_id.as_str()).collect();
    (0..rng.gen_range(1..=3))
        .map(|_| {
            let pol = if rng.gen_bool(0.5) { Polarity::Like } else { Polarity::Dislike };
            (pol, concepts.choose(rng).unwrap().to_string())
        })
        .collect()
}

#[test]
fn oracle_matches_per_item_filter_on_every_scene() {
    let pack = common::pack();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for scene in &pack.catalog.scenes {
        for attr in scene.domain.attributes() {
            for _ in 0..40 {
                let clauses = random_clauses(&pack.ontology, attr, &mut rng);
                let expressed: Vec<(Polarity, &str)> = clauses.iter().map(|(p, c)| (*p, c.as_str())).collect();
                let got = spd_oracle(&pack.ontology, scene, &expressed).unwrap();
                assert_eq!(strings(&got), brute_force(&pack.ontology, scene, attr, &clauses));
            }
        }
    }
}

proptest! {
    #[test]
    fn oracle_shrinks_as_clauses_accumulate(seed: u64, scene_idx in 0usize..10) {
        let pack = common::pack();
        let scene = &pack.catalog.scenes[scene_idx];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let attrs: Vec<AttributeType> = scene.domain.attributes().collect();
        let attr = *attrs.choose(&mut rng).unwrap();
        let mut clauses = random_clauses(&pack.ontology, attr, &mut rng);
        clauses.extend(random_clauses(&pack.ontology, attr, &mut rng));
        let universe = scene.scene_value_universe(attr).unwrap();
        let mut previous = universe.clone();
        for n in 1..=clauses.len() {
            let expressed: Vec<(Polarity, &str)> = clauses[..n].iter().map(|(p, c)| (*p, c.as_str())).collect();
            let got = spd_oracle(&pack.ontology, scene, &expressed).unwrap();
            prop_assert!(got.is_subset(&previous));
            prop_assert!(got.is_subset(&universe));
            previous = got;
        }
    }
}
