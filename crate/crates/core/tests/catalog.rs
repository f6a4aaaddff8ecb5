mod common;

use std::collections::{BTreeMap, BTreeSet};

use prefdial::catalog::ValueSet;
use prefdial::{AttributeType, Domain, Error};

#[test]
fn fixture_pack_has_desk_scale_scenes() {
    let pack = common::pack();
    let scenes = &pack.catalog.scenes;
    assert_eq!(scenes.len(), 10);
    let total: usize = scenes.iter().map(|s| s.items.len()).sum();
    let mean = total as f64 / scenes.len() as f64;
    assert!((20.0..=35.0).contains(&mean), "mean items per scene {mean}");
    assert!(scenes.iter().any(|s| s.domain == Domain::Furniture && s.regions.is_empty()));
    let protos: BTreeSet<&str> = scenes.iter().flat_map(|s| &s.items).map(|i| i.prototype_id.as_str()).collect();
    assert!(protos.len() < total, "fixtures should reuse prototypes");
}

#[test]
fn right_shelf_holds_the_referred_items() {
    let pack = common::pack();
    let scene = pack.catalog.scene("fashion-01").unwrap();
    assert_eq!(scene.items_in_region("right shelf").unwrap(), BTreeSet::from([12, 13, 16, 22, 31]));
    assert!(matches!(scene.items_in_region("attic"), Err(Error::UnknownRegion(_))));
}

#[test]
fn region_membership_matches_center_containment() {
    let pack = common::pack();
    for scene in &pack.catalog.scenes {
        for region in &scene.regions {
            let b = region.bbox;
            let expected: BTreeSet<u32> = scene
                .items
                .iter()
                .filter(|i| {
                    let (cx, cy) = (i.bbox.x + i.bbox.w * 0.5, i.bbox.y + i.bbox.h * 0.5);
                    b.x <= cx && cx < b.x + b.w && b.y <= cy && cy < b.y + b.h
                })
                .map(|i| i.object_id)
                .collect();
            assert_eq!(scene.items_in_region(&region.label).unwrap(), expected, "{} / {}", scene.scene_id, region.label);
        }
    }
}

#[test]
fn attribute_lookup_agrees_with_metadata_file() {
    let pack = common::pack();
    let dir = common::fixture_dir();
    let meta: BTreeMap<String, BTreeMap<String, String>> =
        serde_json::from_str(&std::fs::read_to_string(dir.join("metadata.json")).unwrap()).unwrap();
    let raw_scenes: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("scenes.json")).unwrap()).unwrap();
    for (raw, scene) in raw_scenes.as_array().unwrap().iter().zip(&pack.catalog.scenes) {
        for raw_item in raw["items"].as_array().unwrap() {
            let id = raw_item["object_id"].as_u64().unwrap() as u32;
            let proto = &meta[raw_item["prototype_id"].as_str().unwrap()];
            for attr in AttributeType::ALL {
                match proto.get(attr.name()) {
                    Some(expected) => assert_eq!(&**scene.attribute_of(id, attr).unwrap(), expected.as_str()),
                    None => assert!(matches!(scene.attribute_of(id, attr), Err(Error::UnknownAttribute { .. }))),
                }
            }
        }
    }
}

#[test]
fn value_universe_is_a_fold_over_items() {
    let pack = common::pack();
    for scene in &pack.catalog.scenes {
        for attr in scene.domain.attributes() {
            let mut expected = ValueSet::new();
            for item in &scene.items {
                expected.insert(item.attributes[&attr].clone());
            }
            assert_eq!(scene.scene_value_universe(attr).unwrap(), expected);
        }
        if scene.domain == Domain::Furniture {
            assert!(scene.scene_value_universe(AttributeType::SleeveLength).is_err());
        }
    }
}

#[test]
fn catalog_round_trips_through_files() {
    let pack = common::pack();
    let dir = tempfile::tempdir().unwrap();
    let (sp, mp) = (dir.path().join("s.json"), dir.path().join("m.json"));
    pack.catalog.write(&sp, &mp).unwrap();
    assert_eq!(prefdial::load_catalog(&sp, &mp).unwrap(), pack.catalog);
}
