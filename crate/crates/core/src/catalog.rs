//! Store scenes, item metadata and spatial queries over them.
//!
//! A scene file lists commodity items (each referencing a metadata prototype)
//! and labeled background regions. Items inherit their attribute values from
//! the prototype they reference.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Attribute values are shared, immutable strings.
pub type Value = Arc<str>;

pub type ValueSet = BTreeSet<Value>;

/// Declaration order is the fixed registry order used for tie-breaking.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttributeType {
    Type,
    Color,
    Pattern,
    Material,
    Price,
    Brand,
    Size,
    CustomerReview,
    SleeveLength,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Fashion,
    Furniture,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AttributeDomain {
    Fashion,
    Furniture,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AttributeKind {
    Categorical,
    Numeric,
}

impl AttributeType {
    pub const ALL: [AttributeType; 9] = [
        AttributeType::Type,
        AttributeType::Color,
        AttributeType::Pattern,
        AttributeType::Material,
        AttributeType::Price,
        AttributeType::Brand,
        AttributeType::Size,
        AttributeType::CustomerReview,
        AttributeType::SleeveLength,
    ];

    /// Snake-case identifier, as used in files.
    pub fn name(self) -> &'static str {
        match self {
            AttributeType::Type => "type",
            AttributeType::Color => "color",
            AttributeType::Pattern => "pattern",
            AttributeType::Material => "material",
            AttributeType::Price => "price",
            AttributeType::Brand => "brand",
            AttributeType::Size => "size",
            AttributeType::CustomerReview => "customer_review",
            AttributeType::SleeveLength => "sleeve_length",
        }
    }

    /// Human-readable label for utterances.
    pub fn label(self) -> &'static str {
        match self {
            AttributeType::CustomerReview => "customer review",
            AttributeType::SleeveLength => "sleeve length",
            other => other.name(),
        }
    }

    pub fn from_name(name: &str) -> Option<AttributeType> {
        AttributeType::ALL.into_iter().find(|a| a.name() == name)
    }

    pub fn domain(self) -> AttributeDomain {
        match self {
            AttributeType::Pattern | AttributeType::Size | AttributeType::SleeveLength => {
                AttributeDomain::Fashion
            }
            _ => AttributeDomain::Both,
        }
    }

    pub fn kind(self) -> AttributeKind {
        match self {
            AttributeType::Price | AttributeType::CustomerReview => AttributeKind::Numeric,
            _ => AttributeKind::Categorical,
        }
    }

    pub fn applies_to(self, domain: Domain) -> bool {
        match self.domain() {
            AttributeDomain::Both => true,
            AttributeDomain::Fashion => domain == Domain::Fashion,
            AttributeDomain::Furniture => domain == Domain::Furniture,
        }
    }
}

impl fmt::Display for AttributeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Domain {
    /// Attributes declared for this domain, in registry order.
    pub fn attributes(self) -> impl Iterator<Item = AttributeType> {
        AttributeType::ALL.into_iter().filter(move |a| a.applies_to(self))
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Domain::Fashion => "fashion",
            Domain::Furniture => "furniture",
        })
    }
}

/// Numeric payload of a canonical numeric value string such as `"$299"` or `"4.2"`.
pub fn numeric_payload(value: &str) -> Option<f64> {
    let cleaned: String = value.chars().filter(|c| *c != '$' && *c != ',').collect();
    cleaned.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Axis-aligned box in snapshot pixels, serialized as `[x, y, w, h]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct BBox {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl From<[f64; 4]> for BBox {
    fn from([x, y, w, h]: [f64; 4]) -> Self {
        BBox { x, y, w, h }
    }
}

impl From<BBox> for [f64; 4] {
    fn from(b: BBox) -> Self {
        [b.x, b.y, b.w, b.h]
    }
}

impl BBox {
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Self {
        BBox { x, y, w, h }
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    /// Half-open containment: left/top edges inclusive, right/bottom exclusive.
    pub fn contains_point(&self, (px, py): (f64, f64)) -> bool {
        px >= self.x && px < self.x + self.w && py >= self.y && py < self.y + self.h
    }

    fn is_valid(&self) -> bool {
        [self.x, self.y, self.w, self.h].iter().all(|v| v.is_finite()) && self.w > 0.0 && self.h > 0.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Item {
    pub object_id: u32,
    pub prototype_id: String,
    pub bbox: BBox,
    pub attributes: BTreeMap<AttributeType, Value>,
}

impl Item {
    pub fn attribute_of(&self, attr: AttributeType) -> Result<&Value> {
        self.attributes.get(&attr).ok_or_else(|| Error::UnknownAttribute {
            attribute: attr,
            domain: format!("item {} ({})", self.object_id, self.prototype_id),
        })
    }
}

/// A labeled store fixture ("back leftmost closet").
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackgroundItem {
    pub label: String,
    pub bbox: BBox,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    pub scene_id: String,
    pub domain: Domain,
    pub items: Vec<Item>,
    pub regions: Vec<BackgroundItem>,
}

impl Scene {
    pub fn item(&self, object_id: u32) -> Option<&Item> {
        self.items.iter().find(|i| i.object_id == object_id)
    }

    pub fn region(&self, label: &str) -> Result<&BackgroundItem> {
        self.regions
            .iter()
            .find(|r| r.label == label)
            .ok_or_else(|| Error::UnknownRegion(label.to_string()))
    }

    pub fn object_ids(&self) -> BTreeSet<u32> {
        self.items.iter().map(|i| i.object_id).collect()
    }

    /// Object ids whose bbox center lies inside the region's bbox.
    pub fn items_in_region(&self, label: &str) -> Result<BTreeSet<u32>> {
        let region = self.region(label)?;
        Ok(self
            .items
            .iter()
            .filter(|i| region.bbox.contains_point(i.bbox.center()))
            .map(|i| i.object_id)
            .collect())
    }

    /// First region (in file order) containing the item's center.
    pub fn region_of(&self, object_id: u32) -> Option<&BackgroundItem> {
        let item = self.item(object_id)?;
        self.regions.iter().find(|r| r.bbox.contains_point(item.bbox.center()))
    }

    pub fn attribute_of(&self, object_id: u32, attr: AttributeType) -> Result<&Value> {
        if !attr.applies_to(self.domain) {
            return Err(Error::UnknownAttribute { attribute: attr, domain: self.domain.to_string() });
        }
        self.item(object_id)
            .ok_or_else(|| Error::Validation(format!("no object {object_id} in scene {}", self.scene_id)))?
            .attribute_of(attr)
    }

    /// Distinct values of `attr` over the scene's items.
    pub fn scene_value_universe(&self, attr: AttributeType) -> Result<ValueSet> {
        if !attr.applies_to(self.domain) {
            return Err(Error::UnknownAttribute { attribute: attr, domain: self.domain.to_string() });
        }
        self.items.iter().map(|i| i.attribute_of(attr).cloned()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Validation(format!("scene {}: {msg}", self.scene_id)));
        if self.items.is_empty() {
            return fail("scene has no items".into());
        }
        let mut ids = BTreeSet::new();
        for item in &self.items {
            if !ids.insert(item.object_id) {
                return fail(format!("duplicate object_id {}", item.object_id));
            }
            if !item.bbox.is_valid() {
                return fail(format!("object {} has a non-positive bbox", item.object_id));
            }
            for attr in self.domain.attributes() {
                if !item.attributes.contains_key(&attr) {
                    return fail(format!("object {} is missing attribute {attr}", item.object_id));
                }
            }
            if let Some(extra) = item.attributes.keys().find(|a| !a.applies_to(self.domain)) {
                return fail(format!("object {} carries {extra}, not declared for {}", item.object_id, self.domain));
            }
        }
        let mut labels = BTreeSet::new();
        for region in &self.regions {
            if !labels.insert(region.label.as_str()) {
                return fail(format!("duplicate region label `{}`", region.label));
            }
            if !region.bbox.is_valid() {
                return fail(format!("region `{}` has a non-positive bbox", region.label));
            }
        }
        Ok(())
    }
}

/// Prototype id → attribute map.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Metadata {
    pub prototypes: BTreeMap<String, BTreeMap<AttributeType, Value>>,
}

/// Global value space per attribute.
pub type ValueSpace = BTreeMap<AttributeType, ValueSet>;

impl Metadata {
    pub fn value_space(&self) -> ValueSpace {
        let mut space = ValueSpace::new();
        for attrs in self.prototypes.values() {
            for (attr, value) in attrs {
                space.entry(*attr).or_default().insert(value.clone());
            }
        }
        space
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Catalog {
    pub scenes: Vec<Scene>,
    pub metadata: Metadata,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ItemRecord {
    object_id: u32,
    prototype_id: String,
    bbox: BBox,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneRecord {
    scene_id: String,
    domain: Domain,
    items: Vec<ItemRecord>,
    #[serde(default)]
    regions: Vec<BackgroundItem>,
}

type MetadataRecord = BTreeMap<String, BTreeMap<AttributeType, String>>;

pub(crate) fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

impl Catalog {
    pub fn scene(&self, scene_id: &str) -> Option<&Scene> {
        self.scenes.iter().find(|s| s.scene_id == scene_id)
    }

    pub fn value_space(&self) -> ValueSpace {
        self.metadata.value_space()
    }

    /// Parses and validates a scene file (one scene object or an array of
    /// them) against a metadata file.
    pub fn load(scene_path: impl AsRef<Path>, metadata_path: impl AsRef<Path>) -> Result<Catalog> {
        let scene_path = scene_path.as_ref();
        let metadata_path = metadata_path.as_ref();

        let meta: MetadataRecord = serde_json::from_str(&read_text(metadata_path)?)
            .map_err(|e| Error::malformed(metadata_path, e))?;
        let raw: serde_json::Value = serde_json::from_str(&read_text(scene_path)?)
            .map_err(|e| Error::malformed(scene_path, e))?;
        let records: Vec<SceneRecord> = if raw.is_array() {
            serde_json::from_value(raw)
        } else {
            serde_json::from_value(raw).map(|one| vec![one])
        }
        .map_err(|e| Error::malformed(scene_path, e))?;

        let metadata = Metadata {
            prototypes: meta
                .into_iter()
                .map(|(id, attrs)| (id, attrs.into_iter().map(|(a, v)| (a, Value::from(v))).collect()))
                .collect(),
        };
        for (id, attrs) in &metadata.prototypes {
            for (attr, value) in attrs {
                if attr.kind() == AttributeKind::Numeric && numeric_payload(value).is_none() {
                    return Err(Error::Validation(format!(
                        "prototype {id}: {attr} value `{value}` has no numeric payload"
                    )));
                }
            }
        }
        Catalog::from_records(records, metadata)
    }

    fn from_records(records: Vec<SceneRecord>, metadata: Metadata) -> Result<Catalog> {
        let mut scenes = Vec::with_capacity(records.len());
        let mut scene_ids = BTreeSet::new();
        for rec in records {
            if !scene_ids.insert(rec.scene_id.clone()) {
                return Err(Error::Validation(format!("duplicate scene_id `{}`", rec.scene_id)));
            }
            let mut items = Vec::with_capacity(rec.items.len());
            for it in rec.items {
                let attrs = metadata.prototypes.get(&it.prototype_id).ok_or_else(|| {
                    Error::Validation(format!(
                        "scene {}: object {} references unknown prototype `{}`",
                        rec.scene_id, it.object_id, it.prototype_id
                    ))
                })?;
                items.push(Item {
                    object_id: it.object_id,
                    prototype_id: it.prototype_id,
                    bbox: it.bbox,
                    attributes: attrs.clone(),
                });
            }
            let scene = Scene { scene_id: rec.scene_id, domain: rec.domain, items, regions: rec.regions };
            scene.validate()?;
            scenes.push(scene);
        }
        Ok(Catalog { scenes, metadata })
    }

    /// Scene file contents (JSON array) for this catalog.
    pub fn scenes_json(&self) -> String {
        let records: Vec<SceneRecord> = self
            .scenes
            .iter()
            .map(|s| SceneRecord {
                scene_id: s.scene_id.clone(),
                domain: s.domain,
                items: s
                    .items
                    .iter()
                    .map(|i| ItemRecord { object_id: i.object_id, prototype_id: i.prototype_id.clone(), bbox: i.bbox })
                    .collect(),
                regions: s.regions.clone(),
            })
            .collect();
        serde_json::to_string_pretty(&records).expect("scene records serialize")
    }

    pub fn metadata_json(&self) -> String {
        let record: MetadataRecord = self
            .metadata
            .prototypes
            .iter()
            .map(|(id, attrs)| (id.clone(), attrs.iter().map(|(a, v)| (*a, v.to_string())).collect()))
            .collect();
        serde_json::to_string_pretty(&record).expect("metadata serializes")
    }

    pub fn write(&self, scene_path: impl AsRef<Path>, metadata_path: impl AsRef<Path>) -> Result<()> {
        let (sp, mp) = (scene_path.as_ref(), metadata_path.as_ref());
        fs::write(sp, self.scenes_json()).map_err(|e| Error::io(sp, e))?;
        fs::write(mp, self.metadata_json()).map_err(|e| Error::io(mp, e))
    }
}

/// Loads scenes and metadata; see [`Catalog::load`].
pub fn load_catalog(scene_path: impl AsRef<Path>, metadata_path: impl AsRef<Path>) -> Result<Catalog> {
    Catalog::load(scene_path, metadata_path)
}
