//! Regenerates the bundled scene and metadata fixtures.
//!
//! ```text
//! cargo run -p prefdial-core --example make_fixtures -- fixtures
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use prefdial::catalog::{BBox, BackgroundItem, Item, Metadata};
use prefdial::{AttributeType, Catalog, Domain, Scene, Value};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_231_001;
const WIDTH: f64 = 1600.0;
const SHELF_HEIGHT: f64 = 640.0;
const FLOOR_TOP: f64 = 700.0;
const FLOOR_BOTTOM: f64 = 1000.0;

const COLORS: &[&str] = &[
    "red", "brown", "yellow", "light pink", "green", "blue", "light purple", "olive", "orange", "light red", "violet",
    "black", "dark blue",
];
const BRANDS: &[&str] = &[
    "Art News Today", "River Chateau", "Heritage Looms", "Downtown Stylists", "Uptown Studio", "Glam Nails",
    "North Lodge", "Nature Photographers", "Coats & More", "Modern Arts",
];
const REVIEWS: &[&str] = &["2.9", "3.2", "3.4", "3.6", "3.9", "4.1", "4.4", "4.5", "4.7", "4.9"];

fn fashion_values(attr: AttributeType) -> &'static [&'static str] {
    match attr {
        AttributeType::Type => &[
            "blouse", "shirt", "t-shirt", "dress", "skirt", "jeans", "trousers", "coat", "jacket", "sweater", "hoodie",
            "vest", "tank top", "shorts",
        ],
        AttributeType::Color => COLORS,
        AttributeType::Pattern => &["floral", "leopard print", "star design", "diamond style", "stripes", "checkered", "plain"],
        AttributeType::Material => &["natural fibers", "wool", "leather", "silk", "cotton", "denim", "polyester"],
        AttributeType::Price => &["$19", "$35", "$49", "$65", "$89", "$120", "$159", "$199", "$249", "$299", "$349", "$420"],
        AttributeType::Brand => BRANDS,
        AttributeType::Size => &["XS", "S", "M", "L", "XL", "XXL"],
        AttributeType::CustomerReview => REVIEWS,
        AttributeType::SleeveLength => &["sleeveless", "short", "half", "full"],
    }
}

fn furniture_values(attr: AttributeType) -> &'static [&'static str] {
    match attr {
        AttributeType::Type => &[
            "sofa", "armchair", "dining chair", "coffee table", "side table", "bed", "bookshelf", "lamp", "ottoman",
            "wardrobe",
        ],
        AttributeType::Color => COLORS,
        AttributeType::Material => &["leather", "metal", "marble", "plastic", "wood", "wool"],
        AttributeType::Price => &["$89", "$149", "$299", "$450", "$699", "$999", "$1,299"],
        AttributeType::Brand => &BRANDS[..7],
        AttributeType::CustomerReview => REVIEWS,
        _ => &[],
    }
}

/// The first prototypes walk through every value so the metadata covers the
/// whole vocabulary; the rest are random.
fn prototypes(
    rng: &mut ChaCha8Rng,
    prefix: &str,
    count: usize,
    domain: Domain,
    values: fn(AttributeType) -> &'static [&'static str],
) -> BTreeMap<String, BTreeMap<AttributeType, Value>> {
    (0..count)
        .map(|i| {
            let attrs = domain
                .attributes()
                .map(|a| {
                    let vs = values(a);
                    let v = if i < vs.len() { vs[i] } else { vs[rng.gen_range(0..vs.len())] };
                    (a, Value::from(v))
                })
                .collect();
            (format!("{prefix}-{i:03}"), attrs)
        })
        .collect()
}

fn region_boxes(labels: &[&str]) -> Vec<BackgroundItem> {
    let col = WIDTH / labels.len() as f64;
    labels
        .iter()
        .enumerate()
        .map(|(i, label)| BackgroundItem {
            label: label.to_string(),
            bbox: BBox::new(i as f64 * col + 10.0, 20.0, col - 20.0, SHELF_HEIGHT - 20.0),
        })
        .collect()
}

/// A box of random size centered at a random point of `area`.
fn place(rng: &mut ChaCha8Rng, area: BBox) -> BBox {
    let (w, h) = (rng.gen_range(60.0..140.0_f64).round(), rng.gen_range(80.0..180.0_f64).round());
    let cx = rng.gen_range(area.x + 5.0..area.x + area.w - 5.0).round();
    let cy = rng.gen_range(area.y + 5.0..area.y + area.h - 5.0).round();
    BBox::new(cx - w / 2.0, cy - h / 2.0, w, h)
}

struct SceneSpec {
    id: &'static str,
    domain: Domain,
    items: usize,
    regions: &'static [&'static str],
    /// (region index, object ids pinned inside it); no other item lands there.
    pinned: Option<(usize, &'static [u32])>,
}

fn build_scene(rng: &mut ChaCha8Rng, spec: &SceneSpec, pool: &[String], metadata: &Metadata) -> Scene {
    let regions = region_boxes(spec.regions);
    let floor = BBox::new(0.0, FLOOR_TOP, WIDTH, FLOOR_BOTTOM - FLOOR_TOP);
    let items = (0..spec.items as u32)
        .map(|object_id| {
            let area = match spec.pinned {
                Some((r, ids)) if ids.contains(&object_id) => regions[r].bbox,
                _ => {
                    let open: Vec<usize> =
                        (0..regions.len()).filter(|r| spec.pinned.is_none_or(|(p, _)| p != *r)).collect();
                    match open.choose(rng) {
                        Some(r) if rng.gen_bool(0.8) => regions[*r].bbox,
                        _ => floor,
                    }
                }
            };
            let prototype_id = pool.choose(rng).expect("prototype pool").clone();
            Item {
                object_id,
                bbox: place(rng, area),
                attributes: metadata.prototypes[&prototype_id].clone(),
                prototype_id,
            }
        })
        .collect();
    Scene { scene_id: spec.id.to_string(), domain: spec.domain, items, regions }
}

fn main() {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);

    let mut metadata = Metadata::default();
    metadata.prototypes.extend(prototypes(&mut rng, "fashion", 120, Domain::Fashion, fashion_values));
    metadata.prototypes.extend(prototypes(&mut rng, "furniture", 50, Domain::Furniture, furniture_values));
    let pool = |prefix: &str| -> Vec<String> {
        metadata.prototypes.keys().filter(|k| k.starts_with(prefix)).cloned().collect()
    };
    let (fashion_pool, furniture_pool) = (pool("fashion"), pool("furniture"));

    let specs = [
        SceneSpec {
            id: "fashion-01",
            domain: Domain::Fashion,
            items: 32,
            regions: &["left rack", "center table", "right shelf"],
            pinned: Some((2, &[12, 13, 16, 22, 31])),
        },
        SceneSpec { id: "fashion-02", domain: Domain::Fashion, items: 24, regions: &["back wall closet", "rightmost floor rack"], pinned: None },
        SceneSpec { id: "fashion-03", domain: Domain::Fashion, items: 29, regions: &["left rack", "front display", "right shelf", "corner closet"], pinned: None },
        SceneSpec { id: "fashion-04", domain: Domain::Fashion, items: 26, regions: &["back leftmost closet", "middle rack", "window display"], pinned: None },
        SceneSpec { id: "fashion-05", domain: Domain::Fashion, items: 31, regions: &["left wall shelf", "right wall shelf"], pinned: None },
        SceneSpec { id: "fashion-06", domain: Domain::Fashion, items: 22, regions: &["front table", "back rack", "side closet"], pinned: None },
        SceneSpec { id: "fashion-07", domain: Domain::Fashion, items: 28, regions: &["upper shelf", "lower rack"], pinned: None },
        SceneSpec { id: "furniture-01", domain: Domain::Furniture, items: 25, regions: &["left corner", "window side"], pinned: None },
        SceneSpec { id: "furniture-02", domain: Domain::Furniture, items: 27, regions: &[], pinned: None },
        SceneSpec { id: "furniture-03", domain: Domain::Furniture, items: 30, regions: &[], pinned: None },
    ];
    let scenes = specs
        .iter()
        .map(|spec| {
            let pool = if spec.domain == Domain::Fashion { &fashion_pool } else { &furniture_pool };
            build_scene(&mut rng, spec, pool, &metadata)
        })
        .collect();

    let catalog = Catalog { scenes, metadata };
    std::fs::create_dir_all(&out).expect("create output directory");
    catalog.write(out.join("scenes.json"), out.join("metadata.json")).expect("write fixtures");
    println!("wrote {} scenes to {}", catalog.scenes.len(), out.display());
}
