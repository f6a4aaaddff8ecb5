//! Simulation and evaluation toolkit for shopping dialogs in which a
//! salesperson elicits subjective preferences and recommends an item from a
//! store scene.
//!
//! The pipeline:
//!
//! * [`catalog`] loads store scenes and item metadata;
//! * [`ontology`] maps preference phrases to concepts and concepts to values;
//! * [`engine`] generates annotated dialog flows by self-play;
//! * [`realizer`] renders flows to text from templates;
//! * [`evalhub`] builds gold files, scores predictions, and reports corpus
//!   statistics.

pub mod catalog;
pub mod engine;
pub mod error;
pub mod evalhub;
pub mod ontology;
pub mod par;
pub mod realizer;

pub use catalog::{load_catalog, AttributeType, Catalog, Domain, Scene, Value};
pub use error::{Error, Result};
pub use ontology::{Ontology, Polarity, SpdMode};
