//! Knowledge-graph based synthesis of vehicle trip records.
//!
//! Raw trip rows are turned into a typed trip graph, vehicles are labelled by
//! mobility pattern, characteristic graphs are extracted per label, and a
//! synthetic trip graph is generated that reproduces those characteristics.

pub mod chargraph;
pub mod config;
pub mod error;
pub mod evaluate;
pub mod generator;
pub mod ingest;
pub mod kg;
pub mod mining;
pub mod synth;
pub mod time;

pub use config::PipelineConfig;
pub use error::{Error, Result};
pub use kg::{EntityRef, EntityType, Relation, TripKG};
