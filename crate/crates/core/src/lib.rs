//! Turns tracked entity tubelets into a temporal knowledge graph and
//! synthesizes multi-hop question/answer/evidence workloads over it with a
//! controlled, independently verified reasoning depth.

pub mod geometry;
pub mod ingest;
pub mod interval;
pub mod kg;
pub mod profile;
pub mod synth;
pub mod validate;

pub use geometry::BoundingBox;
pub use ingest::{Category, SceneScript, Tubelet};
pub use interval::{AllenRelation, TimeInterval};
pub use kg::{DetectionConfig, KnowledgeGraph, Predicate};
pub use profile::{DatasetStats, GroundingMetrics, Prediction};
pub use synth::{Answer, QaSample, QaTemplate, QueryProgram, SynthesisOptions, SynthesisPlan};
pub use validate::{ValidationReport, Violation, ViolationKind};
