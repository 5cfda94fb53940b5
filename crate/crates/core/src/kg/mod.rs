//! The temporal knowledge graph: entity nodes joined by time-stamped
//! interaction edges detected from tubelet pairs.

mod detect;
mod graph;
mod io;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::IngestError;

pub use detect::{detect_interactions, is_subject, DetectionConfig, Interaction};
pub use graph::{build_graph, EntityNode, InteractionEdge, KnowledgeGraph};
pub use io::{deserialize_graph, serialize_graph};

pub use crate::geometry::{center_distance, iou};
pub use crate::interval::{allen_relation, AllenRelation, TimeInterval};

/// Edge label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    Touches = 0,
    Near = 1,
}

impl Predicate {
    pub const ALL: [Predicate; 2] = [Predicate::Touches, Predicate::Near];

    pub fn as_str(self) -> &'static str {
        match self {
            Predicate::Touches => "touches",
            Predicate::Near => "near",
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum KgError {
    #[error("tubelet {0} paired with itself")]
    SameTubelet(String),
    #[error("tubelets belong to different videos ({a} vs {b})")]
    VideoMismatch { a: String, b: String },
    #[error("invalid detection config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("malformed graph file: {0}")]
    MalformedGraphFile(String),
    #[error("graph invariant violated: {0}")]
    InvariantViolation(String),
}
