//! Ingestion: the tubelet file contract and a scripted scene simulator whose
//! ground truth is known by construction.

mod scene;
mod script;
mod tubelet;

use thiserror::Error;

pub use scene::{generate_random_script, generate_scene, GeometryConfig, RandomScriptParams};
pub use script::{CastMember, SceneScript, ScriptEvent};
pub use tubelet::{
    parse_tubelets, parse_tubelets_str, validate_batch, write_tubelets, Category, FrameBox, Tubelet,
};

#[derive(Debug, Error, PartialEq)]
pub enum IngestError {
    #[error("line {line}: malformed record: {message}")]
    MalformedRecord { line: usize, message: String },
    #[error("line {line}: read failed: {message}")]
    Io { line: usize, message: String },
    #[error("duplicate track {track_id} in video {video_id}")]
    DuplicateTrack { video_id: String, track_id: String },
    #[error("line {line}: box coordinates out of range at frame {frame}")]
    CoordinateOutOfRange { line: usize, frame: u32 },
    #[error("line {line}: frame {frame} does not increase")]
    NonIncreasingFrames { line: usize, frame: u32 },
    #[error("line {line}: tubelet has no boxes")]
    EmptyBoxes { line: usize },
    #[error("invalid scene script: {0}")]
    InvalidScript(String),
    #[error("infeasible scene script: {0}")]
    InfeasibleScript(String),
    #[error("infeasible script parameters: {0}")]
    InfeasibleParams(String),
}
