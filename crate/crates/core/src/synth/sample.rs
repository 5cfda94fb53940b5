use serde::{Deserialize, Serialize};

use super::{Answer, QueryProgram, SynthError};
use crate::interval::TimeInterval;

/// The witness for a sample's answer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Evidence {
    pub node_ids: Vec<usize>,
    pub edge_ids: Vec<usize>,
    /// Hull of the evidence edge intervals; `None` for depth zero.
    pub span: Option<TimeInterval>,
    /// For count answers: the counted final-hop edges.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counted_edge_ids: Option<Vec<usize>>,
}

/// One question/answer/evidence record of a workload.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QaSample {
    pub sample_id: u64,
    pub video_id: String,
    pub question: String,
    pub answer: Answer,
    pub program: QueryProgram,
    pub evidence: Evidence,
    pub designed_depth: usize,
    /// Filled by depth verification; `None` until then.
    pub verified_depth: Option<usize>,
    pub template_id: String,
    pub generation_seed: u64,
}

/// Hull of the intervals of `edges`, `None` when there are none.
pub fn evidence_span(intervals: impl IntoIterator<Item = TimeInterval>) -> Option<TimeInterval> {
    intervals.into_iter().reduce(|a, b| a.hull(&b))
}

/// Writes a dataset as JSON Lines.
pub fn write_dataset(samples: &[QaSample]) -> String {
    let mut out = String::new();
    for s in samples {
        out.push_str(&serde_json::to_string(s).expect("samples always serialize"));
        out.push('\n');
    }
    out
}

/// Reads a JSON-Lines dataset. Line numbers in errors are 1-based.
pub fn parse_dataset(text: &str) -> Result<Vec<QaSample>, SynthError> {
    text.lines()
        .enumerate()
        .map(|(i, line)| {
            serde_json::from_str(line).map_err(|e| SynthError::MalformedSample {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}
