//! Query synthesis: questions as traversal programs over the graph, their
//! deterministic evaluation, template rendering, and quota-driven dataset
//! sampling.

mod dataset;
mod eval;
mod program;
mod sample;
mod template;

use thiserror::Error;

pub use dataset::{
    attempt_seed, synthesize_dataset, DepthTally, Rejection, SynthesisOptions, SynthesisOutput,
    SynthesisPlan,
};
pub use eval::{evaluate_on_subgraph, evaluate_program};
pub use program::{
    Answer, AnswerMode, Direction, EvalOutcome, HopOrdinal, QueryProgram, SeedOrdinal,
    SeedSelector, TemporalConstraint, TraverseOp,
};
pub use sample::{evidence_span, parse_dataset, write_dataset, Evidence, QaSample};
pub use template::{
    builtin_templates, display_category, display_class, display_predicate, render_question,
    QaTemplate,
};

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("template {template_id} does not fit the program: {detail}")]
    TemplateMismatch { template_id: String, detail: String },
    #[error("invalid template: {0}")]
    InvalidTemplate(String),
    #[error("no template for depth {0}")]
    MissingTemplate(usize),
    #[error("invalid program: {0}")]
    InvalidProgram(String),
    #[error("graph cannot fill the depth-{depth} quota within {attempts} attempts")]
    InsufficientGraph { depth: usize, attempts: usize },
    #[error("line {line}: malformed sample: {message}")]
    MalformedSample { line: usize, message: String },
}

/// Evidence subgraph of a sample: its nodes and edges, plus the counted
/// edges and their endpoints for count answers.
pub fn evidence_subgraph(
    graph: &crate::kg::KnowledgeGraph,
    evidence: &Evidence,
) -> (Vec<usize>, Vec<usize>) {
    let mut nodes = evidence.node_ids.clone();
    let mut edges = evidence.edge_ids.clone();
    if let Some(counted) = &evidence.counted_edge_ids {
        for &id in counted {
            edges.push(id);
            if let Some(e) = graph.edge(id) {
                nodes.push(e.subject);
                nodes.push(e.object);
            }
        }
    }
    nodes.sort_unstable();
    nodes.dedup();
    edges.sort_unstable();
    edges.dedup();
    (nodes, edges)
}
