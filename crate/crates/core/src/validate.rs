//! Independent verification of emitted samples.
//!
//! A sample's verified depth is the length of its shortest suffix shortcut:
//! seed directly at an evidence node whose class is unique in the graph and
//! replay only the remaining hops. A shortcut counts when it ends on the same
//! node with the same answer. The full program always qualifies, so the
//! verified depth never exceeds the designed depth.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kg::KnowledgeGraph;
use crate::synth::{
    evaluate_program, evidence_span, AnswerMode, EvalOutcome, QaSample, QueryProgram, SeedOrdinal,
    SeedSelector, TemporalConstraint,
};

/// Default largest depth tracked by the alignment matrix.
pub const DEFAULT_MAX_DEPTH: usize = 4;

#[derive(Debug, Error, PartialEq)]
pub enum ValidateError {
    #[error("sample {0} no longer evaluates to its stored answer and evidence")]
    StaleSample(u64),
    #[error("no samples to tabulate")]
    EmptyInput,
    #[error("sample {0} has no verified depth")]
    UnverifiedSample(u64),
    #[error("sample {0} has a verified depth above its designed depth")]
    UpperTriangle(u64),
    #[error("alignment matrix is empty")]
    EmptyMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ViolationKind {
    AnswerMismatch,
    MissingEvidence,
    SpanMismatch,
    DepthBookkeeping,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub sample_id: u64,
    pub kind: ViolationKind,
    pub detail: String,
}

fn reproduces(sample: &QaSample, outcome: &EvalOutcome) -> bool {
    outcome.answer == sample.answer
        && outcome.evidence_nodes == sample.evidence.node_ids
        && outcome.evidence_edges == sample.evidence.edge_ids
}

/// The program that seeds at the evidence node `d` hops before the end and
/// replays the last `d` hops, the first of them unconstrained in time.
pub fn shortcut_program(program: &QueryProgram, seed_class: &str, d: usize) -> QueryProgram {
    let depth = program.hops.len();
    let mut hops = program.hops[depth - d..].to_vec();
    if let Some(first) = hops.first_mut() {
        first.temporal_constraint = TemporalConstraint::Any;
    }
    QueryProgram {
        seed: SeedSelector {
            category: None,
            class_label: Some(seed_class.to_string()),
            ordinal: SeedOrdinal::Unique,
        },
        hops,
        answer_mode: program.answer_mode,
    }
}

/// Smallest number of hops that still derives the sample's answer.
pub fn verify_depth(graph: &KnowledgeGraph, sample: &QaSample) -> Result<usize, ValidateError> {
    let outcome = evaluate_program(graph, &sample.program)
        .filter(|o| reproduces(sample, o))
        .ok_or(ValidateError::StaleSample(sample.sample_id))?;
    let depth = sample.program.hops.len();
    for d in 0..depth {
        let pivot = outcome.evidence_nodes[depth - d];
        let class = &graph.nodes()[pivot].class_label;
        let shortcut = shortcut_program(&sample.program, class, d);
        if let Some(found) = evaluate_program(graph, &shortcut) {
            if found.terminal == outcome.terminal && found.answer == outcome.answer {
                assert!(d <= depth);
                return Ok(d);
            }
        }
    }
    Ok(depth)
}

/// Audits one sample against the graph; an empty result means it is clean.
pub fn check_sample(graph: &KnowledgeGraph, sample: &QaSample) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut flag = |kind, detail: String| {
        out.push(Violation {
            sample_id: sample.sample_id,
            kind,
            detail,
        })
    };
    let outcome = evaluate_program(graph, &sample.program);

    match &outcome {
        None => flag(
            ViolationKind::AnswerMismatch,
            "program evaluates to an empty outcome".into(),
        ),
        Some(o) if o.answer != sample.answer => flag(
            ViolationKind::AnswerMismatch,
            format!("stored {:?}, evaluated {:?}", sample.answer, o.answer),
        ),
        Some(_) => {}
    }

    let ev = &sample.evidence;
    let counted = ev.counted_edge_ids.as_deref().unwrap_or(&[]);
    let missing_node = ev.node_ids.iter().find(|&&n| graph.node(n).is_none());
    let missing_edge = ev
        .edge_ids
        .iter()
        .chain(counted)
        .find(|&&e| graph.edge(e).is_none());
    if let Some(n) = missing_node {
        flag(
            ViolationKind::MissingEvidence,
            format!("node {n} does not exist"),
        );
    } else if let Some(e) = missing_edge {
        flag(
            ViolationKind::MissingEvidence,
            format!("edge {e} does not exist"),
        );
    } else {
        match &outcome {
            None => flag(
                ViolationKind::MissingEvidence,
                "evidence cannot be reproduced by an empty evaluation".into(),
            ),
            Some(o) => {
                let expected_counted = (sample.program.answer_mode == AnswerMode::Count)
                    .then_some(&o.final_candidates);
                if o.evidence_nodes != ev.node_ids || o.evidence_edges != ev.edge_ids {
                    flag(
                        ViolationKind::MissingEvidence,
                        format!(
                            "stored path {:?}/{:?}, evaluated {:?}/{:?}",
                            ev.node_ids, ev.edge_ids, o.evidence_nodes, o.evidence_edges
                        ),
                    );
                } else if expected_counted != ev.counted_edge_ids.as_ref() {
                    flag(
                        ViolationKind::MissingEvidence,
                        format!(
                            "stored counted edges {:?}, evaluated {:?}",
                            ev.counted_edge_ids, expected_counted
                        ),
                    );
                }
            }
        }
    }

    let hull_of = |ids: &[usize]| {
        evidence_span(
            ids.iter()
                .filter_map(|&e| graph.edge(e))
                .map(|e| e.interval),
        )
    };
    let expected_span = match &outcome {
        Some(o) => hull_of(&o.evidence_edges),
        None => hull_of(&ev.edge_ids),
    };
    if ev.span != expected_span {
        flag(
            ViolationKind::SpanMismatch,
            format!(
                "stored span {:?}, hull of evidence {:?}",
                ev.span, expected_span
            ),
        );
    }

    if sample.designed_depth != sample.program.hops.len() {
        flag(
            ViolationKind::DepthBookkeeping,
            format!(
                "designed depth {} but the program has {} hops",
                sample.designed_depth,
                sample.program.hops.len()
            ),
        );
    } else if sample
        .verified_depth
        .is_some_and(|v| v > sample.designed_depth)
    {
        flag(
            ViolationKind::DepthBookkeeping,
            format!(
                "verified depth {:?} exceeds designed depth {}",
                sample.verified_depth, sample.designed_depth
            ),
        );
    }
    out
}

/// Counts of samples by (designed depth, verified depth).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentMatrix {
    /// `counts[designed][verified]`.
    pub counts: Vec<Vec<u64>>,
    pub total: u64,
}

impl AlignmentMatrix {
    pub fn trace(&self) -> u64 {
        self.counts.iter().enumerate().map(|(d, row)| row[d]).sum()
    }
}

/// Tabulates verified samples. The matrix covers depths `0..=max_depth`,
/// widened if a sample is deeper.
pub fn alignment_matrix(
    samples: &[QaSample],
    max_depth: usize,
) -> Result<AlignmentMatrix, ValidateError> {
    if samples.is_empty() {
        return Err(ValidateError::EmptyInput);
    }
    let mut pairs = Vec::with_capacity(samples.len());
    for s in samples {
        let v = s
            .verified_depth
            .ok_or(ValidateError::UnverifiedSample(s.sample_id))?;
        if v > s.designed_depth {
            return Err(ValidateError::UpperTriangle(s.sample_id));
        }
        pairs.push((s.designed_depth, v));
    }
    let size = pairs.iter().map(|p| p.0).max().unwrap_or(0).max(max_depth) + 1;
    let mut counts = vec![vec![0u64; size]; size];
    for (d, v) in pairs {
        counts[d][v] += 1;
    }
    Ok(AlignmentMatrix {
        counts,
        total: samples.len() as u64,
    })
}

/// Fraction of samples on the diagonal.
pub fn diagonal_dominance(matrix: &AlignmentMatrix) -> Result<f64, ValidateError> {
    if matrix.total == 0 {
        return Err(ValidateError::EmptyMatrix);
    }
    Ok(matrix.trace() as f64 / matrix.total as f64)
}

/// Outcome of validating a whole dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub matrix: Vec<Vec<u64>>,
    pub diagonal_dominance: Option<f64>,
    pub violations: Vec<Violation>,
    pub total: u64,
}

/// Verifies every sample, fills in missing verified depths, audits each
/// sample, and tabulates the alignment matrix.
///
/// Samples that cannot be verified (stale against this graph) and carry no
/// stored verified depth are left out of the matrix; their audit violations
/// are reported. A stored verified depth that disagrees with re-verification
/// is a depth bookkeeping violation.
pub fn validate_dataset(
    graph: &KnowledgeGraph,
    samples: &mut [QaSample],
    max_depth: usize,
) -> ValidationReport {
    let checked: Vec<(Option<usize>, Vec<Violation>)> = samples
        .par_iter()
        .map(|s| {
            let mut violations = check_sample(graph, s);
            let verified = verify_depth(graph, s).ok();
            if let (Some(stored), Some(fresh)) = (s.verified_depth, verified) {
                if stored != fresh {
                    violations.push(Violation {
                        sample_id: s.sample_id,
                        kind: ViolationKind::DepthBookkeeping,
                        detail: format!("stored verified depth {stored}, re-verified {fresh}"),
                    });
                }
            }
            (verified, violations)
        })
        .collect();

    let mut violations = Vec::new();
    for (s, (verified, found)) in samples.iter_mut().zip(checked) {
        if verified.is_some() {
            s.verified_depth = verified;
        }
        violations.extend(found);
    }
    let tabulated: Vec<QaSample> = samples
        .iter()
        .filter(|s| s.verified_depth.is_some_and(|v| v <= s.designed_depth))
        .cloned()
        .collect();
    let matrix = alignment_matrix(&tabulated, max_depth).ok();
    let dominance = matrix.as_ref().and_then(|m| diagonal_dominance(m).ok());
    let size = max_depth + 1;
    ValidationReport {
        total: matrix.as_ref().map_or(0, |m| m.total),
        matrix: matrix.map_or_else(|| vec![vec![0; size]; size], |m| m.counts),
        diagonal_dominance: dominance,
        violations,
    }
}
