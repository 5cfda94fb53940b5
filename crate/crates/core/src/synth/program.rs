use serde::{Deserialize, Serialize};

use super::SynthError;
use crate::ingest::Category;
use crate::interval::TimeInterval;
use crate::kg::Predicate;

/// How a seed selector collapses its matching nodes to one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedOrdinal {
    /// Earliest lifespan start, smaller node id on ties.
    First,
    /// Latest lifespan start, smaller node id on ties.
    Last,
    /// Exactly one node must match.
    Unique,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HopOrdinal {
    First,
    Last,
}

/// Which role the current node must play on a traversed edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    AsSubject,
    AsObject,
    Either,
}

/// Constraint of a hop's edge relative to the previous hop's edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemporalConstraint {
    Any,
    /// Strictly later: `After` or `MetBy` the previous edge.
    AfterPrev,
    /// Strictly earlier: `Before` or `Meets` the previous edge.
    BeforePrev,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerMode {
    EntityClass,
    TimeSpan,
    Count,
}

impl AnswerMode {
    pub fn as_str(self) -> &'static str {
        match self {
            AnswerMode::EntityClass => "entity_class",
            AnswerMode::TimeSpan => "time_span",
            AnswerMode::Count => "count",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSelector {
    pub category: Option<Category>,
    pub class_label: Option<String>,
    pub ordinal: SeedOrdinal,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraverseOp {
    pub predicate: Predicate,
    pub direction: Direction,
    pub target_category: Option<Category>,
    pub temporal_constraint: TemporalConstraint,
    pub ordinal: HopOrdinal,
}

/// A question as an executable traversal: a seed, then one edge per hop.
/// The number of hops is the designed reasoning depth.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueryProgram {
    pub seed: SeedSelector,
    pub hops: Vec<TraverseOp>,
    pub answer_mode: AnswerMode,
}

impl QueryProgram {
    pub fn designed_depth(&self) -> usize {
        self.hops.len()
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let invalid = |msg: &str| Err(SynthError::InvalidProgram(msg.to_string()));
        if self.seed.category.is_none() && self.seed.class_label.is_none() {
            return invalid("seed selector needs a category or class filter");
        }
        if let Some(first) = self.hops.first() {
            if first.temporal_constraint != TemporalConstraint::Any {
                return invalid("the first hop has no previous edge to constrain against");
            }
        }
        if self.hops.is_empty() && self.answer_mode != AnswerMode::EntityClass {
            return invalid("time_span and count answers need at least one hop");
        }
        Ok(())
    }
}

/// A program's answer, serialized as `{"kind": ..., "value": ...}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Answer {
    EntityClass(String),
    TimeSpan(TimeInterval),
    Count(u64),
}

impl Answer {
    pub fn mode(&self) -> AnswerMode {
        match self {
            Answer::EntityClass(_) => AnswerMode::EntityClass,
            Answer::TimeSpan(_) => AnswerMode::TimeSpan,
            Answer::Count(_) => AnswerMode::Count,
        }
    }
}

/// Result of running a program: where it ended, how it got there, and the
/// answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalOutcome {
    pub terminal: usize,
    /// Seed first, then one node per hop.
    pub evidence_nodes: Vec<usize>,
    pub evidence_edges: Vec<usize>,
    /// The final hop's candidate edges before ordinal selection, ascending.
    /// Empty for depth-zero programs.
    pub final_candidates: Vec<usize>,
    pub answer: Answer,
}
