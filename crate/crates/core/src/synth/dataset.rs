//! Quota-driven rejection sampling of QA samples.
//!
//! Attempt `j` for depth `d` draws from its own random stream keyed by
//! `(master_seed, d, j)`. Attempts are evaluated in parallel in fixed-size
//! chunks and accepted strictly in attempt order, so the emitted dataset
//! depends only on the inputs and never on scheduling.

use std::collections::BTreeMap;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eval::{hop_candidates, pick, resolve_seed, temporal_ok};
use super::{
    evaluate_program, evidence_span, render_question, Answer, AnswerMode, Direction, Evidence,
    HopOrdinal, QaSample, QaTemplate, QueryProgram, SeedOrdinal, SeedSelector, SynthError,
    TraverseOp,
};
use crate::kg::KnowledgeGraph;
use crate::validate::verify_depth;

const CHUNK: usize = 256;

/// Requested number of samples per designed depth.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisPlan {
    pub quotas: BTreeMap<usize, usize>,
}

impl SynthesisPlan {
    pub fn new(quotas: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Self {
            quotas: quotas.into_iter().collect(),
        }
    }

    pub fn total(&self) -> usize {
        self.quotas.values().sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisOptions {
    pub master_seed: u64,
    /// Reject samples whose verified depth falls short of the designed depth.
    pub enforce_minimality: bool,
    /// Attempt budget per requested sample.
    pub max_attempts: usize,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self {
            master_seed: 0,
            enforce_minimality: true,
            max_attempts: 200,
        }
    }
}

/// Why an attempt produced no sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rejection {
    /// The seed did not resolve or a hop had no candidate edge.
    Empty,
    /// Entity answer equal to the seed's own class.
    Degenerate,
    /// A shorter derivation reaches the same answer.
    NotMinimal,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthTally {
    pub accepted: usize,
    pub attempts: usize,
    pub rejected: BTreeMap<Rejection, usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SynthesisOutput {
    pub samples: Vec<QaSample>,
    pub tallies: BTreeMap<usize, DepthTally>,
}

/// Seed of the private stream for attempt `attempt` at `depth`.
pub fn attempt_seed(master_seed: u64, depth: usize, attempt: usize) -> u64 {
    let lane = splitmix64(((depth as u64) << 48) ^ attempt as u64);
    splitmix64(master_seed ^ lane)
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Fills every per-depth quota by rejection sampling.
pub fn synthesize_dataset(
    graph: &KnowledgeGraph,
    plan: &SynthesisPlan,
    templates: &[QaTemplate],
    options: &SynthesisOptions,
) -> Result<SynthesisOutput, SynthError> {
    for t in templates {
        t.check().map_err(SynthError::InvalidTemplate)?;
    }
    let mut by_depth: BTreeMap<usize, Vec<&QaTemplate>> = BTreeMap::new();
    for t in templates {
        by_depth.entry(t.depth).or_default().push(t);
    }
    for (&depth, &quota) in &plan.quotas {
        if quota > 0 && !by_depth.contains_key(&depth) {
            return Err(SynthError::MissingTemplate(depth));
        }
    }

    let video_id = graph
        .nodes()
        .first()
        .map(|n| n.video_id.clone())
        .unwrap_or_default();
    let mut samples = Vec::with_capacity(plan.total());
    let mut tallies = BTreeMap::new();

    for (&depth, &quota) in &plan.quotas {
        if quota == 0 {
            continue;
        }
        let pool = &by_depth[&depth];
        let budget = options.max_attempts.saturating_mul(quota);
        let mut tally = DepthTally::default();
        let mut next = 0usize;
        while tally.accepted < quota {
            if next >= budget {
                return Err(SynthError::InsufficientGraph {
                    depth,
                    attempts: budget,
                });
            }
            let end = (next + CHUNK).min(budget);
            let results: Vec<Result<QaSample, Rejection>> = (next..end)
                .into_par_iter()
                .map(|j| {
                    let seed = attempt_seed(options.master_seed, depth, j);
                    attempt(graph, pool, seed, options.enforce_minimality, &video_id)
                })
                .collect();
            for result in results {
                tally.attempts += 1;
                match result {
                    Ok(mut sample) => {
                        sample.sample_id = samples.len() as u64;
                        samples.push(sample);
                        tally.accepted += 1;
                        if tally.accepted == quota {
                            break;
                        }
                    }
                    Err(why) => *tally.rejected.entry(why).or_default() += 1,
                }
            }
            next = end;
        }
        tallies.insert(depth, tally);
    }
    Ok(SynthesisOutput { samples, tallies })
}

/// One sampling attempt. Program parameters are drawn only from what the
/// graph offers along the walk, then the finished program is re-evaluated
/// from scratch so the stored outcome is the evaluator's.
fn attempt(
    graph: &KnowledgeGraph,
    pool: &[&QaTemplate],
    seed: u64,
    enforce_minimality: bool,
    video_id: &str,
) -> Result<QaSample, Rejection> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let template = *pool.choose(&mut rng).expect("template pool is non-empty");
    let anchor = graph.nodes().choose(&mut rng).ok_or(Rejection::Empty)?;

    let ordinal = *[SeedOrdinal::First, SeedOrdinal::Last, SeedOrdinal::Unique]
        .choose(&mut rng)
        .expect("non-empty");
    let selector = SeedSelector {
        category: rng.random_bool(0.5).then_some(anchor.category),
        class_label: Some(anchor.class_label.clone()),
        ordinal,
    };
    let seed_node = resolve_seed(graph, &selector, None).ok_or(Rejection::Empty)?;

    let mut current = seed_node;
    let mut prev = None;
    let mut hops = Vec::with_capacity(template.depth);
    for &constraint in &template.temporal {
        let offered: Vec<usize> = graph
            .incident(current)
            .iter()
            .copied()
            .filter(|&id| temporal_ok(constraint, &graph.edges()[id], prev))
            .collect();
        let sampled = &graph.edges()[*offered.choose(&mut rng).ok_or(Rejection::Empty)?];
        let role = if sampled.subject == current {
            Direction::AsSubject
        } else {
            Direction::AsObject
        };
        let op = TraverseOp {
            predicate: sampled.predicate,
            direction: if rng.random_bool(0.5) {
                role
            } else {
                Direction::Either
            },
            target_category: rng
                .random_bool(0.75)
                .then(|| graph.nodes()[sampled.other(current)].category),
            temporal_constraint: constraint,
            ordinal: if rng.random_bool(0.5) {
                HopOrdinal::First
            } else {
                HopOrdinal::Last
            },
        };
        let candidates = hop_candidates(graph, current, &op, prev, None);
        let chosen = &graph.edges()[pick(&candidates, op.ordinal).ok_or(Rejection::Empty)?];
        current = chosen.other(current);
        prev = Some(chosen);
        hops.push(op);
    }

    let program = QueryProgram {
        seed: selector,
        hops,
        answer_mode: template.answer_mode,
    };
    let outcome = evaluate_program(graph, &program).ok_or(Rejection::Empty)?;
    if let Answer::EntityClass(class) = &outcome.answer {
        if *class == graph.nodes()[seed_node].class_label {
            return Err(Rejection::Degenerate);
        }
    }

    let question = render_question(template, &program).expect("program built from the template");
    let span = evidence_span(
        outcome
            .evidence_edges
            .iter()
            .map(|&e| graph.edges()[e].interval),
    );
    let counted =
        (program.answer_mode == AnswerMode::Count).then(|| outcome.final_candidates.clone());
    let mut sample = QaSample {
        sample_id: 0,
        video_id: video_id.to_string(),
        question,
        answer: outcome.answer,
        designed_depth: program.designed_depth(),
        program,
        evidence: Evidence {
            node_ids: outcome.evidence_nodes,
            edge_ids: outcome.evidence_edges,
            span,
            counted_edge_ids: counted,
        },
        verified_depth: None,
        template_id: template.template_id.clone(),
        generation_seed: seed,
    };
    if enforce_minimality {
        let verified = verify_depth(graph, &sample).expect("freshly evaluated sample is current");
        if verified < sample.designed_depth {
            return Err(Rejection::NotMinimal);
        }
        sample.verified_depth = Some(verified);
    }
    Ok(sample)
}
