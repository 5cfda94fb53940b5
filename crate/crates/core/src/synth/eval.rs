use super::{
    Answer, AnswerMode, Direction, EvalOutcome, HopOrdinal, QueryProgram, SeedOrdinal,
    SeedSelector, TemporalConstraint, TraverseOp,
};
use crate::interval::{allen_relation, AllenRelation};
use crate::kg::{InteractionEdge, KnowledgeGraph};

/// Restricts evaluation to a subset of the graph, keeping original ids.
pub(crate) struct Mask {
    nodes: Vec<bool>,
    edges: Vec<bool>,
}

impl Mask {
    pub(crate) fn new(graph: &KnowledgeGraph, nodes: &[usize], edges: &[usize]) -> Self {
        let mut m = Mask {
            nodes: vec![false; graph.nodes().len()],
            edges: vec![false; graph.edges().len()],
        };
        for &n in nodes {
            if let Some(slot) = m.nodes.get_mut(n) {
                *slot = true;
            }
        }
        for &e in edges {
            if let Some(slot) = m.edges.get_mut(e) {
                *slot = true;
            }
        }
        m
    }
}

fn node_visible(mask: Option<&Mask>, id: usize) -> bool {
    mask.is_none_or(|m| m.nodes[id])
}

fn edge_visible(mask: Option<&Mask>, edge: &InteractionEdge) -> bool {
    mask.is_none_or(|m| m.edges[edge.edge_id] && m.nodes[edge.subject] && m.nodes[edge.object])
}

/// Resolves a seed selector to a single node id.
pub(crate) fn resolve_seed(
    graph: &KnowledgeGraph,
    seed: &SeedSelector,
    mask: Option<&Mask>,
) -> Option<usize> {
    if seed.category.is_none() && seed.class_label.is_none() {
        return None;
    }
    let mut matches = graph.nodes().iter().filter(|n| {
        node_visible(mask, n.node_id)
            && seed.category.is_none_or(|c| n.category == c)
            && seed
                .class_label
                .as_deref()
                .is_none_or(|c| n.class_label == c)
    });
    match seed.ordinal {
        // min_by_key keeps the first of equal keys, so ties go to the
        // smaller node id in both cases
        SeedOrdinal::First => matches.min_by_key(|n| n.lifespan.start).map(|n| n.node_id),
        SeedOrdinal::Last => matches
            .min_by_key(|n| std::cmp::Reverse(n.lifespan.start))
            .map(|n| n.node_id),
        SeedOrdinal::Unique => {
            let only = matches.next()?;
            matches.next().is_none().then_some(only.node_id)
        }
    }
}

/// Edge ids incident to `node` that satisfy every filter of `op`, ascending.
pub(crate) fn hop_candidates(
    graph: &KnowledgeGraph,
    node: usize,
    op: &TraverseOp,
    prev: Option<&InteractionEdge>,
    mask: Option<&Mask>,
) -> Vec<usize> {
    graph
        .incident(node)
        .iter()
        .copied()
        .filter(|&id| {
            let e = &graph.edges()[id];
            edge_visible(mask, e)
                && e.predicate == op.predicate
                && match op.direction {
                    Direction::AsSubject => e.subject == node,
                    Direction::AsObject => e.object == node,
                    Direction::Either => true,
                }
                && op
                    .target_category
                    .is_none_or(|c| graph.nodes()[e.other(node)].category == c)
                && temporal_ok(op.temporal_constraint, e, prev)
        })
        .collect()
}

pub(crate) fn temporal_ok(
    constraint: TemporalConstraint,
    candidate: &InteractionEdge,
    prev: Option<&InteractionEdge>,
) -> bool {
    match (constraint, prev) {
        (TemporalConstraint::Any, _) => true,
        (_, None) => false,
        (TemporalConstraint::AfterPrev, Some(p)) => matches!(
            allen_relation(&candidate.interval, &p.interval),
            AllenRelation::After | AllenRelation::MetBy
        ),
        (TemporalConstraint::BeforePrev, Some(p)) => matches!(
            allen_relation(&candidate.interval, &p.interval),
            AllenRelation::Before | AllenRelation::Meets
        ),
    }
}

/// Picks one edge from ascending candidates. Edge ids follow
/// `(interval.start, edge_id)` order, so first/last are the ends of the list.
pub(crate) fn pick(candidates: &[usize], ordinal: HopOrdinal) -> Option<usize> {
    match ordinal {
        HopOrdinal::First => candidates.first().copied(),
        HopOrdinal::Last => candidates.last().copied(),
    }
}

pub(crate) fn evaluate_masked(
    graph: &KnowledgeGraph,
    program: &QueryProgram,
    mask: Option<&Mask>,
) -> Option<EvalOutcome> {
    if program.hops.is_empty() && program.answer_mode != AnswerMode::EntityClass {
        return None;
    }
    let seed = resolve_seed(graph, &program.seed, mask)?;
    let mut current = seed;
    let mut evidence_nodes = vec![seed];
    let mut evidence_edges = Vec::with_capacity(program.hops.len());
    let mut final_candidates = Vec::new();
    let mut prev: Option<&InteractionEdge> = None;
    for op in &program.hops {
        let candidates = hop_candidates(graph, current, op, prev, mask);
        let chosen = pick(&candidates, op.ordinal)?;
        let edge = &graph.edges()[chosen];
        current = edge.other(current);
        evidence_nodes.push(current);
        evidence_edges.push(chosen);
        prev = Some(edge);
        final_candidates = candidates;
    }
    let answer = match program.answer_mode {
        AnswerMode::EntityClass => Answer::EntityClass(graph.nodes()[current].class_label.clone()),
        AnswerMode::TimeSpan => Answer::TimeSpan(prev?.interval),
        AnswerMode::Count => Answer::Count(final_candidates.len() as u64),
    };
    Some(EvalOutcome {
        terminal: current,
        evidence_nodes,
        evidence_edges,
        final_candidates,
        answer,
    })
}

/// Runs a program over the graph. `None` is the empty outcome: the seed did
/// not resolve or some hop had no candidate edge.
pub fn evaluate_program(graph: &KnowledgeGraph, program: &QueryProgram) -> Option<EvalOutcome> {
    evaluate_masked(graph, program, None)
}

/// Runs a program over the subgraph made of `nodes` and those of `edges`
/// whose endpoints are both in `nodes`. Ids keep their meaning.
pub fn evaluate_on_subgraph(
    graph: &KnowledgeGraph,
    program: &QueryProgram,
    nodes: &[usize],
    edges: &[usize],
) -> Option<EvalOutcome> {
    let mask = Mask::new(graph, nodes, edges);
    evaluate_masked(graph, program, Some(&mask))
}
