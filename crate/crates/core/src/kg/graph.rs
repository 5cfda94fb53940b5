use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;

use super::detect::{role_subject, Interaction};
use super::{detect_interactions, DetectionConfig, KgError, Predicate};
use crate::ingest::{validate_batch, Category, Tubelet};
use crate::interval::TimeInterval;

#[derive(Debug, Clone, PartialEq)]
pub struct EntityNode {
    pub node_id: usize,
    pub video_id: String,
    pub track_id: String,
    pub class_label: String,
    pub category: Category,
    pub lifespan: TimeInterval,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InteractionEdge {
    pub edge_id: usize,
    pub subject: usize,
    pub object: usize,
    pub predicate: Predicate,
    pub interval: TimeInterval,
    /// Mean per-frame IoU for `touches`, mean `1 - distance` for `near`.
    pub mean_overlap: f64,
}

impl InteractionEdge {
    /// The endpoint opposite `node`.
    pub fn other(&self, node: usize) -> usize {
        if self.subject == node {
            self.object
        } else {
            self.subject
        }
    }
}

/// Immutable temporal knowledge graph.
///
/// Node and edge ids are contiguous from zero. Edges are sorted by
/// `(interval.start, edge_id)`, so ascending edge id is also chronological
/// order by start frame.
#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeGraph {
    nodes: Vec<EntityNode>,
    edges: Vec<InteractionEdge>,
    config: DetectionConfig,
    adjacency: Vec<Vec<usize>>,
}

impl KnowledgeGraph {
    /// Assembles a graph and checks every invariant.
    pub fn from_parts(
        nodes: Vec<EntityNode>,
        edges: Vec<InteractionEdge>,
        config: DetectionConfig,
    ) -> Result<Self, KgError> {
        let bad = |msg: String| Err(KgError::InvariantViolation(msg));
        config
            .validate()
            .map_err(|e| KgError::InvariantViolation(e.to_string()))?;

        let mut tracks = HashSet::new();
        for (i, n) in nodes.iter().enumerate() {
            if n.node_id != i {
                return bad(format!("node at position {i} has id {}", n.node_id));
            }
            if !tracks.insert((n.video_id.as_str(), n.track_id.as_str())) {
                return bad(format!(
                    "duplicate track {} in video {}",
                    n.track_id, n.video_id
                ));
            }
        }

        let mut runs: BTreeMap<(usize, usize, Predicate), Vec<TimeInterval>> = BTreeMap::new();
        let mut prev_start = 0;
        for (i, e) in edges.iter().enumerate() {
            if e.edge_id != i {
                return bad(format!("edge at position {i} has id {}", e.edge_id));
            }
            let (Some(s), Some(o)) = (nodes.get(e.subject), nodes.get(e.object)) else {
                return bad(format!(
                    "edge {i} references node {} but the graph has {} nodes",
                    e.subject.max(e.object),
                    nodes.len()
                ));
            };
            if e.subject == e.object {
                return bad(format!("edge {i} is a self loop on node {}", e.subject));
            }
            if s.video_id != o.video_id {
                return bad(format!("edge {i} crosses videos"));
            }
            if !s.lifespan.contains(&e.interval) || !o.lifespan.contains(&e.interval) {
                return bad(format!(
                    "edge {i} interval {} outside endpoint lifespans",
                    e.interval
                ));
            }
            if !role_subject(s.category, &s.track_id, o.category, &o.track_id) {
                return bad(format!("edge {i} has subject and object roles swapped"));
            }
            if !(0.0..=1.0).contains(&e.mean_overlap) {
                return bad(format!(
                    "edge {i} mean_overlap {} not in [0, 1]",
                    e.mean_overlap
                ));
            }
            if e.interval.start < prev_start {
                return bad(format!("edge {i} is out of start-frame order"));
            }
            prev_start = e.interval.start;
            runs.entry((e.subject, e.object, e.predicate))
                .or_default()
                .push(e.interval);
        }
        for ((s, o, p), mut spans) in runs {
            spans.sort();
            if let Some(w) = spans
                .windows(2)
                .find(|w| w[0].gap_to(&w[1]) <= config.gap_tolerance)
            {
                return bad(format!(
                    "unmerged {p} edges between nodes {s} and {o}: {} and {}",
                    w[0], w[1]
                ));
            }
        }

        let mut adjacency = vec![Vec::new(); nodes.len()];
        for e in &edges {
            adjacency[e.subject].push(e.edge_id);
            adjacency[e.object].push(e.edge_id);
        }
        Ok(Self {
            nodes,
            edges,
            config,
            adjacency,
        })
    }

    pub fn nodes(&self) -> &[EntityNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[InteractionEdge] {
        &self.edges
    }

    pub fn config(&self) -> &DetectionConfig {
        &self.config
    }

    pub fn node(&self, id: usize) -> Option<&EntityNode> {
        self.nodes.get(id)
    }

    pub fn edge(&self, id: usize) -> Option<&InteractionEdge> {
        self.edges.get(id)
    }

    /// Ids of the edges incident to `node`, ascending.
    pub fn incident(&self, node: usize) -> &[usize] {
        self.adjacency.get(node).map_or(&[], Vec::as_slice)
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Builds the graph for one video (or several, partitioned by `video_id`).
///
/// Node `i` is tubelet `i`. Pair detection runs in parallel; results are
/// merged in canonical track-pair order, so the output does not depend on
/// the thread count.
pub fn build_graph(tubelets: &[Tubelet], cfg: &DetectionConfig) -> Result<KnowledgeGraph, KgError> {
    cfg.validate()?;
    validate_batch(tubelets)?;

    let nodes: Vec<EntityNode> = tubelets
        .iter()
        .enumerate()
        .map(|(i, t)| EntityNode {
            node_id: i,
            video_id: t.video_id.clone(),
            track_id: t.track_id.clone(),
            class_label: t.class_label.clone(),
            category: t.category,
            lifespan: t.lifespan().expect("validated tubelets have boxes"),
        })
        .collect();

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..tubelets.len() {
        for j in i + 1..tubelets.len() {
            if tubelets[i].video_id == tubelets[j].video_id {
                pairs.push((i, j));
            }
        }
    }
    pairs.sort_by(|&(a, b), &(c, d)| {
        let key = |x: usize, y: usize| {
            let (tx, ty) = (&tubelets[x].track_id, &tubelets[y].track_id);
            (&tubelets[x].video_id, tx.min(ty), tx.max(ty))
        };
        key(a, b).cmp(&key(c, d))
    });

    let detected: Vec<Vec<Interaction>> = pairs
        .par_iter()
        .map(|&(i, j)| detect_interactions(&tubelets[i], &tubelets[j], i, j, cfg))
        .collect::<Result<_, _>>()?;

    let mut grouped: BTreeMap<(usize, usize, Predicate), Vec<Interaction>> = BTreeMap::new();
    for found in detected.into_iter().flatten() {
        grouped
            .entry((found.subject, found.object, found.predicate))
            .or_default()
            .push(found);
    }
    let mut merged: Vec<Interaction> = Vec::new();
    for (_, mut group) in grouped {
        group.sort_by_key(|x| x.interval);
        let mut iter = group.into_iter();
        let mut cur = iter.next().expect("groups are non-empty");
        for next in iter {
            if cur.interval.gap_to(&next.interval) <= cfg.gap_tolerance {
                cur.interval = cur.interval.hull(&next.interval);
                cur.overlap_sum += next.overlap_sum;
                cur.overlap_frames += next.overlap_frames;
            } else {
                merged.push(std::mem::replace(&mut cur, next));
            }
        }
        merged.push(cur);
    }
    merged.sort_by(|a, b| {
        (
            a.interval.start,
            a.interval.end,
            a.subject,
            a.object,
            a.predicate,
        )
            .cmp(&(
                b.interval.start,
                b.interval.end,
                b.subject,
                b.object,
                b.predicate,
            ))
    });

    let edges = merged
        .into_iter()
        .enumerate()
        .map(|(edge_id, x)| InteractionEdge {
            edge_id,
            subject: x.subject,
            object: x.object,
            predicate: x.predicate,
            interval: x.interval,
            mean_overlap: x.mean_overlap(),
        })
        .collect();
    KnowledgeGraph::from_parts(nodes, edges, *cfg)
}
