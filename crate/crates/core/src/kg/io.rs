use serde::{Deserialize, Serialize};

use super::{DetectionConfig, EntityNode, InteractionEdge, KgError, KnowledgeGraph, Predicate};
use crate::ingest::Category;
use crate::interval::TimeInterval;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeRecord {
    node_id: usize,
    video_id: String,
    track_id: String,
    class_label: String,
    category: Category,
    lifespan: TimeInterval,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    edge_id: usize,
    subject: usize,
    object: usize,
    predicate: Predicate,
    interval: TimeInterval,
    mean_overlap: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    nodes: Vec<NodeRecord>,
    edges: Vec<EdgeRecord>,
    config: DetectionConfig,
}

/// Writes the graph as a single JSON document with `nodes`, `edges` and
/// the detection `config`. Adjacency is not stored; it is rebuilt on load.
pub fn serialize_graph(g: &KnowledgeGraph) -> String {
    let file = GraphFile {
        nodes: g
            .nodes()
            .iter()
            .map(|n| NodeRecord {
                node_id: n.node_id,
                video_id: n.video_id.clone(),
                track_id: n.track_id.clone(),
                class_label: n.class_label.clone(),
                category: n.category,
                lifespan: n.lifespan,
            })
            .collect(),
        edges: g
            .edges()
            .iter()
            .map(|e| EdgeRecord {
                edge_id: e.edge_id,
                subject: e.subject,
                object: e.object,
                predicate: e.predicate,
                interval: e.interval,
                mean_overlap: e.mean_overlap,
            })
            .collect(),
        config: *g.config(),
    };
    let mut text = serde_json::to_string_pretty(&file).expect("graphs always serialize");
    text.push('\n');
    text
}

/// Parses a graph document and re-checks every graph invariant.
pub fn deserialize_graph(text: &str) -> Result<KnowledgeGraph, KgError> {
    let file: GraphFile =
        serde_json::from_str(text).map_err(|e| KgError::MalformedGraphFile(e.to_string()))?;
    let nodes = file
        .nodes
        .into_iter()
        .map(|n| EntityNode {
            node_id: n.node_id,
            video_id: n.video_id,
            track_id: n.track_id,
            class_label: n.class_label,
            category: n.category,
            lifespan: n.lifespan,
        })
        .collect();
    let edges = file
        .edges
        .into_iter()
        .map(|e| InteractionEdge {
            edge_id: e.edge_id,
            subject: e.subject,
            object: e.object,
            predicate: e.predicate,
            interval: e.interval,
            mean_overlap: e.mean_overlap,
        })
        .collect();
    KnowledgeGraph::from_parts(nodes, edges, file.config)
}
