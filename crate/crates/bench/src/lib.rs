//! Shared fixtures for the benchmarks.

use hopforge_core::ingest::{
    generate_random_script, generate_scene, GeometryConfig, RandomScriptParams,
};
use hopforge_core::kg::{build_graph, DetectionConfig, KnowledgeGraph};
use hopforge_core::Tubelet;

/// A simulated scene with `entities` tracks split evenly between
/// instruments and anatomy, each spanning `frames` frames.
pub fn scene(entities: usize, events: usize, frames: u32, seed: u64) -> Vec<Tubelet> {
    let params = RandomScriptParams::new(entities / 2, entities - entities / 2, events, frames);
    let script =
        generate_random_script(&params, seed).expect("benchmark scene parameters are feasible");
    generate_scene(&script, &GeometryConfig::default(), seed).expect("benchmark scene renders")
}

pub fn graph(entities: usize, events: usize, frames: u32, seed: u64) -> KnowledgeGraph {
    build_graph(
        &scene(entities, events, frames, seed),
        &DetectionConfig::default(),
    )
    .expect("simulated tubelets are valid")
}

#[cfg(test)]
mod tests {
    #[test]
    fn fixtures_have_requested_shape() {
        let tubes = super::scene(10, 20, 200, 1);
        assert_eq!(tubes.len(), 10);
        assert!(tubes.iter().all(|t| t.boxes.len() == 200));
        assert_eq!(super::graph(10, 20, 200, 1).nodes().len(), 10);
    }
}
