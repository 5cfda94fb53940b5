mod common;

use common::{corrupt, ALL_KINDS};
use hopforge_core::ingest::{
    generate_random_script, generate_scene, GeometryConfig, RandomScriptParams,
};
use hopforge_core::kg::{build_graph, DetectionConfig, KnowledgeGraph};
use hopforge_core::synth::{
    builtin_templates, synthesize_dataset, QaSample, SynthesisOptions, SynthesisPlan,
};
use hopforge_core::validate::*;

fn dataset(seed: u64, minimal: bool) -> (KnowledgeGraph, Vec<QaSample>) {
    let script = generate_random_script(&RandomScriptParams::new(3, 3, 10, 500), seed).unwrap();
    let tubes = generate_scene(&script, &GeometryConfig::default(), seed).unwrap();
    let g = build_graph(&tubes, &DetectionConfig::default()).unwrap();
    let options = SynthesisOptions {
        master_seed: seed,
        enforce_minimality: minimal,
        max_attempts: 400,
    };
    let plan = SynthesisPlan::new([(1, 20), (2, 20), (3, 10)]);
    let out = synthesize_dataset(&g, &plan, &builtin_templates(), &options).unwrap();
    (g, out.samples)
}

#[test]
fn each_corruption_is_flagged_with_its_kind() {
    let (g, samples) = dataset(2, true);
    for s in &samples {
        assert!(check_sample(&g, s).is_empty());
    }
    for kind in ALL_KINDS {
        for s in samples.iter().take(25) {
            let bad = corrupt(s, kind, g.edges().len());
            let found = check_sample(&g, &bad);
            assert_eq!(found.len(), 1, "{kind:?}: {found:?}");
            assert_eq!(found[0].kind, kind);
            assert_eq!(found[0].sample_id, s.sample_id);
        }
    }
}

#[test]
fn replacing_an_edge_with_another_real_edge_is_missing_evidence() {
    let (g, samples) = dataset(3, true);
    let s = &samples[0];
    let mut bad = s.clone();
    bad.evidence.edge_ids[0] = (s.evidence.edge_ids[0] + 1) % g.edges().len();
    let kinds: Vec<_> = check_sample(&g, &bad).into_iter().map(|v| v.kind).collect();
    assert_eq!(kinds, vec![ViolationKind::MissingEvidence]);
}

#[test]
fn minimal_dataset_is_strictly_diagonal() {
    let (g, mut samples) = dataset(6, true);
    for s in &mut samples {
        s.verified_depth = None;
    }
    let report = validate_dataset(&g, &mut samples, DEFAULT_MAX_DEPTH);
    assert!(report.violations.is_empty());
    assert_eq!(report.diagonal_dominance, Some(1.0));
    assert_eq!(report.total, samples.len() as u64);
    for (d, row) in report.matrix.iter().enumerate() {
        for (v, &c) in row.iter().enumerate() {
            if d != v {
                assert_eq!(c, 0);
            }
        }
    }
    assert!(samples
        .iter()
        .all(|s| s.verified_depth == Some(s.designed_depth)));
}

#[test]
fn unconstrained_dataset_has_no_upper_triangle() {
    let (g, mut samples) = dataset(8, false);
    let report = validate_dataset(&g, &mut samples, DEFAULT_MAX_DEPTH);
    assert!(report.violations.is_empty());
    let m = alignment_matrix(&samples, DEFAULT_MAX_DEPTH).unwrap();
    assert_eq!(m.counts, report.matrix);
    for (d, row) in m.counts.iter().enumerate() {
        assert!(row[d + 1..].iter().all(|&c| c == 0));
    }
    assert_eq!(m.counts.iter().flatten().sum::<u64>(), m.total);
    let dominance = diagonal_dominance(&m).unwrap();
    assert!((0.0..=1.0).contains(&dominance));
}

#[test]
fn wrong_stored_verified_depth_is_reported() {
    let (g, mut samples) = dataset(6, true);
    let victim = samples.iter().position(|s| s.designed_depth >= 2).unwrap();
    samples[victim].verified_depth = Some(1);
    let report = validate_dataset(&g, &mut samples, DEFAULT_MAX_DEPTH);
    assert_eq!(report.violations.len(), 1);
    assert_eq!(report.violations[0].kind, ViolationKind::DepthBookkeeping);
}

#[test]
fn samples_checked_against_another_graph_are_flagged() {
    let (_, mut samples) = dataset(2, true);
    let (other, _) = dataset(11, true);
    let report = validate_dataset(&other, &mut samples, DEFAULT_MAX_DEPTH);
    assert!(report
        .violations
        .iter()
        .any(|v| v.kind == ViolationKind::MissingEvidence));
}

#[test]
fn stale_sample_cannot_be_verified() {
    let (g, samples) = dataset(2, true);
    let bad = corrupt(&samples[0], ViolationKind::AnswerMismatch, g.edges().len());
    assert_eq!(
        verify_depth(&g, &bad),
        Err(ValidateError::StaleSample(bad.sample_id))
    );
}

#[test]
fn verification_is_independent_of_thread_count() {
    let (g, samples) = dataset(9, false);
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        let mut copy = samples.clone();
        pool.install(|| validate_dataset(&g, &mut copy, DEFAULT_MAX_DEPTH))
    };
    assert_eq!(run(1), run(8));
}
