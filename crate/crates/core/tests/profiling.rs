use hopforge_core::ingest::{
    generate_random_script, generate_scene, GeometryConfig, RandomScriptParams,
};
use hopforge_core::kg::{build_graph, DetectionConfig};
use hopforge_core::profile::*;
use hopforge_core::synth::{
    builtin_templates, synthesize_dataset, QaSample, SynthesisOptions, SynthesisPlan,
};
use hopforge_core::TimeInterval;
use proptest::prelude::*;
use std::sync::OnceLock;

fn frames(iv: &TimeInterval) -> std::collections::BTreeSet<u32> {
    (iv.start..=iv.end).collect()
}

#[test]
fn tiou_matches_frame_counting() {
    let all: Vec<_> = (0..=8u32)
        .flat_map(|s| (s..=8).map(move |e| TimeInterval::new(s, e).unwrap()))
        .collect();
    for a in &all {
        for b in &all {
            let (fa, fb) = (frames(a), frames(b));
            let want = fa.intersection(&fb).count() as f64 / fa.union(&fb).count() as f64;
            assert_eq!(temporal_iou(a, b), want);
            assert_eq!(temporal_iou(a, b), temporal_iou(b, a));
            assert_eq!(temporal_iou(a, b) == 1.0, a == b);
            assert_eq!(temporal_iou(a, b) == 0.0, !a.intersects(b));
        }
    }
}

fn synthesized(seed: u64) -> Vec<QaSample> {
    let script = generate_random_script(&RandomScriptParams::new(3, 3, 10, 500), seed).unwrap();
    let tubes = generate_scene(&script, &GeometryConfig::default(), seed).unwrap();
    let g = build_graph(&tubes, &DetectionConfig::default()).unwrap();
    let plan = SynthesisPlan::new([(1, 10), (2, 10), (3, 5)]);
    let options = SynthesisOptions {
        master_seed: seed,
        enforce_minimality: false,
        max_attempts: 400,
    };
    synthesize_dataset(&g, &plan, &builtin_templates(), &options)
        .unwrap()
        .samples
}

#[test]
fn count_families_sum_to_size() {
    for seed in 0..50 {
        let samples = synthesized(seed);
        let stats = profile_dataset(&samples).unwrap();
        let n = samples.len();
        assert_eq!(stats.total, n);
        assert_eq!(stats.per_depth.values().sum::<usize>(), n);
        assert_eq!(stats.per_template.values().sum::<usize>(), n);
        assert_eq!(stats.per_predicate.values().sum::<usize>(), n);
        assert_eq!(stats.per_answer_kind.values().sum::<usize>(), n);
        let span = stats.span_length.clone().unwrap();
        assert!(span.min as f64 <= span.median && span.median <= span.max as f64);
        assert!(span.min as f64 <= span.mean && span.mean <= span.max as f64);
        assert_eq!(profile_dataset(&samples).unwrap(), stats);
    }
}

#[test]
fn echoed_and_disjoint_predictions() {
    let samples = synthesized(1);
    let echo: Vec<_> = samples
        .iter()
        .map(|s| Prediction {
            sample_id: s.sample_id,
            span: s.evidence.span.unwrap(),
        })
        .collect();
    let m = evaluate_predictions(&samples, &echo, &DEFAULT_TIOU_THRESHOLDS).unwrap();
    assert_eq!(m.mean_tiou, 1.0);
    assert_eq!(m.n_scored, samples.len());
    assert!(m.recall_at_1.iter().all(|r| r.recall == 1.0));

    let far: Vec<_> = samples
        .iter()
        .map(|s| Prediction {
            sample_id: s.sample_id,
            span: TimeInterval::new(100_000, 100_010).unwrap(),
        })
        .collect();
    let m = evaluate_predictions(&samples, &far, &DEFAULT_TIOU_THRESHOLDS).unwrap();
    assert_eq!(m.mean_tiou, 0.0);
    assert!(m.recall_at_1.iter().all(|r| r.recall == 0.0));
}

proptest! {
    #[test]
    fn recall_is_monotone_in_threshold(
        spans in prop::collection::vec((0u32..50, 0u32..20, 0u32..50, 0u32..20, any::<bool>()), 1..40)
    ) {
        static TEMPLATE: OnceLock<QaSample> = OnceLock::new();
        let template = TEMPLATE.get_or_init(|| synthesized(1).swap_remove(0));
        let mut samples = Vec::new();
        let mut predictions = Vec::new();
        for (i, &(gs, gl, ps, pl, predicted)) in spans.iter().enumerate() {
            let mut s = template.clone();
            s.sample_id = i as u64;
            s.evidence.span = TimeInterval::new(gs, gs + gl);
            samples.push(s);
            if predicted {
                predictions.push(Prediction { sample_id: i as u64, span: TimeInterval::new(ps, ps + pl).unwrap() });
            }
        }
        let m = evaluate_predictions(&samples, &predictions, &DEFAULT_TIOU_THRESHOLDS).unwrap();
        let r: Vec<f64> = m.recall_at_1.iter().map(|r| r.recall).collect();
        prop_assert!(r[0] >= r[1] && r[1] >= r[2]);
        prop_assert!((0.0..=1.0).contains(&m.mean_tiou));
        prop_assert_eq!(m.n_scored, samples.len());
    }
}
