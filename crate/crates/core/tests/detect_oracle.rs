mod common;

use common::{naive_interactions, random_tubelet_pair, Expected};
use hopforge_core::kg::{detect_interactions, DetectionConfig, Predicate};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn detected(cfg: &DetectionConfig, seed: u64) -> (Vec<Expected>, Vec<Expected>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = random_tubelet_pair(&mut rng);
    let tracks = [&a, &b];
    let got = detect_interactions(&a, &b, 0, 1, cfg)
        .unwrap()
        .into_iter()
        .map(|i| Expected {
            subject: tracks[i.subject].track_id.clone(),
            object: tracks[i.object].track_id.clone(),
            predicate: i.predicate,
            start: i.interval.start,
            end: i.interval.end,
            mean_overlap: i.mean_overlap(),
        })
        .collect();
    (got, naive_interactions(&a, &b, cfg))
}

fn assert_same(got: &[Expected], want: &[Expected], seed: u64) {
    assert_eq!(got.len(), want.len(), "seed {seed}: {got:?} vs {want:?}");
    for (g, w) in got.iter().zip(want) {
        assert_eq!(
            (&g.subject, &g.object, g.predicate, g.start, g.end),
            (&w.subject, &w.object, w.predicate, w.start, w.end),
            "seed {seed}"
        );
        assert!(
            (g.mean_overlap - w.mean_overlap).abs() < 1e-12,
            "seed {seed}"
        );
    }
}

#[test]
fn matches_frame_labelling_oracle() {
    let cfg = DetectionConfig::default();
    let (mut touches, mut near) = (0, 0);
    for seed in 0..1000 {
        let (got, want) = detected(&cfg, seed);
        touches += want
            .iter()
            .filter(|e| e.predicate == Predicate::Touches)
            .count();
        near += want
            .iter()
            .filter(|e| e.predicate == Predicate::Near)
            .count();
        assert_same(&got, &want, seed);
    }
    assert!(
        touches > 100 && near > 100,
        "weak coverage: {touches} touches, {near} near"
    );
}

#[test]
fn matches_oracle_under_other_thresholds() {
    let configs = [
        DetectionConfig {
            tau_touch: 0.3,
            tau_near: 0.1,
            gap_tolerance: 0,
            min_duration: 1,
        },
        DetectionConfig {
            tau_touch: 0.05,
            tau_near: 0.35,
            gap_tolerance: 5,
            min_duration: 6,
        },
    ];
    for cfg in &configs {
        for seed in 0..200 {
            let (got, want) = detected(cfg, seed);
            assert_same(&got, &want, seed);
        }
    }
}
