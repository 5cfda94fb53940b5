mod common;

use common::{allen_by_points, allen_holds};
use hopforge_core::interval::allen_relation;
use hopforge_core::{AllenRelation, TimeInterval};
use proptest::prelude::*;

fn intervals(max: u32) -> Vec<TimeInterval> {
    (0..=max)
        .flat_map(|s| (s..=max).map(move |e| TimeInterval::new(s, e).unwrap()))
        .collect()
}

#[test]
fn exhaustive_partition_on_small_endpoints() {
    let all = intervals(6);
    assert_eq!(all.len(), 28);
    for a in &all {
        for b in &all {
            let holding: Vec<_> = AllenRelation::ALL
                .into_iter()
                .filter(|&r| allen_holds(r, a.start, a.end, b.start, b.end))
                .collect();
            assert_eq!(holding.len(), 1, "{a:?} {b:?} -> {holding:?}");
            let got = allen_relation(a, b);
            assert_eq!(got, holding[0], "{a:?} {b:?}");
            assert_eq!(got, allen_by_points(a.start, a.end, b.start, b.end));
            assert_eq!(got, allen_relation(b, a).inverse());
        }
    }
}

#[test]
fn every_relation_is_reachable() {
    let all = intervals(6);
    for r in AllenRelation::ALL {
        assert!(
            all.iter()
                .any(|a| all.iter().any(|b| allen_relation(a, b) == r)),
            "{r:?} never produced"
        );
    }
}

#[test]
fn meets_is_adjacency() {
    let a = TimeInterval::new(10, 20).unwrap();
    let b = TimeInterval::new(21, 30).unwrap();
    assert_eq!(allen_relation(&a, &b), AllenRelation::Meets);
    let c = TimeInterval::new(22, 30).unwrap();
    assert_eq!(allen_relation(&a, &c), AllenRelation::Before);
    let d = TimeInterval::new(20, 30).unwrap();
    assert_eq!(allen_relation(&a, &d), AllenRelation::Overlaps);
}

fn interval() -> impl Strategy<Value = TimeInterval> {
    (any::<u32>(), any::<u32>()).prop_map(|(x, y)| TimeInterval::new(x.min(y), x.max(y)).unwrap())
}

proptest! {
    #[test]
    fn converse_over_full_range(a in interval(), b in interval()) {
        prop_assert_eq!(allen_relation(&a, &b), allen_relation(&b, &a).inverse());
        prop_assert_eq!(allen_relation(&a, &b), allen_by_points(a.start, a.end, b.start, b.end));
    }
}
