use vissig::bench::{run_benchmark_with, BenchConfig, PLAIN_ACCURACY_BAND};

#[test]
fn common_offset_blinds_both_feature_sets() {
    let config = BenchConfig { offsets: vec![[2.0, 2.0]; 3], ..BenchConfig::new(42) };
    let r = run_benchmark_with(&config).unwrap();
    let (lo, hi) = PLAIN_ACCURACY_BAND;
    assert!((lo..=hi).contains(&r.accuracy_plain), "{r:?}");
    assert!((lo..=hi).contains(&r.accuracy_vis), "{r:?}");
    assert!((r.accuracy_plain - r.accuracy_vis).abs() <= 0.25, "{r:?}");
}

#[test]
fn visibility_never_loses_training_accuracy() {
    for seed in 0..10 {
        let r = run_benchmark_with(&BenchConfig::new(seed)).unwrap();
        assert!(r.train_accuracy_vis >= r.train_accuracy_plain, "seed {seed}: {r:?}");
    }
}

#[test]
fn reports_are_reproducible() {
    let a = run_benchmark_with(&BenchConfig::new(5)).unwrap();
    let b = run_benchmark_with(&BenchConfig::new(5)).unwrap();
    assert_eq!(a.to_json(false), b.to_json(false));
}
