use proptest::prelude::*;

use elashift::doe::{self, is_stratified};
use elashift::ela::{self, compute_disp, compute_pca, Dataset, FeatureValue, FeatureVector, NUM_FEATURES};
use elashift::embed::sample_embedding;
use elashift::report::heatmap_from_records;
use elashift::runner::ExperimentConfig;
use elashift::shift::{feature_shift, relative_shift, ShiftRecord, SHIFT_EPSILON};

fn dataset(s: usize, p: usize, seed: u64) -> Dataset {
    let x = doe::lhs(s, p, seed).unwrap().points;
    let y = (0..s)
        .map(|i| {
            x.row(i)
                .iter()
                .enumerate()
                .map(|(j, v)| (v - j as f64 * 0.3).powi(2))
                .sum::<f64>()
                + i as f64 * 1e-3
        })
        .collect();
    Dataset::new(x, y).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn lhs_is_stratified_and_inside_the_box(s in 2usize..60, d in 1usize..8, seed in any::<u64>()) {
        let design = doe::lhs(s, d, seed).unwrap();
        prop_assert!(is_stratified(&design.points));
        prop_assert!(design.points.iter().all(|v| *v > -5.0 && *v < 5.0));
    }

    #[test]
    fn shift_sign_symmetry(a in -1e6..1e6f64, b in -1e6..1e6f64) {
        let ab = relative_shift(a, b);
        let ba = relative_shift(b, a);
        let lhs = ab * (b.abs() + SHIFT_EPSILON);
        let rhs = -ba * (a.abs() + SHIFT_EPSILON);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (a - b).abs().max(1e-300));
    }

    #[test]
    fn y_only_features_survive_any_projection(s in 20usize..60, d in 1usize..4, seed in any::<u64>()) {
        let ds = dataset(s, 5, seed);
        let emb = sample_embedding(d, 5, seed ^ 1).unwrap();
        let z = Dataset::new(emb.project(ds.points()).unwrap(), ds.objectives().to_vec()).unwrap();
        let deltas = feature_shift(&ela::compute_all(&z, 3), &ela::compute_all(&ds, 3)).unwrap();
        for name in ["ela_distr.skewness", "ela_distr.kurtosis", "ela_distr.number_of_peaks",
                     "fitness_distance.fitness_mean", "fitness_distance.fitness_std"] {
            prop_assert_eq!(deltas[ela::feature_index(name).unwrap()], Some(0.0));
        }
    }

    #[test]
    fn disp_ratios_and_pca_correlations_ignore_isotropic_scaling(seed in any::<u64>(), c in 0.1..10.0f64) {
        let ds = dataset(45, 3, seed);
        let scaled = Dataset::new(ds.points() * c, ds.objectives().to_vec()).unwrap();
        let (a, b) = (compute_disp(&ds), compute_disp(&scaled));
        for name in ["ratio_mean_10", "ratio_median_25"] {
            prop_assert!((a.value(name) - b.value(name)).abs() <= 1e-9);
        }
        prop_assert!((b.value("diff_mean_25") - c * a.value("diff_mean_25")).abs() <= 1e-9 * c.max(1.0));
        let (p, q) = (compute_pca(&ds), compute_pca(&scaled));
        prop_assert!((p.value("expl_var_PC1.cor_x") - q.value("expl_var_PC1.cor_x")).abs() <= 1e-9);
    }

    #[test]
    fn projection_is_linear(seed in any::<u64>(), a in -3.0..3.0f64) {
        let emb = sample_embedding(3, 7, seed).unwrap();
        let x = doe::lhs(10, 7, seed).unwrap().points;
        let y = doe::lhs(10, 7, seed ^ 5).unwrap().points;
        let lhs = emb.project(&(&x * a + &y)).unwrap();
        let rhs = emb.project(&x).unwrap() * a + emb.project(&y).unwrap();
        prop_assert!((lhs - rhs).abs().max() <= 1e-10);
    }

    #[test]
    fn heatmap_ignores_record_order(deltas in proptest::collection::vec(proptest::option::of(-5.0..5.0f64), 1..120),
                                    seed in any::<u64>()) {
        let recs: Vec<ShiftRecord> = deltas.iter().enumerate().map(|(i, d)| ShiftRecord {
            function_id: 1 + (i % 3) as u32,
            instance_id: 0,
            design_id: (i / 3) as u32,
            sample_size: 200,
            reduced_dim: 10,
            embedding_id: 0,
            feature: i % NUM_FEATURES,
            reference_value: Some(1.0),
            projected_value: d.map(|d| 1.0 + d),
            delta: *d,
        }).collect();
        let mut shuffled = recs.clone();
        let mut rng = elashift::seed::rng(&[seed]);
        rand::seq::SliceRandom::shuffle(shuffled.as_mut_slice(), &mut rng);
        prop_assert_eq!(heatmap_from_records(&recs, 200, 10), heatmap_from_records(&shuffled, 200, 10));
    }

    #[test]
    fn config_text_round_trips(seed in any::<u64>(), dims in proptest::collection::btree_set(1usize..20, 1..4)) {
        let mut cfg = ExperimentConfig::desk("/runs/x");
        cfg.master_seed = seed;
        cfg.reduced_dims = dims.into_iter().collect();
        prop_assert_eq!(ExperimentConfig::parse(&cfg.to_string(), std::path::Path::new("/")).unwrap(), cfg);
    }
}

#[test]
fn full_subsample_reproduces_full_features() {
    let ds = dataset(60, 3, 4);
    // factor * d == S: the only subset is the whole sample
    let subs = elashift::shift::subsample_features(&ds, 20, 1, 77).unwrap();
    assert_eq!(subs.len(), 1);
    assert_eq!(subs[0], ela::compute_all(&ds, 77));
    assert!(elashift::shift::subsample_features(&ds, 21, 1, 77).is_err());
    let thirty = elashift::shift::subsample_features(&ds, 10, 30, 1).unwrap();
    assert_eq!(thirty.len(), 30);
}

#[test]
fn missing_entries_never_produce_shifts() {
    let mut e = vec![FeatureValue::ok(2.0); NUM_FEATURES];
    e[3] = FeatureValue::missing();
    let a = FeatureVector::from_entries(e).unwrap();
    let b = FeatureVector::from_entries(vec![FeatureValue::ok(3.0); NUM_FEATURES]).unwrap();
    let d = feature_shift(&b, &a).unwrap();
    assert_eq!(d[3], None);
    assert_eq!(d.iter().filter(|v| v.is_some()).count(), NUM_FEATURES - 1);
}
