use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qbayes::ansatz::{build_weight_state, complete_edges, lcu_weight_state, AnsatzParams};
use qbayes::config::{Method, RunConfig, SweepKind};
use qbayes::data::{generate, read_csv, write_csv, GeneratorSpec};
use qbayes::encoding::Label;
use qbayes::inference::{EncodedDataset, OverlapForm};
use qbayes::training::experiment::{prepare_data, qmap_predict_all, train_model};
use qbayes::training::qpde::{qpde_from_params, sample_params};
use qbayes::training::{qpde_predict_batch, run_experiment_sweep, QpdeConfig};

#[test]
fn csv_round_trip_preserves_dataset() {
    let (train, _) = generate(&GeneratorSpec { n_train_per_class: 25, ..GeneratorSpec::default() }).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("train.csv");
    write_csv(&train, &path).unwrap();
    let back = read_csv(&path).unwrap();
    assert_eq!(back.samples.len(), train.samples.len());
    for (a, b) in back.samples.iter().zip(&train.samples) {
        assert_eq!(a.label, b.label);
        for (x, y) in a.x.iter().zip(&b.x) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-10);
        }
    }
    // writing again reproduces the file byte for byte
    let again = dir.path().join("again.csv");
    write_csv(&back, &again).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn generator_is_seed_deterministic_and_balanced() {
    let spec = GeneratorSpec { seed: 9, ..GeneratorSpec::default() };
    let (a, ta) = generate(&spec).unwrap();
    let (b, _) = generate(&spec).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.count(Label::Plus), 400);
    assert_eq!(a.count(Label::Minus), 400);
    assert_eq!(ta.len(), 80);
    let (c, _) = generate(&GeneratorSpec { seed: 10, ..spec }).unwrap();
    assert_ne!(a, c);
}

#[test]
fn lcu_matches_direct_sum_for_several_branch_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n_hidden in 1..=5 {
        let params = AnsatzParams::<f64>::random(3, n_hidden, 4, complete_edges(3), 2.0 * PI, &mut rng).unwrap();
        let direct = build_weight_state(&params).unwrap();
        let lcu = lcu_weight_state(&params).unwrap();
        let f = direct.inner(&lcu.state).unwrap().norm();
        assert_abs_diff_eq!(f, 1.0, epsilon = 1e-10);
        assert!(lcu.success_probability > 0.0 && lcu.success_probability <= 1.0 + 1e-12);
    }
}

#[test]
fn qpde_batch_equals_explicit_samples() {
    let mut cfg = RunConfig::default();
    cfg.generator.n_train_per_class = 30;
    cfg.generator.n_test_per_class = 5;
    let (train, test) = prepare_data(&cfg).unwrap();
    let data = EncodedDataset::<f64>::new(&cfg.feature_map, &train.samples).unwrap();
    let q = QpdeConfig { n_samples: 12, ..QpdeConfig::default() };
    let edges = complete_edges(3);
    let batch = qpde_predict_batch(&data, &test.points(), &edges, &q, OverlapForm::Absolute).unwrap();
    let samples = sample_params::<f64>(&q, 3, &edges).unwrap();
    let explicit = qpde_from_params(&data, &test.points(), &samples, &q, OverlapForm::Absolute).unwrap();
    assert_eq!(batch, explicit);
    for p in &batch {
        assert_abs_diff_eq!(p.p0 + p.p1, 1.0, epsilon = 1e-12);
    }
}

#[test]
fn training_is_reproducible_and_thread_count_independent() {
    let mut cfg = RunConfig::default();
    cfg.generator.n_train_per_class = 40;
    cfg.generator.n_test_per_class = 10;
    cfg.spsa.iterations = 15;
    let (train, test) = prepare_data(&cfg).unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| train_model(&cfg, &train).unwrap());
    let b = many.install(|| train_model(&cfg, &train).unwrap());
    assert_eq!(a, b);
    assert_eq!(a.evaluations, 30);
    let pa = qmap_predict_all(&a, &test).unwrap();
    let pb = qmap_predict_all(&b, &test).unwrap();
    assert_eq!(pa, pb);
}

#[test]
fn sweep_emits_one_row_per_grid_value_and_repetition() {
    let mut cfg = RunConfig::default();
    cfg.generator.n_train_per_class = 20;
    cfg.generator.n_test_per_class = 5;
    cfg.qpde.n_samples = 4;
    let mut seen = 0;
    let table = run_experiment_sweep(SweepKind::Samples, Method::Qpde, &[2.0, 4.0], 3, &cfg, |_| {
        seen += 1;
        Ok(())
    })
    .unwrap();
    assert_eq!(table.rows.len(), 6);
    assert_eq!(table.summaries.len(), 2);
    assert_eq!(seen, 2);
    assert!(table.rows.iter().all(|r| (0.0..=1.0).contains(&r.accuracy)));
}
