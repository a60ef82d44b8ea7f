use std::path::Path;

use proptest::prelude::*;
use qrnn::check::{gradient_relative_error, FD_STEP};
use qrnn::data::{load_csv, make_windows};
use qrnn::oracle::{finite_diff, naive_amplitudes, naive_matvec, OracleOp};
use qrnn::qubit::{ry, rz};
use qrnn::training::{batch_loss_grad, Optimizer};
use qrnn::vqc::LinearMap;
use qrnn::{
    seeded_rng, train, CrnnModel, ModelConfig, QrnnModel, StateVector, TrainConfig, Trainable, WindowedDataset,
};
use rand::Rng as _;

fn fixture(ticker: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{ticker}.csv"))
}

fn small_config() -> ModelConfig {
    ModelConfig {
        ridgelet_units: 8,
        vqc_layers: 2,
        head_hidden: 4,
        ..ModelConfig::default()
    }
}

fn sine_dataset(n: usize, e: usize) -> WindowedDataset {
    let closes: Vec<f64> = (0..n).map(|i| 10.0 + (i as f64 * 0.2).sin()).collect();
    qrnn::data::windows_from_closes(&closes, e, 0.7).unwrap()
}

#[test]
fn bundled_fixtures_load_without_drops() {
    for t in ["AAPL", "SONY", "AMZN", "NVDA", "INTC", "GM"] {
        let loaded = load_csv(fixture(t)).unwrap();
        assert_eq!(loaded.series.len(), 2516, "{t}");
        assert_eq!(loaded.dropped_rows, 0, "{t}");
        assert_eq!(loaded.series.ticker, t);
        let data = make_windows(&loaded.series, 8, 0.7).unwrap();
        assert_eq!(data.len(), 2508);
        assert_eq!(data.split_index(), 1755);
        let (train_x, train_y) = data.train();
        for v in train_x.iter().flatten().chain(train_y) {
            assert!((0.0..=1.0).contains(v));
        }
    }
}

#[test]
fn encoded_state_matches_oracle_amplitudes() {
    let mut rng = seeded_rng(3);
    for _ in 0..200 {
        let theta = rng.random_range(-10.0..10.0);
        let phi = rng.random_range(-10.0..10.0);
        let s = StateVector::zero(1)
            .unwrap()
            .with_gate(&ry(theta).unwrap(), 0)
            .unwrap()
            .with_gate(&rz(phi).unwrap(), 0)
            .unwrap();
        let ops = [OracleOp::Ry { theta, target: 0 }, OracleOp::Rz { theta: phi, target: 0 }];
        let reference = naive_amplitudes(1, &ops).unwrap();
        for (a, b) in s.amplitudes().iter().zip(&reference) {
            assert!((a - b).norm() <= 1e-12);
        }
    }
}

#[test]
fn linear_map_matches_naive_matvec() {
    let mut rng = seeded_rng(4);
    for _ in 0..50 {
        let map = LinearMap::random(7, 3, &mut rng).unwrap();
        let x: Vec<f64> = (0..7).map(|_| rng.random_range(-1.0..1.0)).collect();
        let fast = map.apply(&x).unwrap();
        let naive = naive_matvec(map.weights(), map.bias(), &x);
        for (a, b) in fast.iter().zip(&naive) {
            assert!((a - b).abs() <= 1e-12);
        }
    }
}

fn fd_gradient_error<M: Trainable + Clone>(model: &M, xs: &[Vec<f64>], ys: &[f64]) -> f64 {
    let refs: Vec<&[f64]> = xs.iter().map(Vec::as_slice).collect();
    let (_, analytic) = batch_loss_grad(model, &refs, ys).unwrap();
    let f = |p: &[f64]| {
        let mut m = model.clone();
        m.set_params(p).unwrap();
        let preds = m.predict_all(xs).unwrap();
        preds.iter().zip(ys).map(|(p, y)| (p - y).powi(2)).sum::<f64>() / ys.len() as f64
    };
    gradient_relative_error(&analytic, &finite_diff(f, &model.params(), FD_STEP))
}

#[test]
fn crnn_gradient_matches_finite_differences() {
    let mut rng = seeded_rng(5);
    for seed in 0..10 {
        let model = CrnnModel::random(&ModelConfig::default(), 8, seed).unwrap();
        let xs: Vec<Vec<f64>> = (0..4).map(|_| (0..8).map(|_| rng.random_range(0.0..1.0)).collect()).collect();
        let ys: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..1.0)).collect();
        let err = fd_gradient_error(&model, &xs, &ys);
        assert!(err <= 1e-4, "seed {seed}: {err:e}");
    }
}

#[test]
fn multi_qubit_arctan_gradient_matches_finite_differences() {
    let config = ModelConfig {
        qubits: 3,
        vqc_layers: 2,
        encoder: qrnn::AngleEncoder::Arctan,
        mother: qrnn::MotherRidgelet::Sine,
        ..small_config()
    };
    let model = QrnnModel::random(&config, 5, 6).unwrap();
    let xs = vec![vec![0.1, 0.5, 0.9, 0.3, 0.7], vec![0.8, 0.2, 0.4, 0.6, 0.0]];
    let err = fd_gradient_error(&model, &xs, &[0.3, 0.6]);
    assert!(err <= 1e-4, "{err:e}");
}

#[test]
fn qrnn_and_crnn_share_the_ridgelet_layer() {
    let q = QrnnModel::random(&ModelConfig::default(), 8, 42).unwrap();
    let c = CrnnModel::random(&ModelConfig::default(), 8, 42).unwrap();
    assert_eq!(q.layer, c.layer);
}

#[test]
fn training_is_deterministic() {
    let data = sine_dataset(200, 6);
    let config = TrainConfig {
        epochs: 3,
        seed: 11,
        ..TrainConfig::default()
    };
    let run = || train(QrnnModel::random(&small_config(), 6, 11).unwrap(), &data, &config).unwrap();
    let (m1, h1) = run();
    let (m2, h2) = run();
    assert_eq!(h1.to_csv(), h2.to_csv());
    assert_eq!(m1, m2);
}

#[test]
fn zero_learning_rate_leaves_parameters_unchanged() {
    let data = sine_dataset(150, 5);
    for optimizer in [Optimizer::Adam, Optimizer::Sgd] {
        let config = TrainConfig {
            epochs: 2,
            learning_rate: 0.0,
            optimizer,
            ..TrainConfig::default()
        };
        let model = QrnnModel::random(&small_config(), 5, 1).unwrap();
        let (trained, history) = train(model.clone(), &data, &config).unwrap();
        assert_eq!(trained.params(), model.params());
        assert_eq!(history.records[0].train_rmse, history.records[1].train_rmse);
    }
}

#[test]
fn training_reduces_loss_on_a_sine() {
    let data = sine_dataset(400, 8);
    let config = TrainConfig {
        epochs: 30,
        learning_rate: 1e-2,
        ..TrainConfig::default()
    };
    let (_, history) = train(QrnnModel::random(&small_config(), 8, 2).unwrap(), &data, &config).unwrap();
    let first = history.records.first().unwrap().train_loss;
    let last = history.last().unwrap().train_loss;
    assert!(last < 0.5 * first, "{first} -> {last}");
}

#[test]
fn shots_only_change_evaluation_noise() {
    let mut model = QrnnModel::random(&small_config(), 4, 9).unwrap();
    let x = [0.2, 0.4, 0.6, 0.8];
    let exact = model.forward(&x).unwrap();
    model.shots = Some(100_000);
    let sampled = model.forward(&x).unwrap();
    assert_ne!(exact, sampled);
    assert!((exact - sampled).abs() < 0.05);
    assert_eq!(sampled, model.forward(&x).unwrap());
    assert!(model.predict_with_grad(&x).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hybrid_output_is_finite(seed in any::<u64>(), x in prop::collection::vec(-5.0f64..5.0, 8)) {
        let model = QrnnModel::random(&ModelConfig::default(), 8, seed).unwrap();
        prop_assert!(model.forward(&x).unwrap().is_finite());
    }

    #[test]
    fn quantum_outputs_are_bounded(seed in any::<u64>(), x in prop::collection::vec(0.0f64..1.0, 8)) {
        let config = ModelConfig { qubits: 2, ..ModelConfig::default() };
        let model = QrnnModel::random(&config, 8, seed).unwrap();
        let angles = model.encode_angles(&model.map_to_qubit_space(&model.features(&x).unwrap()).unwrap());
        for z in model.quantum_outputs(&angles).unwrap() {
            prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&z));
        }
    }
}
