//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::path::Path;
use std::time::Instant;

use qrnn::benchmark::{run_benchmark, BenchSettings, ModelKind};
use qrnn::check::{
    closed_form_identity, param_shift_vs_analytic, permutation_invariance, pipeline_gradients, probability_identity,
    rotation_additivity, shot_convergence, GATE_TOL, GRADIENT_REL_TOL, IDENTITY_TOL,
};
use qrnn::config::RunConfig;
use qrnn::experiment::{run_train, HISTORY_FILE};
use qrnn::qubit::ry;
use qrnn::{rmse, seeded_rng, train, MinMaxScaler, ModelConfig, MotherRidgelet, QrnnModel, QrnnSingleQubit, Trainable};
use qrnn::{TrainConfig, WindowedDataset};
use rand::Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn fixtures() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures"))
}

fn closed_form() -> Outcome {
    let start = Instant::now();
    let r = closed_form_identity(&ry, 1000, 101);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        r.passed && r.max_deviation <= 1e-10 && secs < 5.0,
        format!("{} (tol {:e}), {:.2} s (limit 5 s)", dev(r.max_deviation, r.samples), IDENTITY_TOL, secs),
    )
}

fn additivity() -> Outcome {
    let a = rotation_additivity(&ry, 1000, 102);
    let p = permutation_invariance(&ry, 1000, 103);
    outcome(
        a.passed && p.passed && a.max_deviation <= 1e-12 && p.max_deviation <= 1e-10,
        format!(
            "additivity {} (tol {:e}); J=8 permutation {} (tol 1e-10)",
            dev(a.max_deviation, a.samples),
            GATE_TOL,
            dev(p.max_deviation, p.samples)
        ),
    )
}

fn probability() -> Outcome {
    let r = probability_identity(&ry, 100, 104);
    outcome(
        r.passed && r.max_deviation <= 1e-10,
        format!("{} (tol 1e-10)", dev(r.max_deviation, r.samples)),
    )
}

fn gradients() -> Outcome {
    let g = pipeline_gradients(50, 105);
    let a = param_shift_vs_analytic(200, 106);
    outcome(
        g.passed && a.passed && g.max_deviation <= 1e-4 && a.max_deviation <= 1e-10,
        format!(
            "finite differences: max relative error {:.3e} over {} models (tol {:e}); pure R_y analytic {} (tol 1e-10)",
            g.max_deviation,
            g.samples,
            GRADIENT_REL_TOL,
            dev(a.max_deviation, a.samples)
        ),
    )
}

/// Targets come from a random single-qubit teacher on windows drawn
/// uniformly from the unit cube, the range of min-max scaled prices. The
/// teacher's output weights are drawn from [-2, 2] so the targets span a
/// good part of [-1, 1]; the test RMSE of always predicting the training
/// mean is reported next to the student's.
fn teacher_student() -> Outcome {
    let start = Instant::now();
    let mut rng = seeded_rng(2024);
    let mut teacher = QrnnSingleQubit::random(8, 4, MotherRidgelet::GaussianDerivative, &mut rng).unwrap();
    for c in teacher.weights_mut() {
        *c = rng.random_range(-2.0..2.0);
    }
    let inputs: Vec<Vec<f64>> = (0..1000)
        .map(|_| (0..8).map(|_| rng.random_range(0.0..1.0)).collect())
        .collect();
    let targets: Vec<f64> = inputs.iter().map(|x| teacher.forward(x).unwrap()).collect();
    let data = WindowedDataset::from_parts(inputs, targets, 700, MinMaxScaler::new(0.0, 1.0).unwrap()).unwrap();

    let config = TrainConfig::default();
    let student = QrnnModel::random(&ModelConfig::default(), 8, config.seed).unwrap();
    let (trained, _) = train(student, &data, &config).unwrap();
    let (test_x, test_y) = data.test();
    let test_rmse = rmse(&trained.predict_all(test_x).unwrap(), test_y).unwrap();
    let (_, train_y) = data.train();
    let mean = train_y.iter().sum::<f64>() / train_y.len() as f64;
    let baseline = rmse(&vec![mean; test_y.len()], test_y).unwrap();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        test_rmse <= 0.05 && secs < 60.0,
        format!("test RMSE {test_rmse:.4} (limit 0.05; constant-mean predictor {baseline:.4}), {secs:.1} s (limit 60 s)"),
    )
}

fn benchmark_direction() -> Outcome {
    let start = Instant::now();
    let mut settings = BenchSettings::default();
    settings.data.fixture_dir = fixtures().to_path_buf();
    settings.train.seed = 42;
    let report = run_benchmark(&settings).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let mut wins = 0;
    let mut in_band = true;
    let mut cells = Vec::new();
    for t in &settings.data.tickers {
        let (Some(q), Some(c)) = (report.row(ModelKind::Qrnn, t), report.row(ModelKind::Crnn, t)) else {
            in_band = false;
            cells.push(format!("{t}: missing"));
            continue;
        };
        let (q, c) = (q.metrics.test_rmse, c.metrics.test_rmse);
        if q < c {
            wins += 1;
        }
        if !(0.005..=0.5).contains(&q) {
            in_band = false;
        }
        cells.push(format!("{t} {q:.4}/{c:.4}"));
    }
    outcome(
        wins >= 4 && in_band && report.failures.is_empty() && secs < 600.0,
        format!(
            "QRNN beats CRNN on {wins}/6 (need 4); QRNN RMSE in [0.005, 0.5]: {in_band}; QRNN/CRNN test RMSE: {}; {secs:.1} s",
            cells.join(", ")
        ),
    )
}

fn shots() -> Outcome {
    let r = shot_convergence(100, 10_000, 107);
    outcome(
        r.passed && r.max_deviation <= 0.05,
        format!("{} (bound 5/sqrt(1e4) = 0.05)", dev(r.max_deviation, r.samples)),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig::default();
    let data = fixtures().join("AAPL.csv");
    let mut bytes = Vec::new();
    for run in ["first", "second"] {
        let out = dir.path().join(run);
        run_train(&config, &data, &out).unwrap();
        bytes.push(std::fs::read(out.join(HISTORY_FILE)).unwrap());
    }
    let lines = String::from_utf8_lossy(&bytes[0]).lines().count();
    outcome(
        bytes[0] == bytes[1] && lines == config.train.epochs + 1,
        format!("history files identical: {} ({} bytes, {lines} lines)", bytes[0] == bytes[1], bytes[0].len()),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn dev(max: f64, samples: usize) -> String {
    format!("max deviation {max:.3e} over {samples} samples")
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("closed-form identity", closed_form),
        ("rotation additivity", additivity),
        ("probability identity", probability),
        ("gradient correctness", gradients),
        ("teacher-student learnability", teacher_student),
        ("benchmark direction", benchmark_direction),
        ("shot-sampling convergence", shots),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.passed {
            failures += 1;
        }
        println!("[{}] {}. {name}: {}", if o.passed { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
