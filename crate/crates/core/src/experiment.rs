//! Library side of the `qrnn` command-line tool. Every subcommand is a thin
//! wrapper around one function here, so the binary and the library produce
//! identical files.

use std::fmt::Write as _;
use std::path::Path;

use crate::benchmark::{evaluate, run_benchmark, BenchReport, Metrics};
use crate::checkpoint::Checkpoint;
use crate::config::RunConfig;
use crate::error::Result;
use crate::training::{train, TrainHistory};
use crate::vqc::QrnnModel;

pub const CHECKPOINT_FILE: &str = "model.json";
pub const HISTORY_FILE: &str = "history.csv";
pub const METRICS_FILE: &str = "metrics.csv";

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub checkpoint: Checkpoint,
    pub history: TrainHistory,
    pub metrics: Metrics,
}

pub fn metrics_csv(metrics: &Metrics) -> String {
    let mut out = String::from("train_rmse,train_mae,test_rmse,test_mae\n");
    let _ = writeln!(
        out,
        "{},{},{},{}",
        metrics.train_rmse, metrics.train_mae, metrics.test_rmse, metrics.test_mae
    );
    out
}

/// Trains the hybrid model on one price file. Shots, if configured, are
/// only used when scoring the trained model.
pub fn train_on_file(config: &RunConfig, data_path: &Path) -> Result<TrainOutcome> {
    config.validate()?;
    let data = config.data.load(data_path)?;
    let mut model = QrnnModel::random(&config.model, data.window_len(), config.train.seed)?;
    let shots = model.shots.take();
    let (mut trained, history) = train(model, &data, &config.train)?;
    trained.shots = shots;
    let (metrics, _) = evaluate(&trained, &data)?;
    Ok(TrainOutcome {
        checkpoint: Checkpoint::new(trained, data.scaler()),
        history,
        metrics,
    })
}

/// [`train_on_file`] followed by writing `model.json`, `history.csv` and
/// `metrics.csv` into `out_dir`.
pub fn run_train(config: &RunConfig, data_path: &Path, out_dir: &Path) -> Result<TrainOutcome> {
    let outcome = train_on_file(config, data_path)?;
    std::fs::create_dir_all(out_dir)?;
    outcome.checkpoint.save(&out_dir.join(CHECKPOINT_FILE))?;
    outcome.history.write_csv(&out_dir.join(HISTORY_FILE))?;
    std::fs::write(out_dir.join(METRICS_FILE), metrics_csv(&outcome.metrics))?;
    Ok(outcome)
}

pub fn run_bench(config: &RunConfig, out_dir: &Path) -> Result<BenchReport> {
    config.validate()?;
    let report = run_benchmark(&config.bench_settings())?;
    report.write(out_dir)?;
    Ok(report)
}

/// Scores a saved model on a price file, windowed and split as configured.
/// The window length comes from the checkpoint.
pub fn run_eval(config: &RunConfig, checkpoint_path: &Path, data_path: &Path) -> Result<Metrics> {
    let ckpt = Checkpoint::load(checkpoint_path)?;
    let mut data_config = config.data.clone();
    data_config.window = ckpt.window;
    let data = data_config.load(data_path)?;
    Ok(evaluate(&ckpt.model, &data)?.0)
}

#[cfg(test)]
mod tests {
    use std::path::PathBuf;

    use super::*;

    fn fixture(name: &str) -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
    }

    fn quick_config() -> RunConfig {
        let mut c = RunConfig::default();
        c.train.epochs = 1;
        c.model.ridgelet_units = 4;
        c.model.vqc_layers = 1;
        c.model.head_hidden = 4;
        c
    }

    #[test]
    fn train_then_eval_agree() {
        let dir = tempfile::tempdir().unwrap();
        let config = quick_config();
        let outcome = run_train(&config, &fixture("INTC.csv"), dir.path()).unwrap();
        assert_eq!(outcome.history.records.len(), 1);
        for f in [CHECKPOINT_FILE, HISTORY_FILE, METRICS_FILE] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
        let metrics = run_eval(&config, &dir.path().join(CHECKPOINT_FILE), &fixture("INTC.csv")).unwrap();
        assert_eq!(metrics, outcome.metrics);
    }

    #[test]
    fn missing_data_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let err = run_train(&quick_config(), Path::new("/no/such/file.csv"), dir.path()).unwrap_err();
        assert_eq!(err.class(), crate::ErrorClass::Data);
        assert!(err.to_string().contains("/no/such/file.csv"));
    }
}
