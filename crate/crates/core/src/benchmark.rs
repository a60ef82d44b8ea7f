//! Error metrics, the classical ridgelet baseline and the comparison harness.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{load_csv, make_windows, WindowedDataset};
use crate::error::{check_len, Error, Result};
use crate::qrnn::random_output_weights;
use crate::ridgelet::RidgeletLayer;
use crate::seeded_rng;
use crate::training::{train, TrainConfig, Trainable};
use crate::vqc::{ModelConfig, PredictionHead, QrnnModel};

fn check_metric_input(preds: &[f64], targets: &[f64]) -> Result<()> {
    check_len("metric targets", preds.len(), targets.len())?;
    if preds.is_empty() {
        return Err(Error::invalid("metrics need at least one prediction"));
    }
    Ok(())
}

pub fn rmse(preds: &[f64], targets: &[f64]) -> Result<f64> {
    check_metric_input(preds, targets)?;
    let sum: f64 = preds.iter().zip(targets).map(|(p, t)| (p - t) * (p - t)).sum();
    Ok((sum / preds.len() as f64).sqrt())
}

pub fn mae(preds: &[f64], targets: &[f64]) -> Result<f64> {
    check_metric_input(preds, targets)?;
    let sum: f64 = preds.iter().zip(targets).map(|(p, t)| (p - t).abs()).sum();
    Ok(sum / preds.len() as f64)
}

/// Classical ridgelet network: `head(g_J(x))` with no quantum stage.
///
/// Flat parameter order: ridgelet layer, output weights `c`, head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrnnModel {
    pub layer: RidgeletLayer,
    pub weights: Vec<f64>,
    pub head: PredictionHead,
}

impl CrnnModel {
    pub fn new(layer: RidgeletLayer, weights: Vec<f64>, head: PredictionHead) -> Result<Self> {
        check_len("crnn weights", layer.num_units(), weights.len())?;
        check_len("crnn head input", 1, head.in_dim())?;
        Ok(CrnnModel { layer, weights, head })
    }

    /// Seeded random model; its ridgelet layer equals that of
    /// [`QrnnModel::random`] for the same config, input size and seed.
    pub fn random(config: &ModelConfig, input_dim: usize, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = seeded_rng(seed);
        let layer = RidgeletLayer::random(input_dim, config.ridgelet_units, config.mother, &mut rng)?;
        let weights = random_output_weights(config.ridgelet_units, &mut rng);
        let head = PredictionHead::random(1, config.head_hidden, &mut rng)?;
        Self::new(layer, weights, head)
    }

    pub fn expansion(&self, x: &[f64]) -> Result<f64> {
        self.layer.expansion(&self.weights, x)
    }

    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        self.head.forward(&[self.expansion(x)?])
    }
}

impl Trainable for CrnnModel {
    fn param_count(&self) -> usize {
        self.layer.param_count() + self.weights.len() + self.head.param_count()
    }

    fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        self.layer.write_params(&mut out);
        out.extend_from_slice(&self.weights);
        self.head.write_params(&mut out);
        out
    }

    fn set_params(&mut self, params: &[f64]) -> Result<()> {
        check_len("model parameters", self.param_count(), params.len())?;
        let mut k = self.layer.read_params(params);
        let n = self.weights.len();
        self.weights.copy_from_slice(&params[k..k + n]);
        k += n;
        self.head.read_params(&params[k..]);
        Ok(())
    }

    fn predict(&self, x: &[f64]) -> Result<f64> {
        self.forward(x)
    }

    fn predict_with_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (feats, unit_grads) = self.layer.features_with_grad(x)?;
        let g: f64 = self.weights.iter().zip(&feats).map(|(c, f)| c * f).sum();
        let pred = self.head.forward(&[g])?;

        let mut grad = vec![0.0; self.param_count()];
        let n_layer = self.layer.param_count();
        let (g_layer, rest) = grad.split_at_mut(n_layer);
        let (g_weights, g_head) = rest.split_at_mut(self.weights.len());
        let d_g = self.head.backward(&[g], 1.0, g_head)[0];
        for (gw, f) in g_weights.iter_mut().zip(&feats) {
            *gw += d_g * f;
        }
        let upstream: Vec<f64> = self.weights.iter().map(|c| d_g * c).collect();
        self.layer.accumulate_grad(&unit_grads, &upstream, g_layer);
        Ok((pred, grad))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Qrnn,
    Crnn,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Qrnn => "QRNN",
            ModelKind::Crnn => "CRNN",
        })
    }
}

/// Dataset settings: window length `e`, chronological split, fixture location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub window: usize,
    pub train_ratio: f64,
    pub fixture_dir: PathBuf,
    pub tickers: Vec<String>,
}

pub const DEFAULT_TICKERS: [&str; 6] = ["AAPL", "SONY", "AMZN", "NVDA", "INTC", "GM"];

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            window: 8,
            train_ratio: 0.7,
            fixture_dir: PathBuf::from("fixtures"),
            tickers: DEFAULT_TICKERS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl DataConfig {
    pub fn fixture_path(&self, ticker: &str) -> PathBuf {
        self.fixture_dir.join(format!("{ticker}.csv"))
    }

    pub fn load(&self, path: &Path) -> Result<WindowedDataset> {
        let loaded = load_csv(path)?;
        make_windows(&loaded.series, self.window, self.train_ratio)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSettings {
    pub data: DataConfig,
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub models: Vec<ModelKind>,
}

impl Default for BenchSettings {
    fn default() -> Self {
        BenchSettings {
            data: DataConfig::default(),
            model: ModelConfig::default(),
            train: TrainConfig::default(),
            models: vec![ModelKind::Qrnn, ModelKind::Crnn],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub train_rmse: f64,
    pub train_mae: f64,
    pub test_rmse: f64,
    pub test_mae: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub model: String,
    pub ticker: String,
    pub metrics: Metrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchFailure {
    pub ticker: String,
    pub message: String,
}

/// Normalized actual and predicted test targets for one (ticker, model) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionTrace {
    pub ticker: String,
    pub model: String,
    pub actual: Vec<f64>,
    pub predicted: Vec<f64>,
}

impl PredictionTrace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,actual,predicted\n");
        for (i, (a, p)) in self.actual.iter().zip(&self.predicted).enumerate() {
            let _ = writeln!(out, "{i},{a},{p}");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub seed: u64,
    pub settings: BenchSettings,
    pub rows: Vec<BenchRow>,
    pub failures: Vec<BenchFailure>,
    pub traces: Vec<PredictionTrace>,
}

impl BenchReport {
    pub const HEADER: &'static str = "model,ticker,train_rmse,train_mae,test_rmse,test_mae";

    pub fn row(&self, model: ModelKind, ticker: &str) -> Option<&BenchRow> {
        let name = model.to_string();
        self.rows.iter().find(|r| r.model == name && r.ticker == ticker)
    }

    /// Per-model average over tickers, labelled with ticker `MEAN`.
    pub fn mean_rows(&self) -> Vec<BenchRow> {
        let mut out = Vec::new();
        for kind in &self.settings.models {
            let name = kind.to_string();
            let rows: Vec<&BenchRow> = self.rows.iter().filter(|r| r.model == name).collect();
            if rows.is_empty() {
                continue;
            }
            let n = rows.len() as f64;
            let avg = |f: fn(&Metrics) -> f64| rows.iter().map(|r| f(&r.metrics)).sum::<f64>() / n;
            out.push(BenchRow {
                model: name,
                ticker: "MEAN".into(),
                metrics: Metrics {
                    train_rmse: avg(|m| m.train_rmse),
                    train_mae: avg(|m| m.train_mae),
                    test_rmse: avg(|m| m.test_rmse),
                    test_mae: avg(|m| m.test_mae),
                },
            });
        }
        out
    }

    /// Metrics table: one row per (model, ticker) followed by the `MEAN` rows.
    pub fn metrics_csv(&self) -> String {
        let mut out = String::from(Self::HEADER);
        out.push('\n');
        for r in self.rows.iter().chain(&self.mean_rows()) {
            let m = &r.metrics;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.model, r.ticker, m.train_rmse, m.train_mae, m.test_rmse, m.test_mae
            );
        }
        out
    }

    pub fn failures_csv(&self) -> String {
        let mut out = String::from("ticker,error\n");
        for f in &self.failures {
            let _ = writeln!(out, "{},\"{}\"", f.ticker, f.message.replace('"', "'"));
        }
        out
    }

    /// Writes `metrics.csv`, `failures.csv` (when any ticker failed) and
    /// `trace_<TICKER>_<MODEL>.csv` for every cell into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("metrics.csv"), self.metrics_csv())?;
        if !self.failures.is_empty() {
            std::fs::write(dir.join("failures.csv"), self.failures_csv())?;
        }
        for t in &self.traces {
            let name = format!("trace_{}_{}.csv", t.ticker, t.model);
            std::fs::write(dir.join(name), t.to_csv())?;
        }
        Ok(())
    }
}

pub fn evaluate<M: Trainable>(model: &M, data: &WindowedDataset) -> Result<(Metrics, Vec<f64>)> {
    let (train_x, train_y) = data.train();
    let (test_x, test_y) = data.test();
    let train_pred = model.predict_all(train_x)?;
    let test_pred = model.predict_all(test_x)?;
    let metrics = Metrics {
        train_rmse: rmse(&train_pred, train_y)?,
        train_mae: mae(&train_pred, train_y)?,
        test_rmse: rmse(&test_pred, test_y)?,
        test_mae: mae(&test_pred, test_y)?,
    };
    Ok((metrics, test_pred))
}

fn run_cell(kind: ModelKind, data: &WindowedDataset, settings: &BenchSettings) -> Result<(Metrics, Vec<f64>)> {
    let seed = settings.train.seed;
    let e = data.window_len();
    match kind {
        ModelKind::Qrnn => {
            let mut model = QrnnModel::random(&settings.model, e, seed)?;
            // training needs exact expectations; shots only affect evaluation
            let shots = model.shots.take();
            let (mut trained, _) = train(model, data, &settings.train)?;
            trained.shots = shots;
            evaluate(&trained, data)
        }
        ModelKind::Crnn => {
            let model = CrnnModel::random(&settings.model, e, seed)?;
            let (trained, _) = train(model, data, &settings.train)?;
            evaluate(&trained, data)
        }
    }
}

fn run_ticker(ticker: &str, settings: &BenchSettings) -> Result<Vec<(BenchRow, PredictionTrace)>> {
    let data = settings.data.load(&settings.data.fixture_path(ticker))?;
    let (_, actual) = data.test();
    settings
        .models
        .iter()
        .map(|&kind| {
            let (metrics, predicted) = run_cell(kind, &data, settings)?;
            let row = BenchRow {
                model: kind.to_string(),
                ticker: ticker.to_string(),
                metrics,
            };
            let trace = PredictionTrace {
                ticker: ticker.to_string(),
                model: kind.to_string(),
                actual: actual.to_vec(),
                predicted,
            };
            Ok((row, trace))
        })
        .collect()
}

/// Trains and evaluates every configured model on every ticker. Tickers run
/// in parallel; a failing ticker becomes a [`BenchFailure`] entry.
pub fn run_benchmark(settings: &BenchSettings) -> Result<BenchReport> {
    settings.model.validate()?;
    settings.train.validate()?;
    let results: Vec<_> = settings
        .data
        .tickers
        .par_iter()
        .map(|t| (t.clone(), run_ticker(t, settings)))
        .collect();
    let mut report = BenchReport {
        seed: settings.train.seed,
        settings: settings.clone(),
        rows: Vec::new(),
        failures: Vec::new(),
        traces: Vec::new(),
    };
    for (ticker, result) in results {
        match result {
            Ok(cells) => {
                for (row, trace) in cells {
                    report.rows.push(row);
                    report.traces.push(trace);
                }
            }
            Err(e) => report.failures.push(BenchFailure {
                ticker,
                message: e.to_string(),
            }),
        }
    }
    Ok(report)
}
