//! Price-series ingestion, scaling and sliding windows.

use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    pub ticker: String,
    pub dates: Vec<NaiveDate>,
    pub closes: Vec<f64>,
}

impl PriceSeries {
    pub fn len(&self) -> usize {
        self.closes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closes.is_empty()
    }
}

/// A parsed file plus the number of rows skipped for a missing, non-numeric
/// or non-positive close (or an unparseable date).
#[derive(Debug, Clone, PartialEq)]
pub struct CsvLoad {
    pub series: PriceSeries,
    pub dropped_rows: usize,
}

/// Reads a comma-separated file with at least `Date` and `Close` columns
/// (Yahoo Finance export layout). The ticker is taken from the file stem.
pub fn load_csv(path: impl AsRef<Path>) -> Result<CsvLoad> {
    let path = path.as_ref();
    if !path.is_file() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers = reader.headers()?.clone();
    let column = |name: &'static str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn {
                path: path.to_path_buf(),
                column: name,
            })
    };
    let date_col = column("Date")?;
    let close_col = column("Close")?;

    let mut rows = Vec::new();
    let mut dropped = 0;
    for record in reader.records() {
        let record = record?;
        let date = record
            .get(date_col)
            .and_then(|s| NaiveDate::parse_from_str(s, "%Y-%m-%d").ok());
        let close = record
            .get(close_col)
            .and_then(|s| s.parse::<f64>().ok())
            .filter(|c| c.is_finite() && *c > 0.0);
        match (date, close) {
            (Some(d), Some(c)) => rows.push((d, c)),
            _ => dropped += 1,
        }
    }
    if rows.is_empty() {
        return Err(Error::NoValidRows(path.to_path_buf()));
    }
    rows.sort_by_key(|(d, _)| *d);
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::DuplicateDate {
            path: path.to_path_buf(),
            date: w[0].0.to_string(),
        });
    }
    let ticker = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let (dates, closes) = rows.into_iter().unzip();
    Ok(CsvLoad {
        series: PriceSeries {
            ticker,
            dates,
            closes,
        },
        dropped_rows: dropped,
    })
}

/// Affine map of `[min, max]` onto `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min: f64,
    pub max: f64,
}

impl MinMaxScaler {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !min.is_finite() || !max.is_finite() || max <= min {
            return Err(Error::DegenerateScale { min, max });
        }
        Ok(MinMaxScaler { min, max })
    }

    /// Fits on `values[..train_len]` only.
    pub fn fit(values: &[f64], train_len: usize) -> Result<Self> {
        if train_len < 2 || train_len > values.len() {
            return Err(Error::invalid(format!(
                "scaler needs 2 <= train_len <= {}, got {train_len}",
                values.len()
            )));
        }
        let region = &values[..train_len];
        let min = region.iter().copied().fold(f64::INFINITY, f64::min);
        let max = region.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self::new(min, max)
    }

    pub fn transform(&self, x: f64) -> f64 {
        (x - self.min) / (self.max - self.min)
    }

    pub fn inverse(&self, y: f64) -> f64 {
        y * (self.max - self.min) + self.min
    }
}

/// Sliding windows of `e` normalized closes with the next close as target.
/// Windows `[0, split_index)` are the training split, the rest the test split.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedDataset {
    window_len: usize,
    inputs: Vec<Vec<f64>>,
    targets: Vec<f64>,
    split_index: usize,
    scaler: MinMaxScaler,
}

impl WindowedDataset {
    pub fn from_parts(
        inputs: Vec<Vec<f64>>,
        targets: Vec<f64>,
        split_index: usize,
        scaler: MinMaxScaler,
    ) -> Result<Self> {
        check_len("dataset targets", inputs.len(), targets.len())?;
        let window_len = inputs
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::invalid("dataset is empty"))?;
        if window_len == 0 {
            return Err(Error::invalid("windows must be non-empty"));
        }
        for x in &inputs {
            check_len("dataset window", window_len, x.len())?;
        }
        if split_index == 0 || split_index > inputs.len() {
            return Err(Error::invalid(format!(
                "split index {split_index} must be in 1..={}",
                inputs.len()
            )));
        }
        Ok(WindowedDataset {
            window_len,
            inputs,
            targets,
            split_index,
            scaler,
        })
    }

    pub fn window_len(&self) -> usize {
        self.window_len
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn split_index(&self) -> usize {
        self.split_index
    }

    pub fn train_len(&self) -> usize {
        self.split_index
    }

    pub fn test_len(&self) -> usize {
        self.inputs.len() - self.split_index
    }

    pub fn scaler(&self) -> MinMaxScaler {
        self.scaler
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn train(&self) -> (&[Vec<f64>], &[f64]) {
        (&self.inputs[..self.split_index], &self.targets[..self.split_index])
    }

    pub fn test(&self) -> (&[Vec<f64>], &[f64]) {
        (&self.inputs[self.split_index..], &self.targets[self.split_index..])
    }
}

/// Builds `N - e` one-step-ahead windows from a length-`N` series and splits
/// them chronologically at `floor(train_ratio * (N - e))`. The scaler sees only
/// the closes covered by training windows and their targets.
pub fn make_windows(series: &PriceSeries, window_len: usize, train_ratio: f64) -> Result<WindowedDataset> {
    windows_from_closes(&series.closes, window_len, train_ratio)
}

pub fn windows_from_closes(closes: &[f64], window_len: usize, train_ratio: f64) -> Result<WindowedDataset> {
    if window_len == 0 {
        return Err(Error::invalid("window length must be positive"));
    }
    if !(train_ratio > 0.0 && train_ratio < 1.0) {
        return Err(Error::invalid(format!("train_ratio must lie in (0, 1), got {train_ratio}")));
    }
    let n = closes.len();
    if n < window_len + 2 {
        return Err(Error::invalid(format!(
            "series of length {n} is too short for windows of length {window_len}"
        )));
    }
    let count = n - window_len;
    let split = (train_ratio * count as f64).floor() as usize;
    if split == 0 || split == count {
        return Err(Error::invalid(format!(
            "train_ratio {train_ratio} leaves an empty split for {count} windows"
        )));
    }
    let scaler = MinMaxScaler::fit(closes, split + window_len)?;
    let scaled: Vec<f64> = closes.iter().map(|&c| scaler.transform(c)).collect();
    let inputs = scaled.windows(window_len).take(count).map(<[f64]>::to_vec).collect();
    let targets = scaled[window_len..].to_vec();
    WindowedDataset::from_parts(inputs, targets, split, scaler)
}
