//! Loss, optimizers and the mini-batch training loop.

use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::benchmark::rmse;
use crate::data::WindowedDataset;
use crate::error::{check_len, Error, Result};
use crate::seeded_rng;

/// A model with a flat parameter vector and per-sample gradients.
pub trait Trainable {
    fn param_count(&self) -> usize;

    fn params(&self) -> Vec<f64>;

    fn set_params(&mut self, params: &[f64]) -> Result<()>;

    fn predict(&self, x: &[f64]) -> Result<f64>;

    /// Prediction together with `d prediction / d params` in [`Trainable::params`] order.
    fn predict_with_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)>;

    fn predict_all(&self, inputs: &[Vec<f64>]) -> Result<Vec<f64>> {
        inputs.iter().map(|x| self.predict(x)).collect()
    }
}

/// Mean squared error.
pub fn mse_loss(preds: &[f64], targets: &[f64]) -> Result<f64> {
    check_len("loss targets", preds.len(), targets.len())?;
    if preds.is_empty() {
        return Err(Error::invalid("loss of an empty batch is undefined"));
    }
    let sum: f64 = preds.iter().zip(targets).map(|(p, t)| (p - t) * (p - t)).sum();
    Ok(sum / preds.len() as f64)
}

/// MSE over a batch and its gradient. Samples are accumulated in index order.
pub fn batch_loss_grad<M: Trainable + ?Sized>(
    model: &M,
    inputs: &[&[f64]],
    targets: &[f64],
) -> Result<(f64, Vec<f64>)> {
    check_len("batch targets", inputs.len(), targets.len())?;
    if inputs.is_empty() {
        return Err(Error::invalid("gradient of an empty batch is undefined"));
    }
    let n = inputs.len() as f64;
    let mut grad = vec![0.0; model.param_count()];
    let mut loss = 0.0;
    for (x, &t) in inputs.iter().zip(targets) {
        let (pred, g) = model.predict_with_grad(x)?;
        let err = pred - t;
        loss += err * err;
        let scale = 2.0 * err / n;
        for (acc, gi) in grad.iter_mut().zip(&g) {
            *acc += scale * gi;
        }
    }
    Ok((loss / n, grad))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimizer {
    #[default]
    Adam,
    Sgd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
    pub optimizer: Optimizer,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 50,
            batch_size: 32,
            learning_rate: 1e-3,
            seed: 42,
            optimizer: Optimizer::Adam,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::invalid("batch_size must be positive"));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid("learning_rate must be finite and non-negative"));
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::invalid("Adam betas must lie in [0, 1)"));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::invalid("Adam epsilon must be positive"));
        }
        Ok(())
    }
}

/// First and second moment buffers for Adam.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub step: u64,
}

impl AdamState {
    pub fn new(n: usize) -> Self {
        AdamState {
            m: vec![0.0; n],
            v: vec![0.0; n],
            step: 0,
        }
    }
}

/// One bias-corrected Adam update.
pub fn adam_step(
    state: &mut AdamState,
    params: &mut [f64],
    grads: &[f64],
    config: &TrainConfig,
) -> Result<()> {
    check_len("adam gradients", params.len(), grads.len())?;
    check_len("adam first moment", params.len(), state.m.len())?;
    check_len("adam second moment", params.len(), state.v.len())?;
    state.step += 1;
    let (b1, b2) = (config.beta1, config.beta2);
    let c1 = 1.0 - b1.powi(state.step as i32);
    let c2 = 1.0 - b2.powi(state.step as i32);
    for i in 0..params.len() {
        let g = grads[i];
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
        let m_hat = state.m[i] / c1;
        let v_hat = state.v[i] / c2;
        params[i] -= config.learning_rate * m_hat / (v_hat.sqrt() + config.epsilon);
    }
    Ok(())
}

pub fn sgd_step(params: &mut [f64], grads: &[f64], learning_rate: f64) -> Result<()> {
    check_len("sgd gradients", params.len(), grads.len())?;
    for (p, g) in params.iter_mut().zip(grads) {
        *p -= learning_rate * g;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: usize,
    /// Mean of the per-sample squared errors seen during the epoch.
    pub train_loss: f64,
    pub train_rmse: f64,
    pub test_rmse: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub records: Vec<EpochRecord>,
}

impl TrainHistory {
    pub const HEADER: &'static str = "epoch,train_loss,train_rmse,test_rmse";

    /// Comma-separated table with one header row. Values use the shortest
    /// decimal text that round-trips the `f64`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(out, "{},{},{},{}", r.epoch, r.train_loss, r.train_rmse, r.test_rmse);
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn last(&self) -> Option<&EpochRecord> {
        self.records.last()
    }
}

/// Mini-batch training on the training split of `data`.
///
/// Training windows are reshuffled every epoch from a generator seeded with
/// `config.seed`; the trailing partial batch is kept. Test windows are only
/// evaluated.
pub fn train<M: Trainable>(
    mut model: M,
    data: &WindowedDataset,
    config: &TrainConfig,
) -> Result<(M, TrainHistory)> {
    config.validate()?;
    if data.train_len() == 0 {
        return Err(Error::invalid("training split is empty"));
    }
    let mut history = TrainHistory::default();
    if config.epochs == 0 {
        return Ok((model, history));
    }
    let mut rng = seeded_rng(config.seed);
    rng.set_stream(1);
    let mut params = model.params();
    let mut adam = AdamState::new(params.len());
    let mut order: Vec<usize> = (0..data.train_len()).collect();
    let (train_x, train_y) = data.train();
    let (test_x, test_y) = data.test();

    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let mut sq_err_sum = 0.0;
        for batch in order.chunks(config.batch_size) {
            let xs: Vec<&[f64]> = batch.iter().map(|&i| train_x[i].as_slice()).collect();
            let ys: Vec<f64> = batch.iter().map(|&i| train_y[i]).collect();
            let (loss, grad) = batch_loss_grad(&model, &xs, &ys)?;
            if !loss.is_finite() {
                return Err(Error::invalid(format!("training diverged at epoch {epoch}")));
            }
            sq_err_sum += loss * batch.len() as f64;
            match config.optimizer {
                Optimizer::Adam => adam_step(&mut adam, &mut params, &grad, config)?,
                Optimizer::Sgd => sgd_step(&mut params, &grad, config.learning_rate)?,
            }
            model.set_params(&params)?;
        }
        let train_rmse = rmse(&model.predict_all(train_x)?, train_y)?;
        let test_rmse = if test_x.is_empty() {
            f64::NAN
        } else {
            rmse(&model.predict_all(test_x)?, test_y)?
        };
        history.records.push(EpochRecord {
            epoch,
            train_loss: sq_err_sum / data.train_len() as f64,
            train_rmse,
            test_rmse,
        });
    }
    Ok((model, history))
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    use super::*;

    #[test]
    fn mse_cases() {
        assert_eq!(mse_loss(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(mse_loss(&[0.0, 2.0], &[0.0, 0.0]).unwrap(), 2.0);
        assert!(matches!(mse_loss(&[], &[]), Err(Error::InvalidParameter(_))));
        assert!(matches!(mse_loss(&[1.0], &[]), Err(Error::Shape { .. })));
        let mut rng = seeded_rng(8);
        let p: Vec<f64> = (0..57).map(|_| rng.random_range(-3.0..3.0)).collect();
        let t: Vec<f64> = (0..57).map(|_| rng.random_range(-3.0..3.0)).collect();
        let mut naive = 0.0;
        for i in 0..p.len() {
            naive += (p[i] - t[i]).powi(2);
        }
        naive /= p.len() as f64;
        assert_abs_diff_eq!(mse_loss(&p, &t).unwrap(), naive, epsilon = 1e-12);
    }

    #[test]
    fn adam_zero_gradient_is_a_no_op() {
        let cfg = TrainConfig::default();
        let mut state = AdamState::new(3);
        let mut params = vec![0.5, -1.0, 2.0];
        adam_step(&mut state, &mut params, &[0.0; 3], &cfg).unwrap();
        assert_eq!(params, vec![0.5, -1.0, 2.0]);
        assert_eq!(state.m, vec![0.0; 3]);
        assert_eq!(state.v, vec![0.0; 3]);
    }

    #[test]
    fn adam_first_step_moves_by_learning_rate() {
        let cfg = TrainConfig {
            learning_rate: 0.01,
            ..TrainConfig::default()
        };
        let mut state = AdamState::new(3);
        let mut params = vec![0.0; 3];
        let grads = [3.0, -0.2, 1e-3];
        adam_step(&mut state, &mut params, &grads, &cfg).unwrap();
        for (p, g) in params.iter().zip(grads) {
            assert_eq!(p.signum(), -g.signum());
            assert_abs_diff_eq!(p.abs(), 0.01, epsilon = 1e-6);
        }
    }

    #[test]
    fn adam_descends_a_parabola() {
        let cfg = TrainConfig {
            learning_rate: 0.05,
            ..TrainConfig::default()
        };
        let mut state = AdamState::new(1);
        let mut p = vec![1.0];
        let mut prev = p[0] * p[0];
        for _ in 0..10 {
            let g = [2.0 * p[0]];
            adam_step(&mut state, &mut p, &g, &cfg).unwrap();
            let f = p[0] * p[0];
            assert!(f < prev);
            prev = f;
        }
    }

    #[test]
    fn adam_rejects_shape_mismatch() {
        let mut state = AdamState::new(2);
        let mut params = vec![0.0; 2];
        assert!(adam_step(&mut state, &mut params, &[1.0], &TrainConfig::default()).is_err());
    }

    #[test]
    fn history_csv_layout() {
        let h = TrainHistory {
            records: vec![EpochRecord {
                epoch: 1,
                train_loss: 0.5,
                train_rmse: 0.25,
                test_rmse: 0.125,
            }],
        };
        assert_eq!(h.to_csv(), "epoch,train_loss,train_rmse,test_rmse\n1,0.5,0.25,0.125\n");
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        let bad = TrainConfig {
            batch_size: 0,
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = TrainConfig {
            learning_rate: f64::NAN,
            ..TrainConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
