//! Quantum ridgelet neural networks for time-series forecasting.
//!
//! The crate is organised bottom-up:
//!
//! - [`qubit`]: dense statevector simulator (rotations, Pauli gates, CNOT, `<Z>`, shots)
//! - [`ridgelet`]: ridgelet units and finite expansions `g_J(x)`
//! - [`qrnn`]: the closed-form single-qubit network `cos(2 g_J(x))`
//! - [`vqc`]: the full hybrid pipeline (ridgelet features, linear map, variational circuit, dense head)
//! - [`training`]: MSE loss, Adam/SGD and the mini-batch training loop
//! - [`data`]: CSV ingestion, min-max scaling and sliding windows
//! - [`benchmark`]: RMSE/MAE, the classical ridgelet baseline and the comparison harness
//! - [`oracle`] and [`check`]: brute-force reference implementations and the self-check suite
//! - [`config`], [`checkpoint`] and [`experiment`]: run configuration, model files and the
//!   library side of the command-line tool

pub mod benchmark;
pub mod check;
pub mod checkpoint;
pub mod config;
pub mod data;
pub mod error;
pub mod experiment;
pub mod oracle;
pub mod qrnn;
pub mod qubit;
pub mod ridgelet;
pub mod training;
pub mod vqc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use benchmark::{mae, rmse, BenchReport, CrnnModel};
pub use data::{MinMaxScaler, PriceSeries, WindowedDataset};
pub use error::{Error, ErrorClass, Result};
pub use qrnn::{AngleEncoder, QrnnSingleQubit};
pub use qubit::{Gate2x2, PauliKind, StateVector};
pub use ridgelet::{MotherRidgelet, RidgeletLayer, RidgeletUnit};
pub use training::{train, TrainConfig, TrainHistory, Trainable};
pub use vqc::{ModelConfig, QrnnModel};

/// The crate-wide deterministic generator.
pub type Rng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
