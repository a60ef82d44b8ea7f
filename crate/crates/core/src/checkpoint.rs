//! Versioned JSON model files.
//!
//! Floats are written with `float_roundtrip`, so saving and loading a model
//! reproduces every parameter bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::data::MinMaxScaler;
use crate::error::{Error, Result};
use crate::vqc::QrnnModel;

pub const FORMAT: &str = "qrnn-checkpoint";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    /// Window length the model was trained with.
    pub window: usize,
    /// Scaler fitted on the training prefix, kept so predictions can be
    /// mapped back to prices.
    pub scaler: MinMaxScaler,
    pub model: QrnnModel,
}

impl Checkpoint {
    pub fn new(model: QrnnModel, scaler: MinMaxScaler) -> Self {
        Checkpoint {
            format: FORMAT.into(),
            version: VERSION,
            window: model.input_dim(),
            scaler,
            model,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Checkpoint(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Checkpoint(e.to_string()))?;
        match value.get("format").and_then(|v| v.as_str()) {
            Some(FORMAT) => {}
            other => return Err(Error::Checkpoint(format!("unrecognised format {other:?}"))),
        }
        match value.get("version").and_then(|v| v.as_u64()) {
            Some(v) if v == VERSION as u64 => {}
            other => return Err(Error::Checkpoint(format!("unsupported version {other:?}, expected {VERSION}"))),
        }
        let ckpt: Checkpoint = serde_json::from_value(value).map_err(|e| Error::Checkpoint(e.to_string()))?;
        ckpt.model.validate()?;
        if ckpt.window != ckpt.model.input_dim() {
            return Err(Error::Checkpoint(format!(
                "window {} does not match model input dimension {}",
                ckpt.window,
                ckpt.model.input_dim()
            )));
        }
        Ok(ckpt)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::training::Trainable;
    use crate::vqc::ModelConfig;

    fn sample() -> Checkpoint {
        let config = ModelConfig {
            qubits: 2,
            vqc_layers: 3,
            ..ModelConfig::default()
        };
        let model = QrnnModel::random(&config, 8, 17).unwrap();
        Checkpoint::new(model, MinMaxScaler::new(3.5, 91.25).unwrap())
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let ckpt = sample();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        ckpt.save(&path).unwrap();
        let back = Checkpoint::load(&path).unwrap();
        assert_eq!(back, ckpt);
        let a: Vec<u64> = ckpt.model.params().iter().map(|v| v.to_bits()).collect();
        let b: Vec<u64> = back.model.params().iter().map(|v| v.to_bits()).collect();
        assert_eq!(a, b);
        let x = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8];
        assert_eq!(ckpt.model.forward(&x).unwrap().to_bits(), back.model.forward(&x).unwrap().to_bits());
    }

    #[test]
    fn rejects_wrong_version_and_format() {
        let json = sample().to_json().unwrap();
        let bumped = json.replace("\"version\": 1", "\"version\": 99");
        assert!(matches!(Checkpoint::from_json(&bumped), Err(Error::Checkpoint(_))));
        let renamed = json.replace(FORMAT, "something-else");
        assert!(matches!(Checkpoint::from_json(&renamed), Err(Error::Checkpoint(_))));
        assert!(matches!(Checkpoint::from_json("{"), Err(Error::Checkpoint(_))));
    }

    #[test]
    fn missing_file() {
        let err = Checkpoint::load(Path::new("/nonexistent/model.json")).unwrap_err();
        assert!(matches!(err, Error::MissingFile(_)));
    }
}
