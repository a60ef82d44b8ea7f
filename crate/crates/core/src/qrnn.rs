//! Closed-form single-qubit quantum ridgelet network.
//!
//! Each ridgelet unit drives one `R_y(2 c_i eta_i(x))` rotation on `|0>`.
//! Rotations about a single axis commute and their angles add, so the whole
//! product equals `R_y(2 g_J(x))` and the measured `<Z>` is `cos(2 g_J(x))`.
//! [`QrnnSingleQubit::forward`] evaluates that closed form directly; the
//! gate-level routes are kept for cross-checking.

use rand::Rng;
use rand_distr::{Distribution, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::qubit::{ry, Gate2x2, StateVector};
use crate::ridgelet::{MotherRidgelet, RidgeletLayer, RidgeletUnit, UnitGrad};

/// Maps a classical scalar to a rotation angle `Psi(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleEncoder {
    /// `Psi(x) = pi x`, intended for inputs normalized to `[0, 1]`.
    #[default]
    LinearPi,
    /// `Psi(x) = 2 atan(x)`
    Arctan,
}

impl AngleEncoder {
    pub fn angle(self, x: f64) -> f64 {
        match self {
            AngleEncoder::LinearPi => std::f64::consts::PI * x,
            AngleEncoder::Arctan => 2.0 * x.atan(),
        }
    }

    pub fn derivative(self, x: f64) -> f64 {
        match self {
            AngleEncoder::LinearPi => std::f64::consts::PI,
            AngleEncoder::Arctan => 2.0 / (1.0 + x * x),
        }
    }

    /// `R_y(Psi(x)) |0>`
    pub fn encode(self, x: f64) -> Result<StateVector> {
        if !x.is_finite() {
            return Err(Error::invalid(format!("cannot encode non-finite input {x}")));
        }
        StateVector::zero(1)?.with_gate(&ry(self.angle(x))?, 0)
    }
}

/// `R_y(2 c eta_{a,b,u}(x))` for one unit.
pub fn unit_unitary(
    mother: MotherRidgelet,
    unit: &RidgeletUnit,
    weight: f64,
    x: &[f64],
) -> Result<Gate2x2> {
    ry(2.0 * weight * unit.eval(mother, x)?)
}

/// `sin^2(c eta_{a,b,u}(x))`, the probability of reading `|1>` after one unit gate.
pub fn prob_one_closed(
    mother: MotherRidgelet,
    unit: &RidgeletUnit,
    weight: f64,
    x: &[f64],
) -> Result<f64> {
    let s = (weight * unit.eval(mother, x)?).sin();
    Ok(s * s)
}

/// Gradient of [`QrnnSingleQubit::forward`] for one input.
#[derive(Debug, Clone, PartialEq)]
pub struct QrnnGrad {
    pub weights: Vec<f64>,
    pub units: Vec<UnitGrad>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QrnnSingleQubit {
    layer: RidgeletLayer,
    weights: Vec<f64>,
}

impl QrnnSingleQubit {
    pub fn new(layer: RidgeletLayer, weights: Vec<f64>) -> Result<Self> {
        check_len("qrnn weights", layer.num_units(), weights.len())?;
        Ok(QrnnSingleQubit { layer, weights })
    }

    /// Random ridgelet layer with output weights uniform in `[-1/sqrt(J), 1/sqrt(J)]`.
    pub fn random<R: Rng + ?Sized>(
        input_dim: usize,
        num_units: usize,
        mother: MotherRidgelet,
        rng: &mut R,
    ) -> Result<Self> {
        let layer = RidgeletLayer::random(input_dim, num_units, mother, rng)?;
        let weights = random_output_weights(num_units, rng);
        Self::new(layer, weights)
    }

    pub fn layer(&self) -> &RidgeletLayer {
        &self.layer
    }

    pub fn layer_mut(&mut self) -> &mut RidgeletLayer {
        &mut self.layer
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    /// `g_J(x)`
    pub fn expansion(&self, x: &[f64]) -> Result<f64> {
        self.layer.expansion(&self.weights, x)
    }

    /// Per-unit gates in application order.
    pub fn unit_gates(&self, x: &[f64]) -> Result<Vec<Gate2x2>> {
        let mother = self.layer.mother();
        self.layer
            .units()
            .iter()
            .zip(&self.weights)
            .map(|(u, &c)| unit_unitary(mother, u, c, x))
            .collect()
    }

    /// Collapsed unitary `R_y(2 g_J(x))`.
    pub fn unitary(&self, x: &[f64]) -> Result<Gate2x2> {
        ry(2.0 * self.expansion(x)?)
    }

    /// The same unitary built as the ordered product of the `J` unit gates.
    pub fn unitary_by_product(&self, x: &[f64]) -> Result<Gate2x2> {
        Ok(self
            .unit_gates(x)?
            .into_iter()
            .fold(Gate2x2::IDENTITY, |acc, g| g * acc))
    }

    /// `<Z> = cos(2 g_J(x))`
    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        Ok((2.0 * self.expansion(x)?).cos())
    }

    pub fn grad_forward(&self, x: &[f64]) -> Result<QrnnGrad> {
        let (feats, unit_grads) = self.layer.features_with_grad(x)?;
        let g: f64 = self.weights.iter().zip(&feats).map(|(c, f)| c * f).sum();
        let outer = -2.0 * (2.0 * g).sin();
        let weights = feats.iter().map(|f| outer * f).collect();
        let units = unit_grads
            .into_iter()
            .zip(&self.weights)
            .map(|(ug, &c)| {
                let k = outer * c;
                UnitGrad {
                    direction: ug.direction.iter().map(|d| k * d).collect(),
                    log_scale: k * ug.log_scale,
                    shift: k * ug.shift,
                }
            })
            .collect();
        Ok(QrnnGrad { weights, units })
    }
}

pub(crate) fn random_output_weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let bound = 1.0 / (n as f64).sqrt();
    let dist = Uniform::new_inclusive(-bound, bound).expect("valid range");
    (0..n).map(|_| dist.sample(rng)).collect()
}
