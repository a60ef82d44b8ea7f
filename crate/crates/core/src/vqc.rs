//! The hybrid forecasting pipeline.
//!
//! `x -> ridgelet features -> linear map -> angle encoder -> variational
//! circuit -> per-qubit <Z> -> dense prediction head`.
//!
//! The circuit prepares `|0...0>`, applies `R_y(angle_q)` to every qubit, then
//! `L` layers of `R_y(theta_{l,q,0})` and `R_z(theta_{l,q,1})` on every qubit,
//! each layer closed by a CNOT ring (`q` controls `q + 1 mod m_q`) when there
//! is more than one qubit.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::{Distribution, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::qrnn::AngleEncoder;
use crate::qubit::{ry, rz, StateVector, MAX_QUBITS};
use crate::ridgelet::{MotherRidgelet, RidgeletLayer};
use crate::seeded_rng;
use crate::training::Trainable;

fn uniform_vec<R: Rng + ?Sized>(n: usize, lo: f64, hi: f64, rng: &mut R) -> Vec<f64> {
    let dist = Uniform::new(lo, hi).expect("valid range");
    (0..n).map(|_| dist.sample(rng)).collect()
}

/// Dense affine map `W x + b` with `W` stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearMap {
    in_dim: usize,
    out_dim: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl LinearMap {
    pub fn new(in_dim: usize, out_dim: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::invalid("linear map dimensions must be positive"));
        }
        check_len("linear map weights", in_dim * out_dim, weights.len())?;
        check_len("linear map bias", out_dim, bias.len())?;
        Ok(LinearMap {
            in_dim,
            out_dim,
            weights,
            bias,
        })
    }

    pub fn zeros(in_dim: usize, out_dim: usize) -> Result<Self> {
        Self::new(in_dim, out_dim, vec![0.0; in_dim * out_dim], vec![0.0; out_dim])
    }

    /// Weights uniform in `[-1/sqrt(in), 1/sqrt(in))`, zero bias.
    pub fn random<R: Rng + ?Sized>(in_dim: usize, out_dim: usize, rng: &mut R) -> Result<Self> {
        let bound = 1.0 / (in_dim.max(1) as f64).sqrt();
        let weights = uniform_vec(in_dim * out_dim, -bound, bound, rng);
        Self::new(in_dim, out_dim, weights, vec![0.0; out_dim])
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn apply(&self, input: &[f64]) -> Result<Vec<f64>> {
        check_len("linear map input", self.in_dim, input.len())?;
        Ok(self
            .weights
            .chunks_exact(self.in_dim)
            .zip(&self.bias)
            .map(|(row, b)| row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>() + b)
            .collect())
    }

    /// Accumulates parameter gradients into `grad` and returns `dL/dinput`.
    fn backward(&self, input: &[f64], upstream: &[f64], grad: &mut [f64]) -> Vec<f64> {
        let (gw, gb) = grad.split_at_mut(self.weights.len());
        let mut d_input = vec![0.0; self.in_dim];
        for (o, &up) in upstream.iter().enumerate() {
            let row = &self.weights[o * self.in_dim..(o + 1) * self.in_dim];
            let grow = &mut gw[o * self.in_dim..(o + 1) * self.in_dim];
            for i in 0..self.in_dim {
                grow[i] += up * input[i];
                d_input[i] += up * row[i];
            }
            gb[o] += up;
        }
        d_input
    }

    fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    fn write_params(&self, out: &mut Vec<f64>) {
        out.extend_from_slice(&self.weights);
        out.extend_from_slice(&self.bias);
    }

    fn read_params(&mut self, src: &[f64]) -> usize {
        let n = self.weights.len();
        self.weights.copy_from_slice(&src[..n]);
        self.bias.copy_from_slice(&src[n..n + self.out_dim]);
        n + self.out_dim
    }
}

/// Variational circuit angles, indexed `(layer, qubit, k)` with `k = 0` the
/// `R_y` angle and `k = 1` the `R_z` angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqcParams {
    layers: usize,
    num_qubits: usize,
    theta: Vec<f64>,
}

impl VqcParams {
    pub fn new(layers: usize, num_qubits: usize, theta: Vec<f64>) -> Result<Self> {
        if layers == 0 {
            return Err(Error::invalid("circuit needs at least one layer"));
        }
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::invalid(format!(
                "qubit count must be in 1..={MAX_QUBITS}, got {num_qubits}"
            )));
        }
        check_len("circuit angles", layers * num_qubits * 2, theta.len())?;
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("circuit angles must be finite"));
        }
        Ok(VqcParams {
            layers,
            num_qubits,
            theta,
        })
    }

    pub fn zeros(layers: usize, num_qubits: usize) -> Result<Self> {
        Self::new(layers, num_qubits, vec![0.0; layers * num_qubits * 2])
    }

    /// Angles uniform in `[0, 2 pi)`.
    pub fn random<R: Rng + ?Sized>(layers: usize, num_qubits: usize, rng: &mut R) -> Result<Self> {
        Self::new(
            layers,
            num_qubits,
            uniform_vec(layers * num_qubits * 2, 0.0, 2.0 * PI, rng),
        )
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn theta_mut(&mut self) -> &mut [f64] {
        &mut self.theta
    }

    pub fn index(&self, layer: usize, qubit: usize, k: usize) -> usize {
        (layer * self.num_qubits + qubit) * 2 + k
    }

    /// Runs the circuit and returns the final state.
    pub fn prepare(&self, angles: &[f64]) -> Result<StateVector> {
        check_len("circuit input angles", self.num_qubits, angles.len())?;
        run_circuit(self.num_qubits, &self.theta, angles)
    }

    /// Exact per-qubit `<Z>`.
    pub fn expectations(&self, angles: &[f64]) -> Result<Vec<f64>> {
        let state = self.prepare(angles)?;
        (0..self.num_qubits).map(|q| state.expectation_z(q)).collect()
    }

    /// Per-qubit `<Z>`, sampled from `shots` measurements when given.
    /// Qubit `q` draws from the generator seeded with `seed + q`.
    pub fn forward(&self, angles: &[f64], shots: Option<u64>, seed: u64) -> Result<Vec<f64>> {
        match shots {
            None => self.expectations(angles),
            Some(shots) => {
                let state = self.prepare(angles)?;
                (0..self.num_qubits)
                    .map(|q| state.sample_shots(q, shots, seed.wrapping_add(q as u64)))
                    .collect()
            }
        }
    }

    /// Parameter-shift Jacobian of the exact expectations.
    ///
    /// Every angle (input encodings included) drives a Pauli rotation, so
    /// `d<Z_q>/d phi = (<Z_q>(phi + pi/2) - <Z_q>(phi - pi/2)) / 2` holds exactly.
    pub fn param_shift(&self, angles: &[f64]) -> Result<VqcJacobian> {
        check_len("circuit input angles", self.num_qubits, angles.len())?;
        let mut theta = self.theta.clone();
        let mut d_theta = Vec::with_capacity(theta.len());
        for i in 0..theta.len() {
            let orig = theta[i];
            theta[i] = orig + FRAC_PI_2;
            let plus = self.shifted_expectations(&theta, angles)?;
            theta[i] = orig - FRAC_PI_2;
            let minus = self.shifted_expectations(&theta, angles)?;
            theta[i] = orig;
            d_theta.push(half_difference(&plus, &minus));
        }
        let mut shifted = angles.to_vec();
        let mut d_angles = Vec::with_capacity(angles.len());
        for q in 0..angles.len() {
            let orig = shifted[q];
            shifted[q] = orig + FRAC_PI_2;
            let plus = self.shifted_expectations(&self.theta, &shifted)?;
            shifted[q] = orig - FRAC_PI_2;
            let minus = self.shifted_expectations(&self.theta, &shifted)?;
            shifted[q] = orig;
            d_angles.push(half_difference(&plus, &minus));
        }
        Ok(VqcJacobian { d_theta, d_angles })
    }

    fn shifted_expectations(&self, theta: &[f64], angles: &[f64]) -> Result<Vec<f64>> {
        let state = run_circuit(self.num_qubits, theta, angles)?;
        (0..self.num_qubits).map(|q| state.expectation_z(q)).collect()
    }
}

fn half_difference(plus: &[f64], minus: &[f64]) -> Vec<f64> {
    plus.iter().zip(minus).map(|(p, m)| 0.5 * (p - m)).collect()
}

fn run_circuit(num_qubits: usize, theta: &[f64], angles: &[f64]) -> Result<StateVector> {
    let mut state = StateVector::zero(num_qubits)?;
    for (q, &a) in angles.iter().enumerate() {
        state.apply_gate(&ry(a)?, q)?;
    }
    for layer in theta.chunks_exact(2 * num_qubits) {
        for (q, pair) in layer.chunks_exact(2).enumerate() {
            state.apply_gate(&ry(pair[0])?, q)?;
            state.apply_gate(&rz(pair[1])?, q)?;
        }
        if num_qubits > 1 {
            for q in 0..num_qubits {
                state.apply_cnot(q, (q + 1) % num_qubits)?;
            }
        }
    }
    Ok(state)
}

/// `d_theta[i][q] = d<Z_q>/d theta_i`, `d_angles[p][q] = d<Z_q>/d angle_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct VqcJacobian {
    pub d_theta: Vec<Vec<f64>>,
    pub d_angles: Vec<Vec<f64>>,
}

/// Two dense layers: `out . tanh(H q + b1) + b2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionHead {
    in_dim: usize,
    hidden: usize,
    hidden_weights: Vec<f64>,
    hidden_bias: Vec<f64>,
    out_weights: Vec<f64>,
    out_bias: f64,
}

impl PredictionHead {
    pub fn new(
        in_dim: usize,
        hidden: usize,
        hidden_weights: Vec<f64>,
        hidden_bias: Vec<f64>,
        out_weights: Vec<f64>,
        out_bias: f64,
    ) -> Result<Self> {
        if in_dim == 0 || hidden == 0 {
            return Err(Error::invalid("prediction head dimensions must be positive"));
        }
        check_len("head hidden weights", in_dim * hidden, hidden_weights.len())?;
        check_len("head hidden bias", hidden, hidden_bias.len())?;
        check_len("head output weights", hidden, out_weights.len())?;
        Ok(PredictionHead {
            in_dim,
            hidden,
            hidden_weights,
            hidden_bias,
            out_weights,
            out_bias,
        })
    }

    pub fn zeros(in_dim: usize, hidden: usize) -> Result<Self> {
        Self::new(
            in_dim,
            hidden,
            vec![0.0; in_dim * hidden],
            vec![0.0; hidden],
            vec![0.0; hidden],
            0.0,
        )
    }

    /// Uniform fan-in initialization, zero biases.
    pub fn random<R: Rng + ?Sized>(in_dim: usize, hidden: usize, rng: &mut R) -> Result<Self> {
        let b1 = 1.0 / (in_dim.max(1) as f64).sqrt();
        let b2 = 1.0 / (hidden.max(1) as f64).sqrt();
        let hidden_weights = uniform_vec(in_dim * hidden, -b1, b1, rng);
        let out_weights = uniform_vec(hidden, -b2, b2, rng);
        Self::new(in_dim, hidden, hidden_weights, vec![0.0; hidden], out_weights, 0.0)
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn hidden_weights(&self) -> &[f64] {
        &self.hidden_weights
    }

    pub fn hidden_bias(&self) -> &[f64] {
        &self.hidden_bias
    }

    pub fn out_weights(&self) -> &[f64] {
        &self.out_weights
    }

    pub fn out_bias(&self) -> f64 {
        self.out_bias
    }

    pub fn set_out_bias(&mut self, bias: f64) {
        self.out_bias = bias;
    }

    fn activations(&self, input: &[f64]) -> Vec<f64> {
        self.hidden_weights
            .chunks_exact(self.in_dim)
            .zip(&self.hidden_bias)
            .map(|(row, b)| (row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>() + b).tanh())
            .collect()
    }

    pub fn forward(&self, input: &[f64]) -> Result<f64> {
        check_len("head input", self.in_dim, input.len())?;
        let act = self.activations(input);
        Ok(self.out_weights.iter().zip(&act).map(|(w, a)| w * a).sum::<f64>() + self.out_bias)
    }

    /// Accumulates `upstream * d out / d params` into `grad`, returns `d out / d input` scaled by `upstream`.
    pub(crate) fn backward(&self, input: &[f64], upstream: f64, grad: &mut [f64]) -> Vec<f64> {
        let act = self.activations(input);
        let nh = self.hidden_weights.len();
        let (g_hw, rest) = grad.split_at_mut(nh);
        let (g_hb, rest) = rest.split_at_mut(self.hidden);
        let (g_ow, g_ob) = rest.split_at_mut(self.hidden);
        let mut d_input = vec![0.0; self.in_dim];
        for j in 0..self.hidden {
            g_ow[j] += upstream * act[j];
            let dz = upstream * self.out_weights[j] * (1.0 - act[j] * act[j]);
            g_hb[j] += dz;
            let row = &self.hidden_weights[j * self.in_dim..(j + 1) * self.in_dim];
            let grow = &mut g_hw[j * self.in_dim..(j + 1) * self.in_dim];
            for i in 0..self.in_dim {
                grow[i] += dz * input[i];
                d_input[i] += dz * row[i];
            }
        }
        g_ob[0] += upstream;
        d_input
    }

    pub(crate) fn param_count(&self) -> usize {
        self.hidden_weights.len() + 2 * self.hidden + 1
    }

    pub(crate) fn write_params(&self, out: &mut Vec<f64>) {
        out.extend_from_slice(&self.hidden_weights);
        out.extend_from_slice(&self.hidden_bias);
        out.extend_from_slice(&self.out_weights);
        out.push(self.out_bias);
    }

    pub(crate) fn read_params(&mut self, src: &[f64]) -> usize {
        let mut k = 0;
        for buf in [
            &mut self.hidden_weights,
            &mut self.hidden_bias,
            &mut self.out_weights,
        ] {
            let n = buf.len();
            buf.copy_from_slice(&src[k..k + n]);
            k += n;
        }
        self.out_bias = src[k];
        k + 1
    }
}

/// Architecture and initialization knobs shared by the hybrid model and the
/// classical baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    /// Number of ridgelet features `m_e`.
    pub ridgelet_units: usize,
    /// Number of qubits `m_q`.
    pub qubits: usize,
    /// Variational layers `L`.
    pub vqc_layers: usize,
    /// Hidden width of the prediction head.
    pub head_hidden: usize,
    pub mother: MotherRidgelet,
    pub encoder: AngleEncoder,
    /// Estimate `<Z>` from this many shots instead of exactly.
    pub shots: Option<u64>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            ridgelet_units: 32,
            qubits: 1,
            vqc_layers: 6,
            head_hidden: 16,
            mother: MotherRidgelet::GaussianDerivative,
            encoder: AngleEncoder::LinearPi,
            shots: None,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("ridgelet_units", self.ridgelet_units),
            ("qubits", self.qubits),
            ("vqc_layers", self.vqc_layers),
            ("head_hidden", self.head_hidden),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::invalid(format!("{name} must be positive")));
            }
        }
        if self.qubits > MAX_QUBITS {
            return Err(Error::invalid(format!("qubits must be at most {MAX_QUBITS}")));
        }
        if self.shots == Some(0) {
            return Err(Error::invalid("shots must be at least 1"));
        }
        Ok(())
    }
}

/// Full hybrid model. Flat parameter order: ridgelet layer, linear map
/// (weights then bias), circuit angles, prediction head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QrnnModel {
    pub layer: RidgeletLayer,
    pub map: LinearMap,
    pub vqc: VqcParams,
    pub head: PredictionHead,
    pub encoder: AngleEncoder,
    pub shots: Option<u64>,
    pub shot_seed: u64,
}

impl QrnnModel {
    pub fn new(
        layer: RidgeletLayer,
        map: LinearMap,
        vqc: VqcParams,
        head: PredictionHead,
        encoder: AngleEncoder,
    ) -> Result<Self> {
        let model = QrnnModel {
            layer,
            map,
            vqc,
            head,
            encoder,
            shots: None,
            shot_seed: 0,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        check_len("linear map input", self.layer.num_units(), self.map.in_dim())?;
        check_len("circuit qubits", self.map.out_dim(), self.vqc.num_qubits())?;
        check_len("head input", self.vqc.num_qubits(), self.head.in_dim())?;
        if self.shots == Some(0) {
            return Err(Error::invalid("shots must be at least 1"));
        }
        Ok(())
    }

    /// Seeded random model. The ridgelet layer is drawn first from the
    /// generator so that a [`crate::CrnnModel`] built from the same seed shares it.
    pub fn random(config: &ModelConfig, input_dim: usize, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = seeded_rng(seed);
        let layer = RidgeletLayer::random(input_dim, config.ridgelet_units, config.mother, &mut rng)?;
        let map = LinearMap::random(config.ridgelet_units, config.qubits, &mut rng)?;
        let vqc = VqcParams::random(config.vqc_layers, config.qubits, &mut rng)?;
        let head = PredictionHead::random(config.qubits, config.head_hidden, &mut rng)?;
        let mut model = Self::new(layer, map, vqc, head, config.encoder)?;
        model.shots = config.shots;
        model.shot_seed = seed;
        Ok(model)
    }

    pub fn input_dim(&self) -> usize {
        self.layer.input_dim()
    }

    pub fn features(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.layer.features(x)
    }

    pub fn map_to_qubit_space(&self, features: &[f64]) -> Result<Vec<f64>> {
        self.map.apply(features)
    }

    pub fn encode_angles(&self, mapped: &[f64]) -> Vec<f64> {
        mapped.iter().map(|&w| self.encoder.angle(w)).collect()
    }

    pub fn quantum_outputs(&self, angles: &[f64]) -> Result<Vec<f64>> {
        self.vqc.forward(angles, self.shots, self.shot_seed)
    }

    pub fn forward(&self, x: &[f64]) -> Result<f64> {
        let feats = self.features(x)?;
        let mapped = self.map_to_qubit_space(&feats)?;
        let q = self.quantum_outputs(&self.encode_angles(&mapped))?;
        self.head.forward(&q)
    }

    /// Mean-squared-error gradient over a batch, with circuit derivatives
    /// from the parameter-shift rule.
    pub fn loss_grad(&self, inputs: &[&[f64]], targets: &[f64]) -> Result<(f64, Vec<f64>)> {
        crate::training::batch_loss_grad(self, inputs, targets)
    }
}

impl Trainable for QrnnModel {
    fn param_count(&self) -> usize {
        self.layer.param_count() + self.map.param_count() + self.vqc.theta.len() + self.head.param_count()
    }

    fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        self.layer.write_params(&mut out);
        self.map.write_params(&mut out);
        out.extend_from_slice(&self.vqc.theta);
        self.head.write_params(&mut out);
        out
    }

    fn set_params(&mut self, params: &[f64]) -> Result<()> {
        check_len("model parameters", self.param_count(), params.len())?;
        let mut k = self.layer.read_params(params);
        k += self.map.read_params(&params[k..]);
        let n = self.vqc.theta.len();
        self.vqc.theta.copy_from_slice(&params[k..k + n]);
        k += n;
        self.head.read_params(&params[k..]);
        Ok(())
    }

    fn predict(&self, x: &[f64]) -> Result<f64> {
        self.forward(x)
    }

    fn predict_with_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        if self.shots.is_some() {
            return Err(Error::UnsupportedMode(
                "gradients need exact expectations; disable shot sampling",
            ));
        }
        let (feats, unit_grads) = self.layer.features_with_grad(x)?;
        let mapped = self.map.apply(&feats)?;
        let angles = self.encode_angles(&mapped);
        let q = self.vqc.expectations(&angles)?;
        let pred = self.head.forward(&q)?;

        let mut grad = vec![0.0; self.param_count()];
        let n_layer = self.layer.param_count();
        let n_map = self.map.param_count();
        let n_theta = self.vqc.theta.len();
        let (g_layer, rest) = grad.split_at_mut(n_layer);
        let (g_map, rest) = rest.split_at_mut(n_map);
        let (g_theta, g_head) = rest.split_at_mut(n_theta);

        let d_q = self.head.backward(&q, 1.0, g_head);
        let jac = self.vqc.param_shift(&angles)?;
        for (g, col) in g_theta.iter_mut().zip(&jac.d_theta) {
            *g += col.iter().zip(&d_q).map(|(j, d)| j * d).sum::<f64>();
        }
        let d_mapped: Vec<f64> = jac
            .d_angles
            .iter()
            .zip(&mapped)
            .map(|(col, &w)| {
                col.iter().zip(&d_q).map(|(j, d)| j * d).sum::<f64>() * self.encoder.derivative(w)
            })
            .collect();
        let d_feats = self.map.backward(&feats, &d_mapped, g_map);
        self.layer.accumulate_grad(&unit_grads, &d_feats, g_layer);
        Ok((pred, grad))
    }
}
