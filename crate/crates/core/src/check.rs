//! Self-check suite: fast production paths against the brute-force
//! references in [`crate::oracle`].
//!
//! The gate-level checks take the `R_y` constructor as a parameter so a
//! deliberately broken implementation can be plugged in to confirm the
//! suite notices.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::oracle::{
    finite_diff, naive_expectation, naive_gaussian_derivative, naive_ridgelet, op_matrix, OracleOp,
    OracleReport,
};
use crate::qrnn::{prob_one_closed, QrnnSingleQubit};
use crate::qubit::{pauli, rx, ry, rz, Gate2x2, PauliKind, StateVector};
use crate::ridgelet::{MotherRidgelet, RidgeletLayer};
use crate::training::{batch_loss_grad, Trainable};
use crate::vqc::{ModelConfig, QrnnModel, VqcParams};
use crate::{seeded_rng, Rng as CrateRng};

/// Signature of an `R_y` constructor under test.
pub type RyFn<'a> = &'a dyn Fn(f64) -> Result<Gate2x2>;

/// Tolerance for exact algebraic identities.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Tolerance for entrywise gate identities.
pub const GATE_TOL: f64 = 1e-12;
/// Relative tolerance for gradients against central differences.
pub const GRADIENT_REL_TOL: f64 = 1e-4;
/// Central-difference step.
pub const FD_STEP: f64 = 1e-5;

fn failed(name: &str, tolerance: f64) -> OracleReport {
    OracleReport {
        name: name.to_string(),
        max_deviation: f64::INFINITY,
        samples: 0,
        tolerance,
        passed: false,
    }
}

fn collect(name: &str, tolerance: f64, devs: Result<Vec<f64>>) -> OracleReport {
    match devs {
        Ok(d) => OracleReport::from_deviations(name, &d, tolerance),
        Err(_) => failed(name, tolerance),
    }
}

fn simulate_single(gates: &[Gate2x2]) -> Result<StateVector> {
    let mut s = StateVector::zero(1)?;
    for g in gates {
        s.apply_gate(g, 0)?;
    }
    Ok(s)
}

fn random_qrnn(rng: &mut CrateRng, max_units: usize, input_dim: usize) -> Result<QrnnSingleQubit> {
    let j = rng.random_range(1..=max_units);
    let mother = if rng.random_bool(0.5) {
        MotherRidgelet::GaussianDerivative
    } else {
        MotherRidgelet::Tanh
    };
    let mut layer = RidgeletLayer::random(input_dim, j, mother, rng)?;
    for u in layer.units_mut() {
        u.log_scale = rng.random_range(-1.0..1.0);
        for d in &mut u.direction {
            *d *= rng.random_range(0.5..2.0);
        }
    }
    let weights = (0..j).map(|_| rng.random_range(-2.0..2.0)).collect();
    QrnnSingleQubit::new(layer, weights)
}

fn random_input(rng: &mut CrateRng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect()
}

/// `R_y(theta)` against the reference matrix and against `(cos theta/2, sin theta/2)` on `|0>`.
pub fn ry_reference(ry_fn: RyFn, samples: usize, seed: u64) -> OracleReport {
    let mut rng = seeded_rng(seed);
    let devs = (0..samples)
        .map(|_| {
            let theta = rng.random_range(-4.0 * PI..4.0 * PI);
            let gate = ry_fn(theta)?;
            let reference = op_matrix(&OracleOp::Ry { theta, target: 0 }).expect("single-qubit op");
            let mut dev: f64 = 0.0;
            for (i, row) in reference.iter().enumerate() {
                for (j, r) in row.iter().enumerate() {
                    dev = dev.max((gate.entry(i, j) - r).norm());
                }
            }
            let s = simulate_single(&[gate])?;
            let (sin, cos) = (theta / 2.0).sin_cos();
            dev = dev.max((s.amplitudes()[0].re - cos).abs());
            dev = dev.max((s.amplitudes()[1].re - sin).abs());
            Ok(dev)
        })
        .collect();
    collect("R_y matrix and encoded amplitudes", GATE_TOL, devs)
}

/// `R_y(a) R_y(b) = R_y(a + b)` entrywise.
pub fn rotation_additivity(ry_fn: RyFn, samples: usize, seed: u64) -> OracleReport {
    let mut rng = seeded_rng(seed);
    let devs = (0..samples)
        .map(|_| {
            let a = rng.random_range(-10.0..10.0);
            let b = rng.random_range(-10.0..10.0);
            Ok((ry_fn(a)? * ry_fn(b)?).max_deviation(&ry_fn(a + b)?))
        })
        .collect();
    collect("R_y angle additivity", GATE_TOL, devs)
}

/// Shuffling the order of eight unit rotations leaves `<Z>` unchanged.
pub fn permutation_invariance(ry_fn: RyFn, samples: usize, seed: u64) -> OracleReport {
    let mut rng = seeded_rng(seed);
    let devs = (0..samples)
        .map(|_| {
            let mut angles: Vec<f64> = (0..8).map(|_| rng.random_range(-3.0..3.0)).collect();
            let gates = |angles: &[f64]| angles.iter().map(|&a| ry_fn(a)).collect::<Result<Vec<_>>>();
            let before = simulate_single(&gates(&angles)?)?.expectation_z(0)?;
            angles.shuffle(&mut rng);
            let after = simulate_single(&gates(&angles)?)?.expectation_z(0)?;
            Ok(before - after)
        })
        .collect();
    collect("commuting R_y product order", IDENTITY_TOL, devs)
}

/// `cos(2 g_J(x))` against `<Z>` of the simulated product of unit gates.
pub fn closed_form_identity(ry_fn: RyFn, samples: usize, seed: u64) -> OracleReport {
    let mut rng = seeded_rng(seed);
    let devs = (0..samples)
        .map(|_| {
            let model = random_qrnn(&mut rng, 16, 8)?;
            let x = random_input(&mut rng, 8);
            let mother = model.layer().mother();
            let gates = model
                .layer()
                .units()
                .iter()
                .zip(model.weights())
                .map(|(u, c)| ry_fn(2.0 * c * u.eval(mother, &x)?))
                .collect::<Result<Vec<_>>>()?;
            let simulated = simulate_single(&gates)?.expectation_z(0)?;
            let collapsed = model.unitary(&x)?;
            let product = model.unitary_by_product(&x)?;
            let gate_dev = collapsed.max_deviation(&product);
            Ok((model.forward(&x)? - simulated).abs().max(gate_dev))
        })
        .collect();
    collect("closed form cos(2 g_J) vs simulated <Z>", IDENTITY_TOL, devs)
}

/// `sin^2(c eta(x))` against the simulated probability of `|1>`.
pub fn probability_identity(ry_fn: RyFn, samples: usize, seed: u64) -> OracleReport {
    let mut rng = seeded_rng(seed);
    let devs = (0..samples)
        .map(|_| {
            let model = random_qrnn(&mut rng, 1, 8)?;
            let x = random_input(&mut rng, 8);
            let mother = model.layer().mother();
            let unit = &model.layer().units()[0];
            let c = model.weights()[0];
            let closed = prob_one_closed(mother, unit, c, &x)?;
            let s = simulate_single(&[ry_fn(2.0 * c * unit.eval(mother, &x)?)?])?;
            Ok(closed - s.prob_one(0)?)
        })
        .collect();
    collect("p1 closed form sin^2 vs simulator", IDENTITY_TOL, devs)
}

fn random_op(rng: &mut CrateRng, n: usize) -> OracleOp {
    let target = rng.random_range(0..n);
    let theta = rng.random_range(-2.0 * PI..2.0 * PI);
    match rng.random_range(0..7) {
        0 => OracleOp::Rx { theta, target },
        1 => OracleOp::Ry { theta, target },
        2 => OracleOp::Rz { theta, target },
        3 => OracleOp::X { target },
        4 => OracleOp::Y { target },
        5 => OracleOp::Z { target },
        _ if n > 1 => {
            let control = (target + rng.random_range(1..n)) % n;
            OracleOp::Cnot { control, target }
        }
        _ => OracleOp::Ry { theta, target },
    }
}

fn apply_op(state: &mut StateVector, op: &OracleOp, ry_fn: RyFn) -> Result<()> {
    match *op {
        OracleOp::Rx { theta, target } => state.apply_gate(&rx(theta)?, target),
        OracleOp::Ry { theta, target } => state.apply_gate(&ry_fn(theta)?, target),
        OracleOp::Rz { theta, target } => state.apply_gate(&rz(theta)?, target),
        OracleOp::X { target } => state.apply_gate(&pauli(PauliKind::X), target),
        OracleOp::Y { target } => state.apply_gate(&pauli(PauliKind::Y), target),
        OracleOp::Z { target } => state.apply_gate(&pauli(PauliKind::Z), target),
        OracleOp::Cnot { control, target } => state.apply_cnot(control, target),
    }
}

/// Random 1-4 qubit circuits: statevector `<Z_q>` against full-matrix multiplication.
pub fn simulator_vs_oracle(ry_fn: RyFn, samples: usize, seed: u64) -> OracleReport {
    let mut rng = seeded_rng(seed);
    let devs = (0..samples)
        .map(|_| {
            let n = rng.random_range(1..=4);
            let len = rng.random_range(1..=20);
            let ops: Vec<OracleOp> = (0..len).map(|_| random_op(&mut rng, n)).collect();
            let mut state = StateVector::zero(n)?;
            for op in &ops {
                apply_op(&mut state, op, ry_fn)?;
            }
            let mut dev: f64 = (state.norm_sqr() - 1.0).abs();
            for q in 0..n {
                dev = dev.max((state.expectation_z(q)? - naive_expectation(n, &ops, q)?).abs());
            }
            Ok(dev)
        })
        .collect();
    collect("statevector vs full-matrix circuits", GATE_TOL, devs)
}

/// Relative error of a gradient estimate: the largest coordinate difference
/// divided by the largest coordinate magnitude. Scaling by the whole vector
/// keeps coordinates that are nearly zero from amplifying finite-difference
/// rounding noise; [`GRADIENT_FLOOR`] does the same for a gradient that
/// vanishes as a whole.
pub fn gradient_relative_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    let diff = analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| (a - n).abs())
        .fold(0.0, f64::max);
    let scale = analytic
        .iter()
        .chain(numeric)
        .map(|v| v.abs())
        .fold(GRADIENT_FLOOR, f64::max);
    diff / scale
}

/// Smallest gradient scale used as a denominator.
pub const GRADIENT_FLOOR: f64 = 1e-6;

fn gradient_case<M: Trainable + Clone>(model: &M, xs: &[Vec<f64>], ys: &[f64]) -> Result<f64> {
    let refs: Vec<&[f64]> = xs.iter().map(Vec::as_slice).collect();
    let (_, analytic) = batch_loss_grad(model, &refs, ys)?;
    let loss_at = |p: &[f64]| {
        let mut m = model.clone();
        m.set_params(p).expect("same length");
        let mut sum = 0.0;
        for (x, y) in xs.iter().zip(ys) {
            let e = m.predict(x).expect("valid input") - y;
            sum += e * e;
        }
        sum / ys.len() as f64
    };
    let numeric = finite_diff(loss_at, &model.params(), FD_STEP);
    Ok(gradient_relative_error(&analytic, &numeric))
}

/// Pipeline gradients (parameter shift for circuit angles, chain rule elsewhere)
/// against central differences on random models cycling through
/// `qubits in {1, 2}` and `layers in {1, 6}`.
pub fn pipeline_gradients(samples: usize, seed: u64) -> OracleReport {
    let mut rng = seeded_rng(seed);
    let shapes = [(1, 1), (1, 6), (2, 1), (2, 6)];
    let devs = (0..samples)
        .map(|k| {
            let (qubits, layers) = shapes[k % shapes.len()];
            let config = ModelConfig {
                qubits,
                vqc_layers: layers,
                mother: if k % 3 == 2 {
                    MotherRidgelet::Tanh
                } else {
                    MotherRidgelet::GaussianDerivative
                },
                ..ModelConfig::default()
            };
            let e = 8;
            let mut model = QrnnModel::random(&config, e, rng.random())?;
            let mut p = model.params();
            for v in &mut p {
                *v += rng.random_range(-0.3..0.3);
            }
            model.set_params(&p)?;
            let xs: Vec<Vec<f64>> = (0..3).map(|_| (0..e).map(|_| rng.random_range(0.0..1.0)).collect()).collect();
            let ys: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            gradient_case(&model, &xs, &ys)
        })
        .collect();
    collect("parameter-shift pipeline gradient vs finite differences", GRADIENT_REL_TOL, devs)
}

/// Closed-form single-qubit gradient against central differences.
pub fn closed_form_gradients(samples: usize, seed: u64) -> OracleReport {
    let mut rng = seeded_rng(seed);
    let devs = (0..samples)
        .map(|_| {
            let model = random_qrnn(&mut rng, 8, 4)?;
            let x = random_input(&mut rng, 4);
            let grad = model.grad_forward(&x)?;
            let mut analytic = Vec::new();
            model.layer().write_params(&mut Vec::new());
            let mut unit_part = vec![0.0; model.layer().param_count()];
            let ones = vec![1.0; grad.units.len()];
            model.layer().accumulate_grad(&grad.units, &ones, &mut unit_part);
            analytic.extend(unit_part);
            analytic.extend(&grad.weights);

            let mut flat = Vec::new();
            model.layer().write_params(&mut flat);
            let n_layer = flat.len();
            flat.extend_from_slice(model.weights());
            let f = |p: &[f64]| {
                let mut m = model.clone();
                m.layer_mut().read_params(&p[..n_layer]);
                m.weights_mut().copy_from_slice(&p[n_layer..]);
                m.forward(&x).expect("valid input")
            };
            let numeric = finite_diff(f, &flat, FD_STEP);
            Ok(gradient_relative_error(&analytic, &numeric))
        })
        .collect();
    collect("closed-form cos(2 g_J) gradient vs finite differences", 1e-5, devs)
}

/// Single-qubit circuits with every `R_z` angle zero: `<Z> = cos(total R_y angle)`,
/// so each parameter-shift derivative must equal `-sin(total)`.
pub fn param_shift_vs_analytic(samples: usize, seed: u64) -> OracleReport {
    let mut rng = seeded_rng(seed);
    let devs = (0..samples)
        .map(|_| {
            let layers = rng.random_range(1..=6);
            let mut params = VqcParams::zeros(layers, 1)?;
            for l in 0..layers {
                let i = params.index(l, 0, 0);
                params.theta_mut()[i] = rng.random_range(-PI..PI);
            }
            let angle = rng.random_range(-PI..PI);
            let total: f64 = angle + (0..layers).map(|l| params.theta()[params.index(l, 0, 0)]).sum::<f64>();
            let jac = params.param_shift(&[angle])?;
            let expect = -total.sin();
            let mut dev = (jac.d_angles[0][0] - expect).abs();
            for l in 0..layers {
                dev = dev.max((jac.d_theta[params.index(l, 0, 0)][0] - expect).abs());
            }
            Ok(dev)
        })
        .collect();
    collect("parameter shift vs analytic -sin on R_y circuits", IDENTITY_TOL, devs)
}

/// Sampled `<Z>` against exact `<Z>` on random circuits; the bound is `5 / sqrt(shots)`.
pub fn shot_convergence(samples: usize, shots: u64, seed: u64) -> OracleReport {
    let mut rng = seeded_rng(seed);
    let devs = (0..samples)
        .map(|k| {
            let qubits = 1 + k % 2;
            let params = VqcParams::random(rng.random_range(1..=6), qubits, &mut rng)?;
            let angles: Vec<f64> = (0..qubits).map(|_| rng.random_range(0.0..PI)).collect();
            let exact = params.forward(&angles, None, 0)?;
            let sampled = params.forward(&angles, Some(shots), seed.wrapping_add(k as u64))?;
            Ok(exact
                .iter()
                .zip(&sampled)
                .map(|(e, s)| (e - s).abs())
                .fold(0.0, f64::max))
        })
        .collect();
    collect("shot-sampled <Z> vs exact", 5.0 / (shots as f64).sqrt(), devs)
}

/// Direct ridgelet evaluation against a plain-loop reimplementation.
pub fn ridgelet_reference(samples: usize, seed: u64) -> OracleReport {
    let mut rng = seeded_rng(seed);
    let devs = (0..samples)
        .map(|_| {
            let model = random_qrnn(&mut rng, 16, 8)?;
            let x = random_input(&mut rng, 8);
            let layer = model.layer();
            if layer.mother() != MotherRidgelet::GaussianDerivative {
                return Ok(0.0);
            }
            let mut naive = 0.0;
            for (u, c) in layer.units().iter().zip(model.weights()) {
                naive += c * naive_ridgelet(naive_gaussian_derivative, &u.direction, u.scale(), u.shift, &x);
            }
            Ok(model.expansion(&x)? - naive)
        })
        .collect();
    collect("ridgelet expansion vs naive summation", IDENTITY_TOL, devs)
}

/// Every check at its default sample count.
pub fn run_all() -> Vec<OracleReport> {
    run_all_with(&ry)
}

pub fn run_all_with(ry_fn: RyFn) -> Vec<OracleReport> {
    vec![
        ry_reference(ry_fn, 200, 1),
        rotation_additivity(ry_fn, 1000, 2),
        permutation_invariance(ry_fn, 200, 3),
        closed_form_identity(ry_fn, 1000, 4),
        probability_identity(ry_fn, 100, 5),
        simulator_vs_oracle(ry_fn, 500, 6),
        ridgelet_reference(200, 7),
        closed_form_gradients(50, 8),
        param_shift_vs_analytic(100, 9),
        pipeline_gradients(12, 10),
    ]
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;

    #[test]
    fn default_suite_passes() {
        for report in run_all() {
            assert!(report.passed, "{report}");
        }
    }

    #[test]
    fn flipped_ry_sign_is_caught() {
        // R_y(-theta) still satisfies additivity and the cos/sin^2 identities,
        // but not the reference matrix or the mixed-gate circuits.
        let broken = |theta: f64| -> Result<Gate2x2> {
            let (s, c) = (theta / 2.0).sin_cos();
            Ok(Gate2x2::from_matrix_unchecked([
                [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
                [Complex64::new(-s, 0.0), Complex64::new(c, 0.0)],
            ]))
        };
        let reports = run_all_with(&broken);
        assert!(reports.iter().any(|r| !r.passed));
        assert!(!ry_reference(&broken, 50, 1).passed);
    }

    #[test]
    fn relative_error_is_scaled_by_largest_entry() {
        assert_eq!(gradient_relative_error(&[0.0], &[0.0]), 0.0);
        assert!((gradient_relative_error(&[1.0, 1e-9], &[1.001, 2e-9]) - 0.001 / 1.001).abs() < 1e-12);
    }
}
