//! Brute-force reference implementations.
//!
//! Nothing here calls into the production simulator, ridgelet or pipeline
//! code: gates are rebuilt from Pauli matrices, circuits are multiplied out as
//! full `2^n x 2^n` matrices, and the classical stages are re-derived with
//! plain loops. These routines exist to be compared against the fast paths.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_ORACLE_QUBITS: usize = 10;

type Matrix = Vec<Vec<Complex64>>;

/// One step of a reference circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleOp {
    Rx { theta: f64, target: usize },
    Ry { theta: f64, target: usize },
    Rz { theta: f64, target: usize },
    X { target: usize },
    Y { target: usize },
    Z { target: usize },
    Cnot { control: usize, target: usize },
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pauli_x() -> [[Complex64; 2]; 2] {
    [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]
}

fn pauli_y() -> [[Complex64; 2]; 2] {
    [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]
}

fn pauli_z() -> [[Complex64; 2]; 2] {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]]
}

/// `exp(-i theta P / 2) = cos(theta/2) I - i sin(theta/2) P`
fn rotation(p: [[Complex64; 2]; 2], theta: f64) -> [[Complex64; 2]; 2] {
    let cos = c((theta / 2.0).cos(), 0.0);
    let msin = c(0.0, -(theta / 2.0).sin());
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let id = if i == j { cos } else { c(0.0, 0.0) };
            out[i][j] = id + msin * p[i][j];
        }
    }
    out
}

/// Reference 2x2 matrix for a single-qubit op.
pub fn op_matrix(op: &OracleOp) -> Option<[[Complex64; 2]; 2]> {
    match *op {
        OracleOp::Rx { theta, .. } => Some(rotation(pauli_x(), theta)),
        OracleOp::Ry { theta, .. } => Some(rotation(pauli_y(), theta)),
        OracleOp::Rz { theta, .. } => Some(rotation(pauli_z(), theta)),
        OracleOp::X { .. } => Some(pauli_x()),
        OracleOp::Y { .. } => Some(pauli_y()),
        OracleOp::Z { .. } => Some(pauli_z()),
        OracleOp::Cnot { .. } => None,
    }
}

fn identity(dim: usize) -> Matrix {
    (0..dim)
        .map(|i| (0..dim).map(|j| c(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect()
}

fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (ra, rb) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); ra * rb]; ra * rb];
    for i in 0..ra {
        for j in 0..ra {
            for k in 0..rb {
                for l in 0..rb {
                    out[i * rb + k][j * rb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![c(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

/// Full-register matrix of a single-qubit gate. Qubit 0 is the least
/// significant index bit, so it is the right-most Kronecker factor.
fn embed(gate: [[Complex64; 2]; 2], target: usize, n: usize) -> Matrix {
    let small: Matrix = gate.iter().map(|r| r.to_vec()).collect();
    let mut full = vec![vec![c(1.0, 0.0)]];
    for q in (0..n).rev() {
        let factor = if q == target { small.clone() } else { identity(2) };
        full = kron(&full, &factor);
    }
    full
}

#[allow(clippy::needless_range_loop)]
fn cnot_matrix(control: usize, target: usize, n: usize) -> Matrix {
    let dim = 1 << n;
    let mut m = vec![vec![c(0.0, 0.0); dim]; dim];
    for col in 0..dim {
        let control_bit = (col >> control) & 1;
        let row = if control_bit == 1 { col ^ (1 << target) } else { col };
        m[row][col] = c(1.0, 0.0);
    }
    m
}

fn check_op(op: &OracleOp, n: usize) -> Result<()> {
    let (a, b) = match *op {
        OracleOp::Cnot { control, target } => {
            if control == target {
                return Err(Error::invalid("oracle CNOT needs distinct qubits"));
            }
            (control, target)
        }
        OracleOp::Rx { target, .. }
        | OracleOp::Ry { target, .. }
        | OracleOp::Rz { target, .. }
        | OracleOp::X { target }
        | OracleOp::Y { target }
        | OracleOp::Z { target } => (target, target),
    };
    if a >= n || b >= n {
        return Err(Error::QubitIndex {
            index: a.max(b),
            num_qubits: n,
        });
    }
    Ok(())
}

/// Full unitary of a circuit (`ops[0]` applied first).
pub fn naive_unitary(num_qubits: usize, ops: &[OracleOp]) -> Result<Vec<Vec<Complex64>>> {
    if num_qubits == 0 || num_qubits > MAX_ORACLE_QUBITS {
        return Err(Error::invalid(format!(
            "oracle supports 1..={MAX_ORACLE_QUBITS} qubits, got {num_qubits}"
        )));
    }
    let mut u = identity(1 << num_qubits);
    for op in ops {
        check_op(op, num_qubits)?;
        let m = match *op {
            OracleOp::Cnot { control, target } => cnot_matrix(control, target, num_qubits),
            OracleOp::Rx { target, .. }
            | OracleOp::Ry { target, .. }
            | OracleOp::Rz { target, .. }
            | OracleOp::X { target }
            | OracleOp::Y { target }
            | OracleOp::Z { target } => embed(op_matrix(op).expect("single-qubit op"), target, num_qubits),
        };
        u = matmul(&m, &u);
    }
    Ok(u)
}

/// Final amplitudes of the circuit applied to `|0...0>`.
pub fn naive_amplitudes(num_qubits: usize, ops: &[OracleOp]) -> Result<Vec<Complex64>> {
    let u = naive_unitary(num_qubits, ops)?;
    Ok(u.iter().map(|row| row[0]).collect())
}

/// `<psi| Z_qubit |psi>` for `|psi> = U |0...0>`, via explicit matrices.
pub fn naive_expectation(num_qubits: usize, ops: &[OracleOp], qubit: usize) -> Result<f64> {
    if qubit >= num_qubits {
        return Err(Error::QubitIndex {
            index: qubit,
            num_qubits,
        });
    }
    let psi = naive_amplitudes(num_qubits, ops)?;
    let z = embed(pauli_z(), qubit, num_qubits);
    let mut acc = c(0.0, 0.0);
    for i in 0..psi.len() {
        for j in 0..psi.len() {
            acc += psi[i].conj() * z[i][j] * psi[j];
        }
    }
    Ok(acc.re)
}

/// Central differences `(f(p + h e_i) - f(p - h e_i)) / 2h` per coordinate.
pub fn finite_diff<F>(f: F, params: &[f64], step: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut p = params.to_vec();
    (0..params.len())
        .map(|i| {
            let orig = p[i];
            p[i] = orig + step;
            let plus = f(&p);
            p[i] = orig - step;
            let minus = f(&p);
            p[i] = orig;
            (plus - minus) / (2.0 * step)
        })
        .collect()
}

/// `a^{-1/2} eta((x . u / |u| - b) / a)` with the scale given directly.
pub fn naive_ridgelet(eta: fn(f64) -> f64, u: &[f64], a: f64, b: f64, x: &[f64]) -> f64 {
    let mut norm2 = 0.0;
    let mut dot = 0.0;
    for i in 0..u.len() {
        norm2 += u[i] * u[i];
        dot += x[i] * u[i];
    }
    let t = (dot / norm2.sqrt() - b) / a;
    eta(t) / a.sqrt()
}

pub fn naive_gaussian_derivative(t: f64) -> f64 {
    t * (-(t * t) / 2.0).exp()
}

/// Row-major `W x + b` with an explicit double loop.
pub fn naive_matvec(weights: &[f64], bias: &[f64], x: &[f64]) -> Vec<f64> {
    let mut out = bias.to_vec();
    for r in 0..bias.len() {
        for k in 0..x.len() {
            out[r] += weights[r * x.len() + k] * x[k];
        }
    }
    out
}

/// Result of comparing a fast path against a reference over many samples.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub name: String,
    pub max_deviation: f64,
    pub samples: usize,
    pub tolerance: f64,
    pub passed: bool,
}

impl OracleReport {
    pub fn from_deviations(name: impl Into<String>, deviations: &[f64], tolerance: f64) -> Self {
        let max_deviation = deviations.iter().copied().fold(0.0, |m, d| {
            if d.is_nan() {
                f64::INFINITY
            } else {
                m.max(d.abs())
            }
        });
        OracleReport {
            name: name.into(),
            max_deviation,
            samples: deviations.len(),
            tolerance,
            passed: !deviations.is_empty() && max_deviation <= tolerance,
        }
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: max deviation {:.3e} over {} samples (tolerance {:.0e})",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.max_deviation,
            self.samples,
            self.tolerance
        )
    }
}
