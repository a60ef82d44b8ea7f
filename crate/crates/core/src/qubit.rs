//! Dense statevector simulation for small qubit registers.
//!
//! Qubit 0 is the least-significant bit of the basis-state index, so on a
//! two-qubit register `|q1 q0>` the amplitude of `|01>` sits at index 1.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use rand::distr::{Bernoulli, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeded_rng;

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 10;

/// Tolerance on `sum |amp|^2 = 1` for states handed in from outside.
pub const NORM_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliKind {
    I,
    X,
    Y,
    Z,
}

/// A single-qubit gate stored as a row-major 2x2 complex matrix.
#[derive(Clone, Copy, PartialEq)]
pub struct Gate2x2 {
    m: [[Complex64; 2]; 2],
}

impl fmt::Debug for Gate2x2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1]
        )
    }
}

impl Gate2x2 {
    pub const IDENTITY: Gate2x2 = Gate2x2 {
        m: [[ONE, ZERO], [ZERO, ONE]],
    };

    /// Builds a gate from an arbitrary matrix, rejecting non-unitary input.
    pub fn from_matrix(m: [[Complex64; 2]; 2]) -> Result<Self> {
        if m.iter().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("gate matrix has non-finite entries"));
        }
        let gate = Gate2x2 { m };
        let dev = gate.unitarity_deviation();
        if dev > 1e-12 {
            return Err(Error::invalid(format!(
                "gate matrix is not unitary (max |G^dag G - I| = {dev:e})"
            )));
        }
        Ok(gate)
    }

    /// Skips the unitarity check.
    pub const fn from_matrix_unchecked(m: [[Complex64; 2]; 2]) -> Self {
        Gate2x2 { m }
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    pub fn adjoint(&self) -> Gate2x2 {
        let m = &self.m;
        Gate2x2 {
            m: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]],
        }
    }

    /// Largest entrywise modulus of `G^dag G - I`.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = self.adjoint() * *self;
        p.max_deviation(&Gate2x2::IDENTITY)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_deviation(&self, other: &Gate2x2) -> f64 {
        self.m
            .iter()
            .flatten()
            .zip(other.m.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Applies the gate to a single-qubit amplitude pair.
    pub fn act(&self, amp0: Complex64, amp1: Complex64) -> (Complex64, Complex64) {
        (
            self.m[0][0] * amp0 + self.m[0][1] * amp1,
            self.m[1][0] * amp0 + self.m[1][1] * amp1,
        )
    }
}

impl Mul for Gate2x2 {
    type Output = Gate2x2;

    /// Matrix product `self * rhs` (apply `rhs` first, then `self`).
    fn mul(self, rhs: Gate2x2) -> Gate2x2 {
        let a = &self.m;
        let b = &rhs.m;
        let mut m = [[ZERO; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Gate2x2 { m }
    }
}

fn check_angle(theta: f64) -> Result<()> {
    if theta.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("rotation angle must be finite, got {theta}")))
    }
}

/// Rotation about the y axis, `exp(-i theta Y / 2)`.
pub fn ry(theta: f64) -> Result<Gate2x2> {
    check_angle(theta)?;
    let (s, c) = (theta / 2.0).sin_cos();
    Ok(Gate2x2 {
        m: [
            [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        ],
    })
}

/// Rotation about the x axis, `exp(-i theta X / 2)`.
pub fn rx(theta: f64) -> Result<Gate2x2> {
    check_angle(theta)?;
    let (s, c) = (theta / 2.0).sin_cos();
    Ok(Gate2x2 {
        m: [
            [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
            [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
        ],
    })
}

/// Rotation about the z axis, `exp(-i theta Z / 2)`.
pub fn rz(theta: f64) -> Result<Gate2x2> {
    check_angle(theta)?;
    let (s, c) = (theta / 2.0).sin_cos();
    Ok(Gate2x2 {
        m: [
            [Complex64::new(c, -s), ZERO],
            [ZERO, Complex64::new(c, s)],
        ],
    })
}

pub fn pauli(kind: PauliKind) -> Gate2x2 {
    let i = Complex64::new(0.0, 1.0);
    let m = match kind {
        PauliKind::I => [[ONE, ZERO], [ZERO, ONE]],
        PauliKind::X => [[ZERO, ONE], [ONE, ZERO]],
        PauliKind::Y => [[ZERO, -i], [i, ZERO]],
        PauliKind::Z => [[ONE, ZERO], [ZERO, -ONE]],
    };
    Gate2x2 { m }
}

/// Pure state of `num_qubits` qubits as a dense amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
    num_qubits: usize,
}

fn check_register(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(Error::invalid(format!(
            "register size must be in 1..={MAX_QUBITS}, got {num_qubits}"
        )));
    }
    Ok(())
}

impl StateVector {
    /// The all-zeros state `|0...0>`.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_register(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::invalid(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(StateVector { amps, num_qubits })
    }

    /// Wraps an amplitude vector, checking length is a power of two and the
    /// state is normalized within [`NORM_TOLERANCE`].
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::invalid(format!(
                "amplitude vector length {dim} is not a power of two >= 2"
            )));
        }
        let num_qubits = dim.trailing_zeros() as usize;
        check_register(num_qubits)?;
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("amplitudes must be finite"));
        }
        let state = StateVector { amps, num_qubits };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::invalid(format!("state is not normalized (norm^2 = {norm})")));
        }
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    fn check_qubit(&self, index: usize) -> Result<()> {
        if index < self.num_qubits {
            Ok(())
        } else {
            Err(Error::QubitIndex {
                index,
                num_qubits: self.num_qubits,
            })
        }
    }

    /// Applies `gate` to the tensor factor of qubit `target` in place.
    pub fn apply_gate(&mut self, gate: &Gate2x2, target: usize) -> Result<()> {
        self.check_qubit(target)?;
        let stride = 1usize << target;
        for i in 0..self.amps.len() {
            if i & stride == 0 {
                let j = i | stride;
                let (a0, a1) = gate.act(self.amps[i], self.amps[j]);
                self.amps[i] = a0;
                self.amps[j] = a1;
            }
        }
        Ok(())
    }

    /// Consuming variant of [`StateVector::apply_gate`].
    pub fn with_gate(mut self, gate: &Gate2x2, target: usize) -> Result<Self> {
        self.apply_gate(gate, target)?;
        Ok(self)
    }

    /// Flips `target` on every basis state whose `control` bit is set.
    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::invalid("CNOT control and target must differ"));
        }
        let c = 1usize << control;
        let t = 1usize << target;
        for i in 0..self.amps.len() {
            if i & c != 0 && i & t == 0 {
                self.amps.swap(i, i | t);
            }
        }
        Ok(())
    }

    pub fn with_cnot(mut self, control: usize, target: usize) -> Result<Self> {
        self.apply_cnot(control, target)?;
        Ok(self)
    }

    /// Probability that measuring `qubit` yields 1.
    pub fn prob_one(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = 1usize << qubit;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, z)| z.norm_sqr())
            .sum())
    }

    /// `<Z>` on `qubit`, computed as `1 - 2 p1`.
    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        Ok(1.0 - 2.0 * self.prob_one(qubit)?)
    }

    /// Estimates `<Z>` on `qubit` from `shots` seeded Bernoulli draws.
    pub fn sample_shots(&self, qubit: usize, shots: u64, seed: u64) -> Result<f64> {
        if shots == 0 {
            return Err(Error::invalid("shots must be at least 1"));
        }
        let p1 = self.prob_one(qubit)?.clamp(0.0, 1.0);
        let draw = Bernoulli::new(p1).map_err(|e| Error::invalid(e.to_string()))?;
        let mut rng = seeded_rng(seed);
        let ones = (0..shots).filter(|_| draw.sample(&mut rng)).count() as f64;
        let n = shots as f64;
        Ok((n - 2.0 * ones) / n)
    }
}
