// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Coin operators acting on the `2^n`-dimensional internal register.
//!
//! Basis index `c` is the big-endian bit pattern of the qubits, so `c = 0` is
//! `|0...0>` and `c = 2^n - 1` is `|1...1>`.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Result, WalkError};
use crate::scalar::{c_abs, c_real, c_zero, lit, tol, wide, Real};

/// Largest supported register size for direct evolution.
pub const MAX_QUBITS: usize = 12;

/// A 2x2 single-qubit gate, row-major.
pub type Gate<T> = [[Complex<T>; 2]; 2];

/// The single-qubit Hadamard gate.
pub fn hadamard_gate<T: Real>() -> Gate<T> {
    let h = c_real(T::FRAC_1_SQRT_2());
    [[h, h], [h, -h]]
}

/// Which coin drives the walk.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum CoinSpec<T: Real> {
    /// `H^{⊗n}`.
    #[default]
    Hadamard,
    /// Any unitary `2^n x 2^n` matrix.
    Custom(DMatrix<Complex<T>>),
}

#[derive(Debug, Clone, PartialEq)]
enum CoinKind<T: Real> {
    TensorPower(Gate<T>),
    Dense(DMatrix<Complex<T>>),
}

/// A coin operator on `n` qubits.
///
/// Tensor powers of a single gate are stored factored and applied qubit by
/// qubit in `O(n 2^n)`; arbitrary matrices are applied densely.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinOperator<T: Real> {
    qubits: usize,
    kind: CoinKind<T>,
}

pub(crate) fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(WalkError::QubitCount {
            found: n,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

/// Builds the Hadamard tensor power `H^{⊗n}`.
pub fn build_coin<T: Real>(n: usize) -> Result<CoinOperator<T>> {
    CoinOperator::hadamard(n)
}

impl<T: Real> CoinOperator<T> {
    pub fn hadamard(n: usize) -> Result<Self> {
        check_qubits(n)?;
        Ok(Self {
            qubits: n,
            kind: CoinKind::TensorPower(hadamard_gate()),
        })
    }

    /// Wraps a dense matrix after checking shape and unitarity.
    pub fn from_matrix(matrix: DMatrix<Complex<T>>) -> Result<Self> {
        let op = Self::from_matrix_unchecked(matrix)?;
        let deviation = op.unitarity_deviation();
        if deviation > tol(1e-12) {
            return Err(WalkError::NonUnitaryCoin {
                deviation: wide(deviation),
            });
        }
        Ok(op)
    }

    /// Wraps a dense matrix checking only its shape. Used to build
    /// deliberately broken coins for negative-control validation runs.
    pub fn from_matrix_unchecked(matrix: DMatrix<Complex<T>>) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim {
            return Err(WalkError::DimensionMismatch {
                expected: dim,
                found: matrix.ncols(),
            });
        }
        if dim < 2 || !dim.is_power_of_two() {
            return Err(WalkError::InvalidParameter(format!(
                "coin dimension {dim} is not a power of two >= 2"
            )));
        }
        let qubits = dim.trailing_zeros() as usize;
        check_qubits(qubits)?;
        Ok(Self {
            qubits,
            kind: CoinKind::Dense(matrix),
        })
    }

    pub fn from_spec(n: usize, spec: &CoinSpec<T>) -> Result<Self> {
        match spec {
            CoinSpec::Hadamard => Self::hadamard(n),
            CoinSpec::Custom(m) => {
                let op = Self::from_matrix(m.clone())?;
                if op.qubits != n {
                    return Err(WalkError::DimensionMismatch {
                        expected: 1 << n,
                        found: op.dim(),
                    });
                }
                Ok(op)
            }
        }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    /// True when the operator is the Hadamard tensor power.
    pub fn is_hadamard(&self) -> bool {
        matches!(&self.kind, CoinKind::TensorPower(g) if *g == hadamard_gate())
    }

    /// Matrix element `<row| C |col>`.
    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        match &self.kind {
            CoinKind::TensorPower(g) => {
                let mut acc = c_real(T::one());
                for bit in 0..self.qubits {
                    acc *= g[(row >> bit) & 1][(col >> bit) & 1];
                }
                acc
            }
            CoinKind::Dense(m) => m[(row, col)],
        }
    }

    /// Dense `2^n x 2^n` matrix.
    pub fn matrix(&self) -> DMatrix<Complex<T>> {
        match &self.kind {
            CoinKind::Dense(m) => m.clone(),
            CoinKind::TensorPower(_) => {
                let d = self.dim();
                DMatrix::from_fn(d, d, |r, c| self.entry(r, c))
            }
        }
    }

    /// `max |(C C^dagger - I)_{ij}|`.
    pub fn unitarity_deviation(&self) -> T {
        let m = self.matrix();
        let prod = &m * m.adjoint();
        let mut worst = T::zero();
        for r in 0..prod.nrows() {
            for c in 0..prod.ncols() {
                let target = if r == c { c_real(T::one()) } else { c_zero() };
                worst = worst.max(c_abs(prod[(r, c)] - target));
            }
        }
        worst
    }

    /// Left-multiplies a single coin vector in place. `scratch` must have
    /// length `2^n`; it is only touched for dense coins.
    pub fn apply_vector(&self, amps: &mut [Complex<T>], scratch: &mut [Complex<T>]) {
        debug_assert_eq!(amps.len(), self.dim());
        match &self.kind {
            CoinKind::TensorPower(g) => apply_gate_to_every_qubit(g, self.qubits, amps),
            CoinKind::Dense(m) => {
                let d = self.dim();
                for (r, out) in scratch.iter_mut().enumerate().take(d) {
                    let mut acc = c_zero();
                    for (c, a) in amps.iter().enumerate() {
                        acc += m[(r, c)] * *a;
                    }
                    *out = acc;
                }
                amps.copy_from_slice(&scratch[..d]);
            }
        }
    }
}

/// Applies the same 2x2 gate to each of the `qubits` tensor slots of `amps`.
pub fn apply_gate_to_every_qubit<T: Real>(gate: &Gate<T>, qubits: usize, amps: &mut [Complex<T>]) {
    let d = 1usize << qubits;
    debug_assert_eq!(amps.len(), d);
    for bit in 0..qubits {
        let stride = 1usize << bit;
        for base in (0..d).step_by(2 * stride) {
            for i in base..base + stride {
                let a0 = amps[i];
                let a1 = amps[i + stride];
                amps[i] = gate[0][0] * a0 + gate[0][1] * a1;
                amps[i + stride] = gate[1][0] * a0 + gate[1][1] * a1;
            }
        }
    }
}

/// Hadamard tensor power entry `2^{-n/2} (-1)^{popcount(row & col)}`,
/// computed without building any operator.
pub fn hadamard_power_entry<T: Real>(qubits: usize, row: usize, col: usize) -> T {
    let scale = lit::<T>(2.0).powi(-(qubits as i32)).sqrt();
    if (row & col).count_ones() % 2 == 0 {
        scale
    } else {
        -scale
    }
}
