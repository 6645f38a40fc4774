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

//! Walker wavefunctions on a finite window of the integer lattice.

use num_complex::Complex;
use rayon::prelude::*;

use crate::coin::{check_qubits, CoinOperator, MAX_QUBITS};
use crate::error::{Result, WalkError};
use crate::scalar::{c_abs, c_real, c_zero, lit, tol, wide, Real};

/// States at least this large apply the coin across positions in parallel.
const PARALLEL_MIN_AMPLITUDES: usize = 1 << 15;

/// Coin register state placed at a single lattice site at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialStateSpec<T: Real> {
    coin_amplitudes: Vec<Complex<T>>,
    origin: i64,
}

impl<T: Real> InitialStateSpec<T> {
    /// `(|0...0> + |1...1>) / sqrt(2)` at the origin: a Bell state for two
    /// qubits, GHZ for more.
    pub fn ghz(qubits: usize) -> Result<Self> {
        check_qubits(qubits)?;
        let d = 1usize << qubits;
        let mut amps = vec![c_zero(); d];
        amps[0] = c_real(T::FRAC_1_SQRT_2());
        amps[d - 1] = c_real(T::FRAC_1_SQRT_2());
        Ok(Self {
            coin_amplitudes: amps,
            origin: 0,
        })
    }

    /// `(|0...0> + e^{i theta} |1...1>) / sqrt(2)`.
    pub fn ghz_with_phase(qubits: usize, theta: T) -> Result<Self> {
        let mut s = Self::ghz(qubits)?;
        let d = s.coin_amplitudes.len();
        s.coin_amplitudes[d - 1] = crate::scalar::cis(theta).scale(T::FRAC_1_SQRT_2());
        Ok(s)
    }

    /// Validates length (a power of two) and unit norm within `1e-12`.
    pub fn new(coin_amplitudes: Vec<Complex<T>>, origin: i64) -> Result<Self> {
        let len = coin_amplitudes.len();
        if len < 2 || !len.is_power_of_two() || len > 1 << MAX_QUBITS {
            return Err(WalkError::InvalidInitialState(format!(
                "{len} coin amplitudes; need 2^n with 1 <= n <= {MAX_QUBITS}"
            )));
        }
        let norm_sqr = coin_amplitudes
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr());
        let norm = norm_sqr.sqrt();
        if (norm - T::one()).abs() > tol(1e-12) {
            return Err(WalkError::InvalidInitialState(format!(
                "coin amplitudes have norm {}, expected 1",
                wide(norm)
            )));
        }
        Ok(Self {
            coin_amplitudes,
            origin,
        })
    }

    /// Like [`InitialStateSpec::new`] but rescales to unit norm first.
    pub fn normalized(coin_amplitudes: Vec<Complex<T>>, origin: i64) -> Result<Self> {
        let norm = coin_amplitudes
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt();
        if norm <= T::zero() {
            return Err(WalkError::InvalidInitialState(
                "coin amplitudes are all zero".into(),
            ));
        }
        let inv = T::one() / norm;
        Self::new(
            coin_amplitudes.into_iter().map(|z| z.scale(inv)).collect(),
            origin,
        )
    }

    pub fn with_origin(mut self, origin: i64) -> Self {
        self.origin = origin;
        self
    }

    pub fn qubits(&self) -> usize {
        self.coin_amplitudes.len().trailing_zeros() as usize
    }

    pub fn coin_amplitudes(&self) -> &[Complex<T>] {
        &self.coin_amplitudes
    }

    pub fn origin(&self) -> i64 {
        self.origin
    }
}

/// Amplitudes `psi(x, c)` over positions `origin - half_width ..= origin + half_width`
/// and coin indices `0 .. 2^n`, stored position-major.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real> {
    qubits: usize,
    origin: i64,
    half_width: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// All-zero state on the window `origin ± half_width`.
    pub fn zeros(qubits: usize, origin: i64, half_width: usize) -> Result<Self> {
        check_qubits(qubits)?;
        let len = (2 * half_width + 1) << qubits;
        Ok(Self {
            qubits,
            origin,
            half_width,
            amplitudes: vec![c_zero(); len],
        })
    }

    /// The initial state placed at its origin, with room for `half_width`
    /// steps in either direction.
    pub fn localized(init: &InitialStateSpec<T>, half_width: usize) -> Self {
        let mut s = Self::zeros(init.qubits(), init.origin(), half_width)
            .expect("initial state already validated");
        let d = s.coin_dim();
        let start = half_width * d;
        s.amplitudes[start..start + d].copy_from_slice(init.coin_amplitudes());
        s
    }

    /// Wraps raw position-major amplitudes.
    pub fn from_amplitudes(
        qubits: usize,
        origin: i64,
        half_width: usize,
        amplitudes: Vec<Complex<T>>,
    ) -> Result<Self> {
        check_qubits(qubits)?;
        let expected = (2 * half_width + 1) << qubits;
        if amplitudes.len() != expected {
            return Err(WalkError::DimensionMismatch {
                expected,
                found: amplitudes.len(),
            });
        }
        Ok(Self {
            qubits,
            origin,
            half_width,
            amplitudes,
        })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn coin_dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn num_positions(&self) -> usize {
        2 * self.half_width + 1
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn origin(&self) -> i64 {
        self.origin
    }

    /// Lattice position of array row 0.
    pub fn position_offset(&self) -> i64 {
        self.origin - self.half_width as i64
    }

    pub fn positions(&self) -> std::ops::RangeInclusive<i64> {
        let lo = self.position_offset();
        lo..=lo + 2 * self.half_width as i64
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amplitudes
    }

    fn row_index(&self, x: i64) -> Option<usize> {
        let idx = x - self.position_offset();
        (0..self.num_positions() as i64)
            .contains(&idx)
            .then_some(idx as usize)
    }

    /// Coin vector at position `x`, or `None` outside the window.
    pub fn row(&self, x: i64) -> Option<&[Complex<T>]> {
        let d = self.coin_dim();
        self.row_index(x).map(|i| &self.amplitudes[i * d..(i + 1) * d])
    }

    /// Rows paired with their lattice positions.
    pub fn rows(&self) -> impl Iterator<Item = (i64, &[Complex<T>])> + '_ {
        let lo = self.position_offset();
        self.amplitudes
            .chunks_exact(self.coin_dim())
            .enumerate()
            .map(move |(i, r)| (lo + i as i64, r))
    }

    /// `psi(x, c)`; zero outside the window.
    pub fn amplitude(&self, x: i64, c: usize) -> Complex<T> {
        self.row(x).map_or_else(c_zero, |r| r[c])
    }

    pub fn set_amplitude(&mut self, x: i64, c: usize, value: Complex<T>) -> Result<()> {
        let d = self.coin_dim();
        if c >= d {
            return Err(WalkError::DimensionMismatch {
                expected: d,
                found: c + 1,
            });
        }
        let i = self
            .row_index(x)
            .ok_or(WalkError::BoundaryOverflow { position: x })?;
        self.amplitudes[i * d + c] = value;
        Ok(())
    }

    /// `sum |psi(x, c)|^2`.
    pub fn norm_sqr(&self) -> T {
        self.amplitudes
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    /// Left-multiplies every position's coin vector by `coin`.
    pub fn apply_coin(&mut self, coin: &CoinOperator<T>) -> Result<()> {
        let d = self.coin_dim();
        if coin.dim() != d {
            return Err(WalkError::DimensionMismatch {
                expected: d,
                found: coin.dim(),
            });
        }
        if self.amplitudes.len() >= PARALLEL_MIN_AMPLITUDES {
            self.amplitudes.par_chunks_exact_mut(d).for_each_init(
                || vec![c_zero(); d],
                |scratch, row| coin.apply_vector(row, scratch),
            );
        } else {
            let mut scratch = vec![c_zero(); d];
            for row in self.amplitudes.chunks_exact_mut(d) {
                coin.apply_vector(row, &mut scratch);
            }
        }
        Ok(())
    }

    /// Conditional shift: `|0...0>` moves right, `|1...1>` moves left, every
    /// other coin state stays put. Errors if amplitude would leave the window.
    pub fn apply_shift(&mut self) -> Result<()> {
        self.shift_by(1)
    }

    /// Inverse of [`StateVector::apply_shift`].
    pub fn apply_inverse_shift(&mut self) -> Result<()> {
        self.shift_by(-1)
    }

    fn shift_by(&mut self, dir: i64) -> Result<()> {
        let d = self.coin_dim();
        let rows = self.num_positions();
        let (right, left) = if dir > 0 { (0, d - 1) } else { (d - 1, 0) };
        let zero = c_zero();
        // Component moving towards higher positions.
        if self.amplitudes[(rows - 1) * d + right] != zero {
            return Err(WalkError::BoundaryOverflow {
                position: self.position_offset() + rows as i64,
            });
        }
        if self.amplitudes[left] != zero {
            return Err(WalkError::BoundaryOverflow {
                position: self.position_offset() - 1,
            });
        }
        for i in (1..rows).rev() {
            self.amplitudes[i * d + right] = self.amplitudes[(i - 1) * d + right];
        }
        self.amplitudes[right] = zero;
        for i in 0..rows - 1 {
            self.amplitudes[i * d + left] = self.amplitudes[(i + 1) * d + left];
        }
        self.amplitudes[(rows - 1) * d + left] = zero;
        Ok(())
    }

    /// Largest per-amplitude difference, aligning the two windows by
    /// lattice position (amplitudes outside a window count as zero).
    pub fn max_abs_diff(&self, other: &StateVector<T>) -> Result<T> {
        if self.qubits != other.qubits {
            return Err(WalkError::DimensionMismatch {
                expected: self.coin_dim(),
                found: other.coin_dim(),
            });
        }
        let lo = self.position_offset().min(other.position_offset());
        let hi = (*self.positions().end()).max(*other.positions().end());
        let mut worst = T::zero();
        for x in lo..=hi {
            for c in 0..self.coin_dim() {
                worst = worst.max(c_abs(self.amplitude(x, c) - other.amplitude(x, c)));
            }
        }
        Ok(worst)
    }

    /// Converts the amplitudes to another scalar type.
    pub fn cast<U: Real>(&self) -> StateVector<U> {
        StateVector {
            qubits: self.qubits,
            origin: self.origin,
            half_width: self.half_width,
            amplitudes: self
                .amplitudes
                .iter()
                .map(|z| Complex::new(lit(wide(z.re)), lit(wide(z.im))))
                .collect(),
        }
    }
}
