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

//! Direct time evolution: `T` repetitions of coin-then-shift.

use crate::coin::{check_qubits, CoinOperator, CoinSpec};
use crate::error::{Result, WalkError};
use crate::scalar::Real;
use crate::state::{InitialStateSpec, StateVector};

/// Register size, step count, initial state and coin of one walk.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkConfig<T: Real> {
    qubits: usize,
    steps: usize,
    initial_state: InitialStateSpec<T>,
    coin: CoinSpec<T>,
}

impl<T: Real> WalkConfig<T> {
    /// Hadamard-power coin, GHZ initial state at the origin.
    pub fn new(qubits: usize, steps: usize) -> Result<Self> {
        check_qubits(qubits)?;
        Ok(Self {
            qubits,
            steps,
            initial_state: InitialStateSpec::ghz(qubits)?,
            coin: CoinSpec::Hadamard,
        })
    }

    pub fn with_initial_state(mut self, initial_state: InitialStateSpec<T>) -> Result<Self> {
        if initial_state.qubits() != self.qubits {
            return Err(WalkError::DimensionMismatch {
                expected: 1 << self.qubits,
                found: initial_state.coin_amplitudes().len(),
            });
        }
        self.initial_state = initial_state;
        Ok(self)
    }

    pub fn with_coin(mut self, coin: CoinSpec<T>) -> Result<Self> {
        CoinOperator::from_spec(self.qubits, &coin)?;
        self.coin = coin;
        Ok(self)
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn coin_dim(&self) -> usize {
        1 << self.qubits
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn initial_state(&self) -> &InitialStateSpec<T> {
        &self.initial_state
    }

    pub fn coin(&self) -> &CoinSpec<T> {
        &self.coin
    }

    pub fn coin_operator(&self) -> Result<CoinOperator<T>> {
        CoinOperator::from_spec(self.qubits, &self.coin)
    }
}

/// A walk in progress. The window is sized for `config.steps()` steps, so
/// states at every intermediate time share the same lattice range.
#[derive(Debug, Clone)]
pub struct Walk<T: Real> {
    coin: CoinOperator<T>,
    state: StateVector<T>,
    steps_taken: usize,
}

impl<T: Real> Walk<T> {
    pub fn new(config: &WalkConfig<T>) -> Result<Self> {
        Ok(Self::with_coin(
            config.coin_operator()?,
            StateVector::localized(config.initial_state(), config.steps()),
        ))
    }

    /// Starts from an arbitrary state with a prebuilt (possibly unchecked) coin.
    pub fn with_coin(coin: CoinOperator<T>, state: StateVector<T>) -> Self {
        Self {
            coin,
            state,
            steps_taken: 0,
        }
    }

    pub fn state(&self) -> &StateVector<T> {
        &self.state
    }

    pub fn into_state(self) -> StateVector<T> {
        self.state
    }

    pub fn steps_taken(&self) -> usize {
        self.steps_taken
    }

    /// One application of shift ∘ coin.
    pub fn step(&mut self) -> Result<()> {
        self.state.apply_coin(&self.coin)?;
        self.state.apply_shift()?;
        self.steps_taken += 1;
        Ok(())
    }
}

/// The state after `config.steps()` applications of shift ∘ coin.
pub fn evolve<T: Real>(config: &WalkConfig<T>) -> Result<StateVector<T>> {
    let mut walk = Walk::new(config)?;
    for _ in 0..config.steps() {
        walk.step()?;
    }
    Ok(walk.into_state())
}

/// Out-of-place coin application.
pub fn apply_coin<T: Real>(state: &StateVector<T>, coin: &CoinOperator<T>) -> Result<StateVector<T>> {
    let mut out = state.clone();
    out.apply_coin(coin)?;
    Ok(out)
}

/// Out-of-place conditional shift.
pub fn apply_shift<T: Real>(state: &StateVector<T>) -> Result<StateVector<T>> {
    let mut out = state.clone();
    out.apply_shift()?;
    Ok(out)
}
