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

use thiserror::Error;

pub type Result<T, E = WalkError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    #[error("qubit count {found} outside supported range 1..={max}")]
    QubitCount { found: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid initial state: {0}")]
    InvalidInitialState(String),

    #[error("coin operator is not unitary (max |C C^dagger - I| = {deviation:e})")]
    NonUnitaryCoin { deviation: f64 },

    #[error("shift moved amplitude past the allocated lattice edge at position {position}")]
    BoundaryOverflow { position: i64 },

    #[error("momentum grid of {points} points cannot resolve {required} lattice sites")]
    GridTooCoarse { points: usize, required: usize },

    #[error("spectral consistency failure in {formula} at k = {k}: residual {residual:e}")]
    SpectralConsistency {
        formula: &'static str,
        k: f64,
        residual: f64,
    },

    #[error("matrix is not Hermitian (max |rho - rho^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("branch with m = q = {m} has a flat phase; stationary-phase analysis does not apply")]
    FlatPhase { m: usize },

    #[error("flat-phase (m = q) terms require an even qubit count, got {0}")]
    OddQubitCount(usize),

    #[error("the closed-form tensor-product symbol does not describe the {0}-qubit walk")]
    ClosedFormMismatch(usize),
}
