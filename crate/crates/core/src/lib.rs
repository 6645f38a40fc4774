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

//! Discrete-time quantum walks on the line driven by an `n`-qubit coin.
//!
//! The walker carries a `2^n`-dimensional internal register. Each step applies
//! a coin (by default the Hadamard tensor power `H^{⊗n}`) and then a
//! conditional shift that moves `|0...0>` right, `|1...1>` left and leaves
//! every other register state in place.
//!
//! * [`walk`], [`state`], [`coin`]: direct evolution.
//! * [`metrics`]: spread, support, symmetry and entropy diagnostics.
//! * [`classical`]: the binomial random-walk baseline.
//! * [`spectral`]: momentum-space evolution, closed-form eigensystems and
//!   stationary-phase asymptotics.
//! * [`validate`]: self-check suites over all of the above.
//!
//! Everything numeric is generic over [`Real`]; the `*F64` aliases below are
//! what most callers want.

pub mod classical;
pub mod coin;
pub mod distribution;
pub mod error;
pub mod metrics;
pub mod oracle;
pub mod scalar;
pub mod spectral;
pub mod state;
pub mod validate;
pub mod walk;

pub use classical::{classical_distribution, ClassicalWalkConfig};
pub use coin::{build_coin, CoinOperator, CoinSpec, MAX_QUBITS};
pub use distribution::{probabilities, ProbabilityDistribution};
pub use error::{Result, WalkError};
pub use metrics::{metrics_series, MetricsReport, ReducedDensityMatrix};
pub use scalar::Real;
pub use state::{InitialStateSpec, StateVector};
pub use walk::{evolve, Walk, WalkConfig};

pub type Complex64 = num_complex::Complex<f64>;

pub type WalkConfigF64 = WalkConfig<f64>;
pub type StateVectorF64 = StateVector<f64>;
pub type InitialStateSpecF64 = InitialStateSpec<f64>;
pub type CoinOperatorF64 = CoinOperator<f64>;
pub type ProbabilityDistributionF64 = ProbabilityDistribution<f64>;
pub type MetricsReportF64 = MetricsReport<f64>;
pub type ClassicalWalkConfigF64 = ClassicalWalkConfig<f64>;
pub type MomentumGridF64 = spectral::MomentumGrid;
pub type SpectralEntryF64 = spectral::SpectralEntry<f64>;
