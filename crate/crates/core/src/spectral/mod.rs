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

//! Momentum-space analysis of the walk.
//!
//! Two momentum-space operators appear here and they should not be confused:
//!
//! * [`momentum_step_operator`] is the factorized symbol `U_s(k/2)^{⊗n}` in
//!   which every qubit contributes half a lattice step. Its eigensystem is
//!   known in closed form ([`closed_form_eigensystem`]) and drives the
//!   branch/stationary-phase analysis.
//! * [`walk_momentum_operator`] is the exact Fourier symbol of the simulated
//!   walk, `diag(e^{ik}, 1, ..., 1, e^{-ik}) C`. It coincides with the
//!   factorized symbol for two qubits, with it at doubled momentum for one
//!   qubit, and with neither for three or more.
//!
//! [`spectral_evolve`] uses the exact symbol, so it reproduces direct
//! evolution for every register size.

mod closed_form;
mod grid;
mod stationary;
mod walk_symbol;

pub use closed_form::{
    closed_form_eigensystem, half_step_block, momentum_step_operator, qubit_eigensystem,
    BranchLabel, QubitEigensystem, SpectralEntry, SpectralSystem,
};
pub use grid::MomentumGrid;
pub use stationary::{
    branch_phase, branch_sign, dominant_term_amplitude, outer_local_maxima, phase_derivatives,
    predicted_outer_peaks, stationary_phase_amplitude, stationary_phase_amplitude_with,
    stationary_phase_envelope, stationary_phase_probability, stationary_points,
    walk_velocity_limit, DominantTerm, StationaryPhaseResult,
};
pub use walk_symbol::{
    spectral_evolve, walk_eigensystem, walk_momentum_operator, EigenRoute, WalkEigenpairs,
};
