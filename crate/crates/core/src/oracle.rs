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

//! Brute-force path-sum reference for the direct evolution.
//!
//! Every coin history `(c_1, ..., c_T)` is enumerated explicitly and its
//! amplitude `prod_t C[c_t, c_{t-1}] * a(c_0)` deposited at the endpoint
//! `x_0 + sum_t d(c_t)`. Nothing here touches [`StateVector::apply_coin`] or
//! the shift; the Hadamard entries come from the closed bit-parity formula.

use num_complex::Complex;

use crate::coin::hadamard_power_entry;
use crate::error::Result;
use crate::scalar::{c_real, c_zero, Real};
use crate::state::{InitialStateSpec, StateVector};

/// Displacement of coin state `c` in a `qubits`-qubit register.
pub fn displacement(qubits: usize, c: usize) -> i64 {
    let last = (1usize << qubits) - 1;
    if c == 0 {
        1
    } else if c == last {
        -1
    } else {
        0
    }
}

/// Path sum with the Hadamard tensor power coin. Cost `O(2^{n T})`.
pub fn path_sum<T: Real>(init: &InitialStateSpec<T>, steps: usize) -> Result<StateVector<T>> {
    let n = init.qubits();
    path_sum_with(init, steps, |r, c| c_real(hadamard_power_entry(n, r, c)))
}

/// Path sum with an arbitrary coin given entrywise.
pub fn path_sum_with<T: Real, F>(
    init: &InitialStateSpec<T>,
    steps: usize,
    coin_entry: F,
) -> Result<StateVector<T>>
where
    F: Fn(usize, usize) -> Complex<T>,
{
    let n = init.qubits();
    let d = 1usize << n;
    let mut out = StateVector::zeros(n, init.origin(), steps)?;
    let table: Vec<Complex<T>> = (0..d * d).map(|i| coin_entry(i / d, i % d)).collect();
    let width = d;
    let offset = out.position_offset();
    let amps = out.amplitudes_mut();

    // Explicit stack: (depth, coin, position, amplitude).
    let mut stack: Vec<(usize, usize, i64, Complex<T>)> = Vec::new();
    for (c0, a) in init.coin_amplitudes().iter().enumerate() {
        if *a != c_zero() {
            stack.push((0, c0, init.origin(), *a));
        }
    }
    while let Some((depth, c, x, a)) = stack.pop() {
        if depth == steps {
            let row = (x - offset) as usize;
            amps[row * width + c] += a;
            continue;
        }
        for next in 0..d {
            let w = table[next * d + c];
            stack.push((depth + 1, next, x + displacement(n, next), a * w));
        }
    }
    Ok(out)
}
