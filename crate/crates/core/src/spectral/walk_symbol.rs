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

//! Exact Fourier symbol of the walk and spectral (momentum-space) evolution.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::closed_form::closed_form_eigensystem;
use super::grid::MomentumGrid;
use crate::coin::CoinOperator;
use crate::error::{Result, WalkError};
use crate::oracle::displacement;
use crate::scalar::{c_real, c_zero, cis, lit, tol, wide, Real};
use crate::state::StateVector;
use crate::walk::WalkConfig;

const EIGEN_RESIDUAL_LIMIT: f64 = 1e-8;
const SCHUR_MAX_ITERATIONS: usize = 10_000;
/// Convergence thresholds tried in turn, in units of machine epsilon.
const SCHUR_EPSILON_SCALES: [f64; 3] = [1.0, 16.0, 1024.0];

/// `U_walk(k) = diag(e^{i k d_c}) C`, where `d_c` is the displacement of coin
/// state `c`.
pub fn walk_momentum_operator<T: Real>(coin: &CoinOperator<T>, k: T) -> DMatrix<Complex<T>> {
    let n = coin.qubits();
    let mut m = coin.matrix();
    for r in 0..coin.dim() {
        let d = displacement(n, r);
        if d != 0 {
            let phase = cis(k * lit(d as f64));
            m.row_mut(r).iter_mut().for_each(|z| *z *= phase);
        }
    }
    m
}

/// How an eigensystem of the walk symbol was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenRoute {
    /// Tensor-product closed form (Hadamard coin, one or two qubits).
    ClosedForm,
    /// Complex Schur decomposition.
    Numeric,
}

/// Eigenpairs of the walk symbol at one momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkEigenpairs<T: Real> {
    pub k: T,
    pub route: EigenRoute,
    pub eigenvalues: Vec<Complex<T>>,
    /// Orthonormal eigenvectors, `eigenvectors[j]` belonging to `eigenvalues[j]`.
    pub eigenvectors: Vec<Vec<Complex<T>>>,
    pub max_residual: T,
}

fn max_residual<T: Real>(u: &DMatrix<Complex<T>>, values: &[Complex<T>], vectors: &[Vec<Complex<T>>]) -> T {
    let d = u.nrows();
    let mut worst = T::zero();
    for (lambda, v) in values.iter().zip(vectors) {
        let mut r = T::zero();
        for i in 0..d {
            let uv = (0..d).fold(c_zero::<T>(), |s, j| s + u[(i, j)] * v[j]);
            r += (uv - *lambda * v[i]).norm_sqr();
        }
        worst = worst.max(r.sqrt());
    }
    worst
}

/// Diagonalizes the walk symbol at momentum `k`.
///
/// The Hadamard coin on one or two qubits uses the closed form (at momentum
/// `2k` for one qubit). Everything else goes through a complex Schur
/// decomposition, which is diagonal up to rounding because the symbol is
/// unitary. Either way the residual is measured against the symbol itself.
pub fn walk_eigensystem<T: Real>(coin: &CoinOperator<T>, k: T) -> Result<WalkEigenpairs<T>> {
    let u = walk_momentum_operator(coin, k);
    let n = coin.qubits();
    let (route, eigenvalues, eigenvectors) = if coin.is_hadamard() && n <= 2 {
        let km = if n == 1 { k + k } else { k };
        let e = closed_form_eigensystem(n, km)?;
        (EigenRoute::ClosedForm, e.eigenvalues, e.eigenvectors)
    } else {
        let schur = SCHUR_EPSILON_SCALES
            .iter()
            .find_map(|s| Schur::try_new(u.clone(), lit(s * T::EPSILON), SCHUR_MAX_ITERATIONS))
            .ok_or(WalkError::SpectralConsistency {
                formula: "complex Schur decomposition",
                k: wide(k),
                residual: f64::INFINITY,
            })?;
        let (q, t) = schur.unpack();
        let d = u.nrows();
        let values = (0..d).map(|j| t[(j, j)]).collect();
        let vectors = (0..d).map(|j| q.column(j).iter().copied().collect()).collect();
        (EigenRoute::Numeric, values, vectors)
    };
    let r = max_residual(&u, &eigenvalues, &eigenvectors);
    if !(r <= tol::<T>(EIGEN_RESIDUAL_LIMIT)) {
        return Err(WalkError::SpectralConsistency {
            formula: "walk symbol eigenpairs",
            k: wide(k),
            residual: wide(r),
        });
    }
    Ok(WalkEigenpairs {
        k,
        route,
        eigenvalues,
        eigenvectors,
        max_residual: r,
    })
}

pub(crate) fn c_pow<T: Real>(z: Complex<T>, mut e: usize) -> Complex<T> {
    let mut base = z;
    let mut acc = c_real(T::one());
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// Evolves `config` by diagonalizing the walk symbol on `grid` and
/// transforming back to positions.
///
/// With amplitudes `psi(x) = (1/M) sum_j psi_hat(k_j) e^{-i k_j x}` the grid
/// must have at least `2T + 1` points for the lattice window not to alias.
pub fn spectral_evolve<T: Real>(config: &WalkConfig<T>, grid: &MomentumGrid) -> Result<StateVector<T>> {
    let steps = config.steps();
    grid.check_resolves(steps)?;
    let coin = config.coin_operator()?;
    let init = config.initial_state();
    let d = coin.dim();
    let m = grid.num_points();
    let origin = init.origin();

    let evolved: Vec<Vec<Complex<T>>> = (0..m)
        .into_par_iter()
        .map(|j| {
            let k: T = grid.point(j);
            let pairs = walk_eigensystem(&coin, k)?;
            let shift = cis(k * lit(origin as f64));
            let psi0: Vec<Complex<T>> = init.coin_amplitudes().iter().map(|a| *a * shift).collect();
            let mut out = vec![c_zero(); d];
            for (lambda, v) in pairs.eigenvalues.iter().zip(&pairs.eigenvectors) {
                let overlap = v.iter().zip(&psi0).fold(c_zero(), |s, (vi, pi)| s + vi.conj() * *pi);
                let w = c_pow(*lambda, steps) * overlap;
                for (o, vi) in out.iter_mut().zip(v) {
                    *o += w * *vi;
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let fft = FftPlanner::<T>::new().plan_fft_forward(m);
    let scale = T::one() / lit(m as f64);
    let mut columns: Vec<Vec<Complex<T>>> = (0..d)
        .map(|c| evolved.iter().map(|row| row[c]).collect())
        .collect();
    for col in &mut columns {
        fft.process(col);
    }

    let width = 2 * steps + 1;
    let offset = origin - steps as i64;
    let mut amps = vec![c_zero(); width * d];
    for row in 0..width {
        let x = offset + row as i64;
        let idx = x.rem_euclid(m as i64) as usize;
        for (c, col) in columns.iter().enumerate() {
            amps[row * d + c] = col[idx] * scale;
        }
    }
    StateVector::from_amplitudes(coin.qubits(), origin, steps, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coin::build_coin;
    use crate::spectral::momentum_step_operator;
    use crate::walk::evolve;

    #[test]
    fn symbol_matches_tensor_model_for_two_qubits() {
        let coin = build_coin::<f64>(2).unwrap();
        for k in [0.2, 1.3, 3.9] {
            let a = walk_momentum_operator(&coin, k);
            let b = momentum_step_operator(2, k).unwrap();
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn one_qubit_symbol_is_tensor_model_at_double_momentum() {
        let coin = build_coin::<f64>(1).unwrap();
        let a = walk_momentum_operator(&coin, 0.7);
        let b = momentum_step_operator(1, 1.4).unwrap();
        assert!((a - b).norm() < 1e-14);
    }

    #[test]
    fn three_qubit_symbol_is_not_a_tensor_power() {
        let coin = build_coin::<f64>(3).unwrap();
        let a = walk_momentum_operator(&coin, 0.7);
        let b = momentum_step_operator(3, 0.7).unwrap();
        assert!((a - b).norm() > 0.1);
    }

    #[test]
    fn routes_and_residuals() {
        for n in 1..=4 {
            let coin = build_coin::<f64>(n).unwrap();
            let e = walk_eigensystem(&coin, 1.1).unwrap();
            let expect = if n <= 2 { EigenRoute::ClosedForm } else { EigenRoute::Numeric };
            assert_eq!(e.route, expect);
            assert!(e.max_residual < 1e-10);
            assert!(e.eigenvalues.iter().all(|l| (l.norm() - 1.0).abs() < 1e-10));
        }
    }

    #[test]
    fn spectral_matches_direct() {
        for n in 1..=4 {
            let cfg = WalkConfig::<f64>::new(n, 12).unwrap();
            let direct = evolve(&cfg).unwrap();
            let spec = spectral_evolve(&cfg, &MomentumGrid::for_steps(12)).unwrap();
            assert!(direct.max_abs_diff(&spec).unwrap() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let cfg = WalkConfig::<f64>::new(1, 10).unwrap();
        let err = spectral_evolve(&cfg, &MomentumGrid::new(20).unwrap()).unwrap_err();
        assert!(matches!(err, WalkError::GridTooCoarse { .. }));
    }

    #[test]
    fn integer_power() {
        let z = cis(0.3f64);
        assert!((c_pow(z, 7) - cis(2.1)).norm() < 1e-14);
        assert_eq!(c_pow(z, 0), c_real(1.0));
    }
}
