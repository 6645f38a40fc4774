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

//! Closed-form eigensystem of the factorized momentum symbol `U_s(k/2)^{⊗n}`.

use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;

use super::grid::MomentumGrid;
use crate::coin::{apply_gate_to_every_qubit, check_qubits, Gate};
use crate::error::{Result, WalkError};
use crate::scalar::{c_abs, c_real, c_zero, cis, lit, tol, wide, Real};

/// Residual above which a closed-form eigenpair is rejected.
const EIGEN_RESIDUAL_LIMIT: f64 = 1e-8;

/// `U_s(k/2) = diag(e^{ik/2}, e^{-ik/2}) H`.
pub fn half_step_block<T: Real>(k: T) -> Gate<T> {
    let half = k / lit(2.0);
    let h = T::FRAC_1_SQRT_2();
    let up = cis(half).scale(h);
    let down = cis(-half).scale(h);
    [[up, up], [down, -down]]
}

/// `U(k) = U_s(k/2)^{⊗n}` as a dense matrix.
pub fn momentum_step_operator<T: Real>(n: usize, k: T) -> Result<DMatrix<Complex<T>>> {
    check_qubits(n)?;
    let g = half_step_block(k);
    let d = 1usize << n;
    Ok(DMatrix::from_fn(d, d, |r, c| {
        (0..n).fold(c_real(T::one()), |acc, b| acc * g[(r >> b) & 1][(c >> b) & 1])
    }))
}

/// Eigen-data of the single-qubit block `U_s(k/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitEigensystem<T: Real> {
    pub k: T,
    /// `phi(k) = 2 asin(sin(k/2) / sqrt 2)`.
    pub phi: T,
    /// `e^{i phi/2}`.
    pub lambda_plus: Complex<T>,
    /// `-e^{-i phi/2}`.
    pub lambda_minus: Complex<T>,
    /// `-cos(k/2) ± sqrt(1 + cos^2(k/2))`.
    pub gamma_plus: T,
    pub gamma_minus: T,
    /// `2 - 2 gamma cos(k/2)`.
    pub norm_plus: T,
    pub norm_minus: T,
    /// `(e^{ik/2}, gamma) / sqrt(N)`.
    pub v_plus: [Complex<T>; 2],
    pub v_minus: [Complex<T>; 2],
    /// Set if the closed-form `N` did not match the vector's squared length
    /// and the eigenvector was renormalized numerically instead.
    pub normalization_repaired: bool,
}

impl<T: Real> QubitEigensystem<T> {
    pub fn lambda(&self, minus: bool) -> Complex<T> {
        if minus { self.lambda_minus } else { self.lambda_plus }
    }

    pub fn vector(&self, minus: bool) -> &[Complex<T>; 2] {
        if minus { &self.v_minus } else { &self.v_plus }
    }
}

pub fn qubit_eigensystem<T: Real>(k: T) -> QubitEigensystem<T> {
    let two = lit::<T>(2.0);
    let half = k / two;
    let (s, c) = (half.sin(), half.cos());
    let phi = two * (s / T::SQRT_2()).asin();
    let root = (T::one() + c * c).sqrt();
    let gamma_plus = -c + root;
    let gamma_minus = -c - root;
    let norm_plus = two - two * gamma_plus * c;
    let norm_minus = two - two * gamma_minus * c;
    let mut repaired = false;
    let mut vector = |gamma: T, norm: T| {
        let length_sqr = T::one() + gamma * gamma;
        let n = if (length_sqr - norm).abs() > tol::<T>(1e-12) * length_sqr {
            repaired = true;
            length_sqr
        } else {
            norm
        };
        let inv = T::one() / n.sqrt();
        [cis(half).scale(inv), c_real(gamma * inv)]
    };
    let v_plus = vector(gamma_plus, norm_plus);
    let v_minus = vector(gamma_minus, norm_minus);
    QubitEigensystem {
        k,
        phi,
        lambda_plus: cis(phi / two),
        lambda_minus: -cis(-phi / two),
        gamma_plus,
        gamma_minus,
        norm_plus,
        norm_minus,
        v_plus,
        v_minus,
        normalization_repaired: repaired,
    }
}

/// Which single-qubit eigenvector sits in each tensor slot.
///
/// Bit `b` of `selection` set means the slot acting on coin-index bit `b`
/// carries `v_-`; `m` counts `v_+` slots and `q` counts `v_-` slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BranchLabel {
    qubits: usize,
    selection: usize,
}

impl BranchLabel {
    pub fn new(qubits: usize, selection: usize) -> Result<Self> {
        check_qubits(qubits)?;
        if selection >> qubits != 0 {
            return Err(WalkError::InvalidParameter(format!(
                "selection {selection:#b} has bits beyond {qubits} slots"
            )));
        }
        Ok(Self { qubits, selection })
    }

    /// The first branch (lowest selection) with `m` plus-slots.
    pub fn with_balance(qubits: usize, m: usize) -> Result<Self> {
        if m > qubits {
            return Err(WalkError::InvalidParameter(format!(
                "m = {m} exceeds {qubits} qubits"
            )));
        }
        let q = qubits - m;
        Self::new(qubits, (1usize << q) - 1)
    }

    /// All `2^n` branches in selection order.
    pub fn all(qubits: usize) -> impl Iterator<Item = BranchLabel> {
        (0..1usize << qubits).map(move |selection| BranchLabel { qubits, selection })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn selection(&self) -> usize {
        self.selection
    }

    pub fn m(&self) -> usize {
        self.qubits - self.q()
    }

    pub fn q(&self) -> usize {
        self.selection.count_ones() as usize
    }

    /// `m - q`.
    pub fn balance(&self) -> i64 {
        self.m() as i64 - self.q() as i64
    }

    /// The branch with every slot flipped (`m` and `q` exchanged).
    pub fn mirror(&self) -> BranchLabel {
        BranchLabel {
            qubits: self.qubits,
            selection: !self.selection & ((1usize << self.qubits) - 1),
        }
    }

    fn slot_is_minus(&self, bit: usize) -> bool {
        (self.selection >> bit) & 1 == 1
    }

    /// `Lambda = lambda_+^m lambda_-^q`.
    pub fn eigenvalue<T: Real>(&self, qe: &QubitEigensystem<T>) -> Complex<T> {
        (0..self.qubits).fold(c_real(T::one()), |acc, b| acc * qe.lambda(self.slot_is_minus(b)))
    }

    /// `(-1)^q e^{i (m-q) phi / 2}`, the collapsed form of [`BranchLabel::eigenvalue`].
    pub fn balanced_eigenvalue<T: Real>(&self, qe: &QubitEigensystem<T>) -> Complex<T> {
        let sign = if self.q() % 2 == 0 { T::one() } else { -T::one() };
        cis(lit::<T>(self.balance() as f64) * qe.phi / lit(2.0)).scale(sign)
    }

    /// Single coin-index component of the tensor-product eigenvector.
    pub fn eigenvector_entry<T: Real>(&self, qe: &QubitEigensystem<T>, c: usize) -> Complex<T> {
        (0..self.qubits).fold(c_real(T::one()), |acc, b| {
            acc * qe.vector(self.slot_is_minus(b))[(c >> b) & 1]
        })
    }

    /// `V = v_{s_1} ⊗ ... ⊗ v_{s_n}`.
    pub fn eigenvector<T: Real>(&self, qe: &QubitEigensystem<T>) -> Vec<Complex<T>> {
        let d = 1usize << self.qubits;
        let mut v = vec![c_real(T::one()); d];
        for b in 0..self.qubits {
            let f = qe.vector(self.slot_is_minus(b));
            for (c, z) in v.iter_mut().enumerate() {
                *z *= f[(c >> b) & 1];
            }
        }
        v
    }
}

/// All `2^n` eigenpairs of `U(k)` at one momentum, indexed by branch selection.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEntry<T: Real> {
    pub qubits: usize,
    pub qubit: QubitEigensystem<T>,
    pub eigenvalues: Vec<Complex<T>>,
    pub eigenvectors: Vec<Vec<Complex<T>>>,
    /// `max_j ||U V_j - Lambda_j V_j||`.
    pub max_residual: T,
}

impl<T: Real> SpectralEntry<T> {
    pub fn k(&self) -> T {
        self.qubit.k
    }
}

fn residual<T: Real>(block: &Gate<T>, n: usize, lambda: Complex<T>, v: &[Complex<T>]) -> T {
    let mut uv = v.to_vec();
    apply_gate_to_every_qubit(block, n, &mut uv);
    uv.iter()
        .zip(v)
        .fold(T::zero(), |a, (u, x)| a + (*u - lambda * *x).norm_sqr())
        .sqrt()
}

/// Eigenvalues `lambda_+^m lambda_-^q` and eigenvectors `v_± ⊗ ...` of
/// `U_s(k/2)^{⊗n}`, each checked against the operator itself.
pub fn closed_form_eigensystem<T: Real>(n: usize, k: T) -> Result<SpectralEntry<T>> {
    check_qubits(n)?;
    let qe = qubit_eigensystem(k);
    let block = half_step_block(k);
    let limit = tol::<T>(EIGEN_RESIDUAL_LIMIT);
    let mut eigenvalues = Vec::with_capacity(1 << n);
    let mut eigenvectors = Vec::with_capacity(1 << n);
    let mut max_residual = T::zero();
    for branch in BranchLabel::all(n) {
        let lambda = branch.eigenvalue(&qe);
        let collapsed = branch.balanced_eigenvalue(&qe);
        let gap = c_abs(lambda - collapsed);
        if gap > limit {
            return Err(WalkError::SpectralConsistency {
                formula: "collapsed branch eigenvalue (-1)^q e^{i(m-q)phi/2}",
                k: wide(k),
                residual: wide(gap),
            });
        }
        let v = branch.eigenvector(&qe);
        let r = residual(&block, n, lambda, &v);
        if !(r <= limit) {
            return Err(WalkError::SpectralConsistency {
                formula: "tensor eigenpair lambda_±, v_±",
                k: wide(k),
                residual: wide(r),
            });
        }
        max_residual = max_residual.max(r);
        eigenvalues.push(lambda);
        eigenvectors.push(v);
    }
    Ok(SpectralEntry {
        qubits: n,
        qubit: qe,
        eigenvalues,
        eigenvectors,
        max_residual,
    })
}

/// Closed-form eigensystems over a whole momentum grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSystem<T: Real> {
    pub qubits: usize,
    pub grid: MomentumGrid,
    pub entries: Vec<SpectralEntry<T>>,
}

impl<T: Real> SpectralSystem<T> {
    /// Evaluates every grid point independently (in parallel).
    pub fn closed_form(n: usize, grid: MomentumGrid) -> Result<Self> {
        let entries = (0..grid.num_points())
            .into_par_iter()
            .map(|j| closed_form_eigensystem(n, grid.point::<T>(j)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            qubits: n,
            grid,
            entries,
        })
    }

    /// Largest deviation of any `|Lambda_j(k)|` from one.
    pub fn max_modulus_defect(&self) -> T {
        self.entries
            .iter()
            .flat_map(|e| e.eigenvalues.iter())
            .fold(T::zero(), |a, l| a.max((c_abs(*l) - T::one()).abs()))
    }

    /// Largest deviation of the eigenvector Gram matrix from identity.
    pub fn max_orthonormality_defect(&self) -> T {
        let mut worst = T::zero();
        for e in &self.entries {
            for (i, a) in e.eigenvectors.iter().enumerate() {
                for (j, b) in e.eigenvectors.iter().enumerate().skip(i) {
                    let dot = a.iter().zip(b).fold(c_zero::<T>(), |s, (x, y)| s + x.conj() * *y);
                    let target = if i == j { c_real(T::one()) } else { c_zero() };
                    worst = worst.max(c_abs(dot - target));
                }
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coin::build_coin;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn zero_momentum_is_hadamard_power() {
        for n in 1..=3 {
            let u = momentum_step_operator::<f64>(n, 0.0).unwrap();
            let h = build_coin::<f64>(n).unwrap().matrix();
            assert!((u - h).norm() < 1e-14);
        }
    }

    #[test]
    fn symbol_is_unitary() {
        for n in 1..=4 {
            for k in [0.3, 1.7, 4.0, 6.1] {
                let u = momentum_step_operator::<f64>(n, k).unwrap();
                let d = u.nrows();
                let e = &u * u.adjoint() - DMatrix::identity(d, d);
                assert!(e.iter().all(|z| z.norm() < 1e-12));
            }
        }
    }

    #[test]
    fn reference_phase_values() {
        let qe = qubit_eigensystem(0.0f64);
        assert_eq!(qe.phi, 0.0);
        assert!((qe.lambda_plus - Complex::new(1.0, 0.0)).norm() < 1e-15);
        assert!((qe.lambda_minus + Complex::new(1.0, 0.0)).norm() < 1e-15);
        let qe = qubit_eigensystem(PI);
        assert!((qe.phi - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn zero_momentum_spectrum_is_signs() {
        let e = closed_form_eigensystem(3, 0.0f64).unwrap();
        for l in &e.eigenvalues {
            assert!(l.im.abs() < 1e-15);
            assert!((l.re.abs() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn norm_product_and_gamma_product() {
        for j in 0..200 {
            let k = 2.0 * PI * j as f64 / 200.0;
            let qe = qubit_eigensystem(k);
            assert!((qe.norm_plus * qe.norm_minus - (6.0 + 2.0 * k.cos())).abs() < 1e-12);
            assert!((qe.gamma_plus * qe.gamma_minus + 1.0).abs() < 1e-12);
            assert!(!qe.normalization_repaired);
        }
    }

    #[test]
    fn branch_bookkeeping() {
        let b = BranchLabel::new(4, 0b0101).unwrap();
        assert_eq!((b.m(), b.q(), b.balance()), (2, 2, 0));
        assert_eq!(b.mirror().selection(), 0b1010);
        assert!(BranchLabel::new(2, 0b100).is_err());
        let b = BranchLabel::with_balance(3, 3).unwrap();
        assert_eq!((b.m(), b.q()), (3, 0));
        let b = BranchLabel::with_balance(3, 0).unwrap();
        assert_eq!((b.m(), b.q()), (0, 3));
        for n in 1..=6 {
            for m in 0..=n {
                let count = BranchLabel::all(n).filter(|b| b.m() == m).count();
                let binom = (0..m).fold(1usize, |a, i| a * (n - i) / (i + 1));
                assert_eq!(count, binom);
            }
        }
    }

    #[test]
    fn grid_system_invariants() {
        let sys = SpectralSystem::<f64>::closed_form(3, MomentumGrid::new(64).unwrap()).unwrap();
        assert!(sys.max_modulus_defect() < 1e-12);
        assert!(sys.max_orthonormality_defect() < 1e-10);
        assert!(sys.entries.iter().all(|e| e.max_residual < 1e-12));
    }

    #[test]
    fn entry_and_vector_agree() {
        let qe = qubit_eigensystem(1.1f64);
        let b = BranchLabel::new(3, 0b110).unwrap();
        let v = b.eigenvector(&qe);
        for (c, z) in v.iter().enumerate() {
            assert!((b.eigenvector_entry(&qe, c) - z).norm() < 1e-15);
        }
    }
}
