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

//! Scalar diagnostics of a walk: spread, support, symmetry and entropies.
//!
//! All entropies are in nats.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::distribution::{probabilities, ProbabilityDistribution};
use crate::error::{Result, WalkError};
use crate::scalar::{c_abs, lit, tol, wide, Real};
use crate::state::StateVector;
use crate::walk::{Walk, WalkConfig};

/// Default support threshold.
pub const DEFAULT_SUPPORT_THRESHOLD: f64 = 1e-4;

/// Eigenvalues at or below this are dropped before `x log x`.
const EIGENVALUE_FLOOR: f64 = 1e-14;

/// Above this register dimension the coin-space entropy is taken from the
/// (smaller) position Gram block, which has the same nonzero spectrum.
const COIN_DIRECT_MAX_DIM: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spread<T> {
    pub variance: T,
    pub std_dev: T,
    pub expected_position: T,
}

/// Mean, variance and standard deviation of the position.
pub fn variance<T: Real>(dist: &ProbabilityDistribution<T>) -> Spread<T> {
    let mean = dist
        .iter()
        .fold(T::zero(), |a, (x, p)| a + lit::<T>(x as f64) * p);
    let var = dist.iter().fold(T::zero(), |a, (x, p)| {
        let dx = lit::<T>(x as f64) - mean;
        a + dx * dx * p
    });
    let var = var.max(T::zero());
    Spread {
        variance: var,
        std_dev: var.sqrt(),
        expected_position: mean,
    }
}

/// Number of positions with `P(x) > threshold`.
pub fn support_count<T: Real>(dist: &ProbabilityDistribution<T>, threshold: T) -> usize {
    dist.iter().filter(|(_, p)| *p > threshold).count()
}

/// `max_x |P(x) - P(-x)|`.
pub fn symmetry_defect<T: Real>(dist: &ProbabilityDistribution<T>) -> T {
    let range = dist.positions();
    let reach = range.start().abs().max(range.end().abs());
    (0..=reach).fold(T::zero(), |worst, x| {
        worst.max((dist.probability(x) - dist.probability(-x)).abs())
    })
}

/// `-sum P(x) ln P(x)` over positions with positive weight.
pub fn shannon_entropy<T: Real>(dist: &ProbabilityDistribution<T>) -> T {
    let h = -dist
        .weights()
        .iter()
        .filter(|p| **p > T::zero())
        .fold(T::zero(), |a, p| a + *p * p.ln());
    h.max(T::zero())
}

/// A density matrix obtained by tracing out one subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDensityMatrix<T: Real> {
    entries: DMatrix<Complex<T>>,
    first_position: Option<i64>,
}

impl<T: Real> ReducedDensityMatrix<T> {
    /// Rejects non-square or non-Hermitian input (tolerance `1e-12`).
    pub fn new(entries: DMatrix<Complex<T>>) -> Result<Self> {
        if !entries.is_square() {
            return Err(WalkError::DimensionMismatch {
                expected: entries.nrows(),
                found: entries.ncols(),
            });
        }
        let rho = Self {
            entries,
            first_position: None,
        };
        let deviation = rho.hermiticity_deviation();
        if deviation > tol(1e-12) {
            return Err(WalkError::NotHermitian {
                deviation: wide(deviation),
            });
        }
        Ok(rho)
    }

    pub fn entries(&self) -> &DMatrix<Complex<T>> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Lattice position of row 0 for position-space reductions.
    pub fn first_position(&self) -> Option<i64> {
        self.first_position
    }

    pub fn trace(&self) -> T {
        self.entries.diagonal().iter().fold(T::zero(), |a, z| a + z.re)
    }

    pub fn hermiticity_deviation(&self) -> T {
        let n = self.dim();
        let mut worst = T::zero();
        for r in 0..n {
            for c in r..n {
                worst = worst.max(c_abs(self.entries[(r, c)] - self.entries[(c, r)].conj()));
            }
        }
        worst
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<T> {
        let mut ev: Vec<T> = self
            .entries
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        ev
    }
}

/// Position rows `lo..=hi` that carry any amplitude, as a row-per-position matrix.
fn support_block<T: Real>(state: &StateVector<T>) -> (i64, DMatrix<Complex<T>>) {
    let d = state.coin_dim();
    let zero = Complex::new(T::zero(), T::zero());
    let occupied: Vec<i64> = state
        .rows()
        .filter(|(_, r)| r.iter().any(|z| *z != zero))
        .map(|(x, _)| x)
        .collect();
    let (lo, hi) = match (occupied.first(), occupied.last()) {
        (Some(lo), Some(hi)) => (*lo, *hi),
        _ => (state.origin(), state.origin()),
    };
    let rows = (hi - lo + 1) as usize;
    let block = DMatrix::from_fn(rows, d, |i, c| state.amplitude(lo + i as i64, c));
    (lo, block)
}

/// `rho^P(x, x') = sum_c psi(x, c) conj(psi(x', c))`, restricted to the
/// smallest window containing every occupied position.
pub fn reduced_density_position<T: Real>(state: &StateVector<T>) -> ReducedDensityMatrix<T> {
    let (lo, a) = support_block(state);
    ReducedDensityMatrix {
        entries: &a * a.adjoint(),
        first_position: Some(lo),
    }
}

/// `rho^C(c, c') = sum_x psi(x, c) conj(psi(x, c'))`.
pub fn reduced_density_coin<T: Real>(state: &StateVector<T>) -> ReducedDensityMatrix<T> {
    let (_, a) = support_block(state);
    let b = a.transpose();
    ReducedDensityMatrix {
        entries: &b * b.adjoint(),
        first_position: None,
    }
}

/// `-sum lambda ln lambda` over eigenvalues clamped to `[0, 1]`, ignoring
/// those below `1e-14`.
pub fn von_neumann_entropy<T: Real>(rho: &ReducedDensityMatrix<T>) -> Result<T> {
    let deviation = rho.hermiticity_deviation();
    if deviation > tol(1e-12) {
        return Err(WalkError::NotHermitian {
            deviation: wide(deviation),
        });
    }
    Ok(entropy_of_spectrum(&rho.eigenvalues()))
}

fn entropy_of_spectrum<T: Real>(eigenvalues: &[T]) -> T {
    let floor = lit::<T>(EIGENVALUE_FLOOR);
    -eigenvalues
        .iter()
        .map(|l| l.max(T::zero()).min(T::one()))
        .filter(|l| *l > floor)
        .fold(T::zero(), |a, l| a + l * l.ln())
}

/// Entanglement entropy of the coin register, `S(Tr_P rho)`.
pub fn coin_entropy<T: Real>(state: &StateVector<T>) -> T {
    let rho = if state.coin_dim() <= COIN_DIRECT_MAX_DIM {
        reduced_density_coin(state)
    } else {
        reduced_density_position(state)
    };
    entropy_of_spectrum(&rho.eigenvalues())
}

/// Per-step diagnostics. The two entanglement entropies are absent for
/// classical walks.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport<T> {
    pub step: usize,
    pub variance: T,
    pub std_dev: T,
    pub expected_position: T,
    pub support_count: usize,
    pub shannon_entropy_position: T,
    pub von_neumann_entropy_position: Option<T>,
    pub coin_entropy: Option<T>,
    pub symmetry_defect: T,
    /// `sum_x P(x)`, kept so callers can audit normalization.
    pub total_probability: T,
}

/// Diagnostics that depend only on the position distribution.
pub fn distribution_report<T: Real>(
    step: usize,
    dist: &ProbabilityDistribution<T>,
    threshold: T,
) -> MetricsReport<T> {
    let spread = variance(dist);
    MetricsReport {
        step,
        variance: spread.variance,
        std_dev: spread.std_dev,
        expected_position: spread.expected_position,
        support_count: support_count(dist, threshold),
        shannon_entropy_position: shannon_entropy(dist),
        von_neumann_entropy_position: None,
        coin_entropy: None,
        symmetry_defect: symmetry_defect(dist),
        total_probability: dist.total(),
    }
}

/// Full diagnostics of a walk state.
pub fn state_report<T: Real>(step: usize, state: &StateVector<T>, threshold: T) -> Result<MetricsReport<T>> {
    let mut report = distribution_report(step, &probabilities(state), threshold);
    report.von_neumann_entropy_position =
        Some(von_neumann_entropy(&reduced_density_position(state))?);
    report.coin_entropy = Some(coin_entropy(state));
    Ok(report)
}

/// One report per step `t = 0..=T` from a single evolution pass.
pub fn metrics_series<T: Real>(config: &WalkConfig<T>, threshold: T) -> Result<Vec<MetricsReport<T>>> {
    if !(threshold >= T::zero()) {
        return Err(WalkError::InvalidParameter(
            "support threshold must be nonnegative".into(),
        ));
    }
    let mut walk = Walk::new(config)?;
    let mut out = Vec::with_capacity(config.steps() + 1);
    out.push(state_report(0, walk.state(), threshold)?);
    for t in 1..=config.steps() {
        walk.step()?;
        out.push(state_report(t, walk.state(), threshold)?);
    }
    Ok(out)
}

/// Converts an entropy in nats to the requested base.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Natural,
    Two,
}

impl LogBase {
    pub fn convert<T: Real>(self, nats: T) -> T {
        match self {
            LogBase::Natural => nats,
            LogBase::Two => nats / T::LN_2(),
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            LogBase::Natural => "nats",
            LogBase::Two => "bits",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::evolve;
    use approx::assert_abs_diff_eq;

    fn dist(points: &[(i64, f64)]) -> ProbabilityDistribution<f64> {
        ProbabilityDistribution::from_points(points).unwrap()
    }

    #[test]
    fn spread_of_point_mass_and_pair() {
        let s = variance(&dist(&[(0, 1.0)]));
        assert_eq!((s.variance, s.std_dev, s.expected_position), (0.0, 0.0, 0.0));
        let s = variance(&dist(&[(-1, 0.5), (1, 0.5)]));
        assert_eq!((s.variance, s.std_dev, s.expected_position), (1.0, 1.0, 0.0));
    }

    #[test]
    fn support_and_symmetry() {
        assert_eq!(support_count(&dist(&[(0, 1.0)]), 1e-4), 1);
        let pair = dist(&[(-1, 0.5), (1, 0.5)]);
        assert_eq!(support_count(&pair, 1e-4), 2);
        assert_eq!(support_count(&pair, 0.5), 0);
        assert_eq!(symmetry_defect(&pair), 0.0);
        assert_eq!(symmetry_defect(&dist(&[(1, 1.0)])), 1.0);
    }

    #[test]
    fn shannon_values() {
        assert_eq!(shannon_entropy(&dist(&[(0, 1.0)])), 0.0);
        assert_abs_diff_eq!(
            shannon_entropy(&dist(&[(-1, 0.5), (1, 0.5)])),
            2f64.ln(),
            epsilon = 1e-15
        );
        let m = 7;
        let pts: Vec<(i64, f64)> = (0..m).map(|x| (x, 1.0 / m as f64)).collect();
        assert_abs_diff_eq!(shannon_entropy(&dist(&pts)), (m as f64).ln(), epsilon = 1e-14);
    }

    #[test]
    fn reduced_matrices_small_cases() {
        let s0 = evolve(&WalkConfig::<f64>::new(3, 0).unwrap()).unwrap();
        let rho = reduced_density_position(&s0);
        assert_eq!(rho.dim(), 1);
        assert_abs_diff_eq!(rho.entries()[(0, 0)].re, 1.0, epsilon = 1e-15);
        assert_eq!(von_neumann_entropy(&rho).unwrap(), 0.0);
        assert!(coin_entropy(&s0).abs() < 1e-12);

        let s1 = evolve(&WalkConfig::<f64>::new(2, 1).unwrap()).unwrap();
        let rho = reduced_density_position(&s1);
        assert_eq!(rho.first_position(), Some(-1));
        assert_eq!(rho.dim(), 3);
        assert_abs_diff_eq!(rho.entries()[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.entries()[(2, 2)].re, 0.5, epsilon = 1e-15);
        assert!(rho.entries()[(0, 2)].norm() < 1e-15);
        assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(von_neumann_entropy(&rho).unwrap(), 2f64.ln(), epsilon = 1e-12);

        let product = evolve(&WalkConfig::<f64>::new(1, 1).unwrap()).unwrap();
        assert!(coin_entropy(&product).abs() < 1e-12);
    }

    #[test]
    fn von_neumann_reference_matrices() {
        let v = [Complex::new(0.6, 0.0), Complex::new(0.0, 0.8)];
        let pure: DMatrix<Complex<f64>> = DMatrix::from_fn(2, 2, |r, c| v[r] * v[c].conj());
        let rho = ReducedDensityMatrix::new(pure).unwrap();
        assert!(von_neumann_entropy(&rho).unwrap().abs() < 1e-12);

        let mixed = DMatrix::from_fn(2, 2, |r, c| {
            if r == c { Complex::new(0.5, 0.0) } else { Complex::new(0.0, 0.0) }
        });
        let rho = ReducedDensityMatrix::new(mixed).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&rho).unwrap(), 2f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex::new(0.5, 0.0),
                Complex::new(0.1, 0.0),
                Complex::new(0.2, 0.0),
                Complex::new(0.5, 0.0),
            ],
        );
        assert!(matches!(
            ReducedDensityMatrix::new(m),
            Err(WalkError::NotHermitian { .. })
        ));
    }

    #[test]
    fn series_at_zero_steps() {
        let r = metrics_series(&WalkConfig::<f64>::new(4, 0).unwrap(), 1e-4).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].variance.abs() < 1e-15);
        assert!(r[0].shannon_entropy_position.abs() < 1e-15);
        assert_eq!(r[0].von_neumann_entropy_position, Some(0.0));
        assert!(r[0].coin_entropy.unwrap().abs() < 1e-12);
        assert!(metrics_series(&WalkConfig::<f64>::new(1, 2).unwrap(), -1.0).is_err());
    }

    #[test]
    fn schmidt_symmetry_along_walk() {
        for n in 1..=4 {
            for r in metrics_series(&WalkConfig::<f64>::new(n, 20).unwrap(), 1e-4).unwrap() {
                let a = r.von_neumann_entropy_position.unwrap();
                let b = r.coin_entropy.unwrap();
                assert!((a - b).abs() < 1e-9, "n={n} t={} {a} {b}", r.step);
                assert!(a >= 0.0 && r.shannon_entropy_position >= 0.0);
                assert!((r.std_dev - r.variance.sqrt()).abs() < 1e-12);
                assert!(r.shannon_entropy_position <= ((2 * 20 + 1) as f64).ln() + 1e-12);
            }
        }
    }

    #[test]
    fn log_base_conversion() {
        assert_abs_diff_eq!(LogBase::Two.convert(2f64.ln()), 1.0, epsilon = 1e-15);
        assert_eq!(LogBase::Natural.unit(), "nats");
    }
}
