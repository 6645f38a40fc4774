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

use crate::error::{Result, WalkError};
use crate::scalar::{tol, wide, Real};
use crate::state::StateVector;

/// Nonnegative weights over consecutive lattice positions starting at `offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityDistribution<T: Real> {
    weights: Vec<T>,
    offset: i64,
}

impl<T: Real> ProbabilityDistribution<T> {
    /// Checks nonnegativity and unit total within `1e-10`.
    pub fn new(weights: Vec<T>, offset: i64) -> Result<Self> {
        if weights.is_empty() {
            return Err(WalkError::InvalidDistribution("no positions".into()));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= T::zero())) {
            return Err(WalkError::InvalidDistribution(format!(
                "weight {} is negative or NaN",
                wide(*w)
            )));
        }
        let d = Self { weights, offset };
        let total = d.total();
        if (total - T::one()).abs() > tol(1e-10) {
            return Err(WalkError::InvalidDistribution(format!(
                "weights sum to {}",
                wide(total)
            )));
        }
        Ok(d)
    }

    /// Builds from explicit `(position, weight)` pairs; gaps are zero.
    pub fn from_points(points: &[(i64, T)]) -> Result<Self> {
        let lo = points.iter().map(|p| p.0).min().unwrap_or(0);
        let hi = points.iter().map(|p| p.0).max().unwrap_or(0);
        let mut weights = vec![T::zero(); (hi - lo + 1) as usize];
        for &(x, w) in points {
            weights[(x - lo) as usize] += w;
        }
        Self::new(weights, lo)
    }

    pub(crate) fn new_unchecked(weights: Vec<T>, offset: i64) -> Self {
        Self { weights, offset }
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Position of `weights()[0]`.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn positions(&self) -> std::ops::RangeInclusive<i64> {
        self.offset..=self.offset + self.weights.len() as i64 - 1
    }

    /// `P(x)`; zero outside the stored range.
    pub fn probability(&self, x: i64) -> T {
        let i = x - self.offset;
        if i < 0 || i >= self.weights.len() as i64 {
            T::zero()
        } else {
            self.weights[i as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, T)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .map(move |(i, w)| (self.offset + i as i64, *w))
    }

    pub fn total(&self) -> T {
        self.weights.iter().fold(T::zero(), |a, w| a + *w)
    }
}

/// `P(x) = sum_c |psi(x, c)|^2`.
pub fn probabilities<T: Real>(state: &StateVector<T>) -> ProbabilityDistribution<T> {
    let weights = state
        .rows()
        .map(|(_, row)| row.iter().fold(T::zero(), |a, z| a + z.norm_sqr()))
        .collect();
    ProbabilityDistribution::new_unchecked(weights, state.position_offset())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(ProbabilityDistribution::new(vec![0.5, 0.5], -1).is_ok());
        assert!(ProbabilityDistribution::new(vec![0.5, 0.6], -1).is_err());
        assert!(ProbabilityDistribution::new(vec![1.5, -0.5], -1).is_err());
        assert!(ProbabilityDistribution::<f64>::new(vec![], 0).is_err());
        assert!(ProbabilityDistribution::new(vec![f64::NAN, 1.0], 0).is_err());
    }

    #[test]
    fn lookup_and_points() {
        let d = ProbabilityDistribution::from_points(&[(-1, 0.5), (1, 0.5)]).unwrap();
        assert_eq!(d.offset(), -1);
        assert_eq!(d.weights(), &[0.5, 0.0, 0.5]);
        assert_eq!(d.probability(0), 0.0);
        assert_eq!(d.probability(1), 0.5);
        assert_eq!(d.probability(7), 0.0);
        assert_eq!(d.positions(), -1..=1);
    }
}
