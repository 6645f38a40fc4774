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
use crate::scalar::{lit, Real};

/// Uniform momentum grid `k_j = 2 pi j / M`, `j = 0..M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MomentumGrid {
    num_points: usize,
}

impl MomentumGrid {
    pub fn new(num_points: usize) -> Result<Self> {
        if num_points == 0 {
            return Err(WalkError::InvalidParameter(
                "momentum grid needs at least one point".into(),
            ));
        }
        Ok(Self { num_points })
    }

    /// Smallest power of two `>= 4 (T + 1)`.
    pub fn for_steps(steps: usize) -> Self {
        Self {
            num_points: (4 * (steps + 1)).next_power_of_two(),
        }
    }

    pub fn num_points(&self) -> usize {
        self.num_points
    }

    pub fn point<T: Real>(&self, j: usize) -> T {
        T::two_pi() * lit::<T>(j as f64) / lit::<T>(self.num_points as f64)
    }

    pub fn points<T: Real>(&self) -> Vec<T> {
        (0..self.num_points).map(|j| self.point(j)).collect()
    }

    /// The inverse transform onto `2T + 1` sites is exact only if `M >= 2T + 1`.
    pub fn check_resolves(&self, steps: usize) -> Result<()> {
        let required = 2 * steps + 1;
        if self.num_points < required {
            return Err(WalkError::GridTooCoarse {
                points: self.num_points,
                required,
            });
        }
        Ok(())
    }
}
