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

//! Classical unbiased/biased random walk baseline, computed exactly from the
//! binomial law (no sampling).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::distribution::ProbabilityDistribution;
use crate::error::{Result, WalkError};
use crate::scalar::{lit, Real};

/// Step counts above this use log-domain binomial coefficients.
const LOG_DOMAIN_ABOVE: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalWalkConfig<T> {
    steps: usize,
    p_right: T,
}

impl<T: Real> ClassicalWalkConfig<T> {
    pub fn new(steps: usize, p_right: T) -> Result<Self> {
        if !(p_right >= T::zero() && p_right <= T::one()) {
            return Err(WalkError::InvalidParameter(format!(
                "p_right = {p_right} outside [0, 1]"
            )));
        }
        Ok(Self { steps, p_right })
    }

    pub fn fair(steps: usize) -> Self {
        Self {
            steps,
            p_right: lit(0.5),
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn p_right(&self) -> T {
        self.p_right
    }
}

fn binomial_u64(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// `P(x) = C(T, (T+x)/2) p^{(T+x)/2} (1-p)^{(T-x)/2}` for `x ≡ T (mod 2)`,
/// on the window `[-T, T]`.
pub fn classical_distribution<T: Real>(config: &ClassicalWalkConfig<T>) -> ProbabilityDistribution<T> {
    let n = config.steps;
    let p = config.p_right;
    let q = T::one() - p;
    let mut weights = vec![T::zero(); 2 * n + 1];
    let mut put = |k: usize, w: T| weights[2 * k] = w;

    if p == T::zero() || p == T::one() {
        put(if p == T::one() { n } else { 0 }, T::one());
    } else if n <= LOG_DOMAIN_ABOVE {
        for k in 0..=n {
            let c = lit::<T>(binomial_u64(n, k) as f64);
            put(k, c * p.powi(k as i32) * q.powi((n - k) as i32));
        }
    } else {
        // Ratio recurrence outward from the mode, then one normalization.
        // At p = 1/2 both directions multiply identical factors, so the fair
        // walk comes out exactly symmetric.
        let mode = (((n + 1) as f64) * p.to_f64().unwrap_or(0.5)).floor().min(n as f64) as usize;
        let (up, down) = (p / q, q / p);
        let mut w = vec![T::zero(); n + 1];
        w[mode] = T::one();
        for k in mode + 1..=n {
            w[k] = w[k - 1] * (lit::<T>((n - k + 1) as f64) / lit::<T>(k as f64)) * up;
        }
        for k in (0..mode).rev() {
            w[k] = w[k + 1] * (lit::<T>((k + 1) as f64) / lit::<T>((n - k) as f64)) * down;
        }
        let total = w.iter().fold(T::zero(), |s, &x| s + x);
        for (k, x) in w.into_iter().enumerate() {
            put(k, x / total);
        }
    }
    // x = 2k - n sits at index x + n = 2k.
    ProbabilityDistribution::new_unchecked(weights, -(n as i64))
}

/// Exact binomial weights `(x, P(x))` for a rational `p_right`.
pub fn exact_distribution(steps: usize, p_right: &BigRational) -> Result<Vec<(i64, BigRational)>> {
    if p_right < &BigRational::zero() || p_right > &BigRational::one() {
        return Err(WalkError::InvalidParameter(format!(
            "p_right = {p_right} outside [0, 1]"
        )));
    }
    let q = BigRational::one() - p_right;
    let mut coeff = BigInt::one();
    let mut out = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        if k > 0 {
            coeff = coeff * BigInt::from(steps - k + 1) / BigInt::from(k);
        }
        let w = BigRational::from_integer(coeff.clone())
            * num_traits::pow(p_right.clone(), k)
            * num_traits::pow(q.clone(), steps - k);
        out.push((2 * k as i64 - steps as i64, w));
    }
    Ok(out)
}

/// Exact `(mean, variance)` of the final position.
pub fn exact_moments(steps: usize, p_right: &BigRational) -> Result<(BigRational, BigRational)> {
    let dist = exact_distribution(steps, p_right)?;
    let mean = dist
        .iter()
        .fold(BigRational::zero(), |a, (x, w)| a + BigRational::from_integer((*x).into()) * w);
    let second = dist.iter().fold(BigRational::zero(), |a, (x, w)| {
        let x = BigRational::from_integer((*x).into());
        a + &x * &x * w
    });
    let var = second - &mean * &mean;
    Ok((mean, var))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::variance;

    fn half() -> BigRational {
        BigRational::new(1.into(), 2.into())
    }

    #[test]
    fn zero_steps() {
        let d = classical_distribution(&ClassicalWalkConfig::<f64>::fair(0));
        assert_eq!(d.weights(), &[1.0]);
        assert_eq!(d.offset(), 0);
    }

    #[test]
    fn two_steps_by_enumeration() {
        let d = classical_distribution(&ClassicalWalkConfig::<f64>::fair(2));
        assert_eq!(d.probability(-2), 0.25);
        assert_eq!(d.probability(-1), 0.0);
        assert_eq!(d.probability(0), 0.5);
        assert_eq!(d.probability(2), 0.25);
    }

    #[test]
    fn fifty_steps_moments() {
        let d = classical_distribution(&ClassicalWalkConfig::<f64>::fair(50));
        let s = variance(&d);
        assert!((s.variance - 50.0).abs() < 1e-11);
        assert!(s.expected_position.abs() < 1e-13);
        let (mean, var) = exact_moments(50, &half()).unwrap();
        assert!(mean.is_zero());
        assert_eq!(var, BigRational::from_integer(50.into()));
    }

    #[test]
    fn biased_moments_exact() {
        // x = 2K - T with K ~ Bin(T, p): mean T(2p-1), var 4Tp(1-p).
        let p = BigRational::new(1.into(), 3.into());
        let (mean, var) = exact_moments(9, &p).unwrap();
        assert_eq!(mean, BigRational::from_integer((-3).into()));
        assert_eq!(var, BigRational::from_integer(8.into()));
    }

    #[test]
    fn degenerate_bias() {
        let d = classical_distribution(&ClassicalWalkConfig::<f64>::new(5, 1.0).unwrap());
        assert_eq!(d.probability(5), 1.0);
        let d = classical_distribution(&ClassicalWalkConfig::<f64>::new(100, 0.0).unwrap());
        assert_eq!(d.probability(-100), 1.0);
        assert!(ClassicalWalkConfig::<f64>::new(3, 1.5).is_err());
        assert!(exact_distribution(3, &BigRational::from_integer(2.into())).is_err());
    }

    #[test]
    fn recurrence_agrees_with_exact() {
        let t = 80;
        let d = classical_distribution(&ClassicalWalkConfig::<f64>::fair(t));
        for (x, w) in exact_distribution(t, &half()).unwrap() {
            let exact = num_traits::ToPrimitive::to_f64(&w).unwrap();
            assert!((d.probability(x) - exact).abs() <= 1e-13 * exact.max(1e-300) + 1e-300);
        }
    }

    #[test]
    fn normalized_and_symmetric_up_to_a_thousand_steps() {
        for steps in 0..=1000 {
            let d = classical_distribution(&ClassicalWalkConfig::<f64>::fair(steps));
            assert!((d.total() - 1.0).abs() < 1e-13, "T = {steps}");
            let w = d.weights();
            assert!(w.iter().eq(w.iter().rev()), "T = {steps}");
        }
        let biased = classical_distribution(&ClassicalWalkConfig::<f64>::new(777, 0.013).unwrap());
        assert!((biased.total() - 1.0).abs() < 1e-13);
    }
}
