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

//! Invariant suites run as a batch, with a report naming every checked
//! invariant and the worst deviation found.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use num_complex::Complex;

use crate::coin::{build_coin, CoinOperator};
use crate::distribution::probabilities;
use crate::error::Result;
use crate::metrics::{coin_entropy, reduced_density_position, symmetry_defect, von_neumann_entropy};
use crate::oracle::path_sum;
use crate::spectral::{
    momentum_step_operator, qubit_eigensystem, spectral_evolve, walk_eigensystem, MomentumGrid,
    SpectralSystem,
};
use crate::state::{InitialStateSpec, StateVector};
use crate::walk::{evolve, Walk, WalkConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Normalization,
    Unitarity,
    OracleEquivalence,
    EigenResidual,
    Symmetry,
    SpectralRoundTrip,
    Entropy,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Normalization,
        Suite::Unitarity,
        Suite::OracleEquivalence,
        Suite::EigenResidual,
        Suite::Symmetry,
        Suite::SpectralRoundTrip,
        Suite::Entropy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Normalization => "normalization",
            Suite::Unitarity => "unitarity",
            Suite::OracleEquivalence => "oracle-equivalence",
            Suite::EigenResidual => "eigen-residual",
            Suite::Symmetry => "symmetry",
            Suite::SpectralRoundTrip => "spectral-round-trip",
            Suite::Entropy => "entropy",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One checked invariant on one subject.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub suite: Suite,
    pub invariant: &'static str,
    pub subject: String,
    /// Worst deviation observed.
    pub value: f64,
    /// Largest acceptable deviation.
    pub limit: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub checks: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn suite_passed(&self, suite: Suite) -> bool {
        self.checks.iter().filter(|c| c.suite == suite).all(|c| c.passed)
    }

    fn record(&mut self, suite: Suite, invariant: &'static str, subject: String, value: f64, limit: f64) {
        // NaN deviations fail.
        let passed = value <= limit;
        self.checks.push(CheckOutcome {
            suite,
            invariant,
            subject,
            value,
            limit,
            passed,
        });
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationOptions {
    pub max_qubits: usize,
    pub steps: usize,
    /// Path-sum enumeration runs for every `T <= oracle_depth`.
    pub oracle_depth: usize,
    pub oracle_max_qubits: usize,
    pub spectral_max_qubits: usize,
    pub spectral_steps: Vec<usize>,
    /// Multiplies coin entry `(0, 0)` by `1.01` wherever a coin is built.
    pub inject_fault: bool,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            max_qubits: 7,
            steps: 50,
            oracle_depth: 6,
            oracle_max_qubits: 3,
            spectral_max_qubits: 5,
            spectral_steps: vec![1, 10, 30],
            inject_fault: false,
        }
    }
}

const NORMALIZATION_LIMIT: f64 = 1e-10;
const UNITARITY_LIMIT: f64 = 1e-12;
const ORACLE_LIMIT: f64 = 1e-12;
const RESIDUAL_LIMIT: f64 = 1e-8;
const MODULUS_LIMIT: f64 = 1e-12;
const ORTHONORMALITY_LIMIT: f64 = 1e-10;
const NORM_PRODUCT_LIMIT: f64 = 1e-10;
const GAMMA_PRODUCT_LIMIT: f64 = 1e-12;
const SYMMETRY_LIMIT: f64 = 1e-12;
const ROUND_TRIP_LIMIT: f64 = 1e-10;
const SCHMIDT_LIMIT: f64 = 1e-9;
const IDENTITY_SAMPLES: usize = 1000;

fn coin_for(n: usize, inject_fault: bool) -> Result<CoinOperator<f64>> {
    let coin = build_coin::<f64>(n)?;
    if !inject_fault {
        return Ok(coin);
    }
    let mut m = coin.matrix();
    m[(0, 0)] *= Complex::new(1.01, 0.0);
    CoinOperator::from_matrix_unchecked(m)
}

fn walk_for(n: usize, steps: usize, init: &InitialStateSpec<f64>, inject_fault: bool) -> Result<Walk<f64>> {
    let coin = coin_for(n, inject_fault)?;
    Ok(Walk::with_coin(coin, StateVector::localized(init, steps)))
}

fn normalization(opts: &ValidationOptions, report: &mut ValidationReport) -> Result<()> {
    for n in 1..=opts.max_qubits {
        let mut walk = walk_for(n, opts.steps, &InitialStateSpec::ghz(n)?, opts.inject_fault)?;
        let mut worst = (probabilities(walk.state()).total() - 1.0).abs();
        for _ in 0..opts.steps {
            walk.step()?;
            worst = worst.max((probabilities(walk.state()).total() - 1.0).abs());
        }
        report.record(
            Suite::Normalization,
            "total probability stays 1 at every step",
            format!("n={n} T={}", opts.steps),
            worst,
            NORMALIZATION_LIMIT,
        );
    }
    Ok(())
}

fn unitarity(opts: &ValidationOptions, report: &mut ValidationReport) -> Result<()> {
    for n in 1..=opts.max_qubits {
        let coin = coin_for(n, opts.inject_fault)?;
        report.record(
            Suite::Unitarity,
            "coin operator is unitary",
            format!("n={n}"),
            coin.unitarity_deviation(),
            UNITARITY_LIMIT,
        );
    }
    for n in 1..=opts.spectral_max_qubits {
        let mut worst: f64 = 0.0;
        for j in 0..16 {
            let u = momentum_step_operator::<f64>(n, 2.0 * PI * j as f64 / 16.0)?;
            let e = &u * u.adjoint();
            for r in 0..e.nrows() {
                for c in 0..e.ncols() {
                    let target = if r == c { 1.0 } else { 0.0 };
                    worst = worst.max((e[(r, c)] - Complex::new(target, 0.0)).norm());
                }
            }
        }
        report.record(
            Suite::Unitarity,
            "momentum step operator is unitary",
            format!("n={n}"),
            worst,
            UNITARITY_LIMIT,
        );
    }
    Ok(())
}

fn oracle_equivalence(opts: &ValidationOptions, report: &mut ValidationReport) -> Result<()> {
    for n in 1..=opts.oracle_max_qubits.min(opts.max_qubits) {
        let init = InitialStateSpec::ghz(n)?;
        let mut worst: f64 = 0.0;
        for steps in 0..=opts.oracle_depth {
            let mut walk = walk_for(n, steps, &init, opts.inject_fault)?;
            for _ in 0..steps {
                walk.step()?;
            }
            let oracle = path_sum(&init, steps)?;
            worst = worst.max(walk.state().max_abs_diff(&oracle)?);
        }
        report.record(
            Suite::OracleEquivalence,
            "direct evolution equals path-sum enumeration",
            format!("n={n} T<={}", opts.oracle_depth),
            worst,
            ORACLE_LIMIT,
        );
    }
    Ok(())
}

fn eigen_residual(opts: &ValidationOptions, report: &mut ValidationReport) -> Result<()> {
    let steps = opts.spectral_steps.iter().copied().max().unwrap_or(opts.steps);
    let grid = MomentumGrid::for_steps(steps);
    for n in 1..=opts.spectral_max_qubits {
        let sys = SpectralSystem::<f64>::closed_form(n, grid)?;
        let residual = sys.entries.iter().fold(0.0f64, |a, e| a.max(e.max_residual));
        let subject = format!("n={n} M={}", grid.num_points());
        report.record(
            Suite::EigenResidual,
            "closed-form eigenpairs satisfy U V = Lambda V",
            subject.clone(),
            residual,
            RESIDUAL_LIMIT,
        );
        report.record(
            Suite::EigenResidual,
            "closed-form eigenvalues lie on the unit circle",
            subject.clone(),
            sys.max_modulus_defect(),
            MODULUS_LIMIT,
        );
        report.record(
            Suite::EigenResidual,
            "closed-form eigenvectors are orthonormal",
            subject,
            sys.max_orthonormality_defect(),
            ORTHONORMALITY_LIMIT,
        );

        let coin = build_coin::<f64>(n)?;
        let (mut walk_residual, mut walk_modulus) = (0.0f64, 0.0f64);
        for j in 0..64 {
            let e = walk_eigensystem(&coin, 2.0 * PI * j as f64 / 64.0)?;
            walk_residual = walk_residual.max(e.max_residual);
            for l in &e.eigenvalues {
                walk_modulus = walk_modulus.max((l.norm() - 1.0).abs());
            }
        }
        report.record(
            Suite::EigenResidual,
            "walk-symbol eigenpairs satisfy U V = Lambda V",
            format!("n={n}"),
            walk_residual,
            RESIDUAL_LIMIT,
        );
        report.record(
            Suite::EigenResidual,
            "walk-symbol eigenvalues lie on the unit circle",
            format!("n={n}"),
            walk_modulus,
            MODULUS_LIMIT,
        );
    }
    let (mut norm_gap, mut gamma_gap, mut repaired) = (0.0f64, 0.0f64, 0usize);
    for j in 0..IDENTITY_SAMPLES {
        let k = 2.0 * PI * j as f64 / IDENTITY_SAMPLES as f64;
        let qe = qubit_eigensystem(k);
        norm_gap = norm_gap.max((qe.norm_plus * qe.norm_minus - (6.0 + 2.0 * k.cos())).abs());
        gamma_gap = gamma_gap.max((qe.gamma_plus * qe.gamma_minus + 1.0).abs());
        repaired += usize::from(qe.normalization_repaired);
    }
    let subject = format!("{IDENTITY_SAMPLES} momenta");
    report.record(Suite::EigenResidual, "N+ N- = 6 + 2 cos k", subject.clone(), norm_gap, NORM_PRODUCT_LIMIT);
    report.record(Suite::EigenResidual, "gamma+ gamma- = -1", subject.clone(), gamma_gap, GAMMA_PRODUCT_LIMIT);
    report.record(
        Suite::EigenResidual,
        "printed eigenvector normalization needs no repair",
        subject,
        repaired as f64,
        0.0,
    );
    Ok(())
}

fn symmetry(opts: &ValidationOptions, report: &mut ValidationReport) -> Result<()> {
    for n in 1..=opts.max_qubits {
        let (init, invariant) = if n % 2 == 0 {
            (InitialStateSpec::ghz(n)?, "even register with GHZ start is mirror symmetric")
        } else {
            (
                InitialStateSpec::ghz_with_phase(n, FRAC_PI_2)?,
                "odd register with phase-shifted GHZ start is mirror symmetric",
            )
        };
        let cfg = WalkConfig::new(n, opts.steps)?.with_initial_state(init)?;
        let d = symmetry_defect(&probabilities(&evolve(&cfg)?));
        report.record(Suite::Symmetry, invariant, format!("n={n} T={}", opts.steps), d, SYMMETRY_LIMIT);
    }
    Ok(())
}

fn spectral_round_trip(opts: &ValidationOptions, report: &mut ValidationReport) -> Result<()> {
    for n in 1..=opts.spectral_max_qubits {
        for &steps in &opts.spectral_steps {
            let cfg = WalkConfig::<f64>::new(n, steps)?;
            let direct = evolve(&cfg)?;
            let spectral = spectral_evolve(&cfg, &MomentumGrid::for_steps(steps))?;
            report.record(
                Suite::SpectralRoundTrip,
                "spectral evolution equals direct evolution",
                format!("n={n} T={steps}"),
                direct.max_abs_diff(&spectral)?,
                ROUND_TRIP_LIMIT,
            );
        }
    }
    Ok(())
}

fn entropy(opts: &ValidationOptions, report: &mut ValidationReport) -> Result<()> {
    for n in 1..=opts.max_qubits {
        let mut walk = Walk::new(&WalkConfig::<f64>::new(n, opts.steps)?)?;
        let mut worst: f64 = 0.0;
        loop {
            let s = walk.state();
            let sp = von_neumann_entropy(&reduced_density_position(s))?;
            worst = worst.max((sp - coin_entropy(s)).abs());
            if walk.steps_taken() == opts.steps {
                break;
            }
            walk.step()?;
        }
        report.record(
            Suite::Entropy,
            "position and coin reductions have equal entropy",
            format!("n={n} T={}", opts.steps),
            worst,
            SCHMIDT_LIMIT,
        );
    }
    Ok(())
}

/// Runs one suite.
pub fn run_suite(suite: Suite, opts: &ValidationOptions) -> Result<ValidationReport> {
    let mut report = ValidationReport::default();
    match suite {
        Suite::Normalization => normalization(opts, &mut report)?,
        Suite::Unitarity => unitarity(opts, &mut report)?,
        Suite::OracleEquivalence => oracle_equivalence(opts, &mut report)?,
        Suite::EigenResidual => eigen_residual(opts, &mut report)?,
        Suite::Symmetry => symmetry(opts, &mut report)?,
        Suite::SpectralRoundTrip => spectral_round_trip(opts, &mut report)?,
        Suite::Entropy => entropy(opts, &mut report)?,
    }
    Ok(report)
}

/// Runs every suite in [`Suite::ALL`] order.
pub fn run_validation(opts: &ValidationOptions) -> Result<ValidationReport> {
    let mut report = ValidationReport::default();
    for suite in Suite::ALL {
        report.checks.extend(run_suite(suite, opts)?.checks);
    }
    Ok(report)
}
