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

//! Subcommand implementations.

use std::fmt;
use std::io;
use std::ops::RangeInclusive;

use entwalk::metrics::{distribution_report, state_report, LogBase};
use entwalk::spectral::{
    dominant_term_amplitude, outer_local_maxima, predicted_outer_peaks, spectral_evolve,
    stationary_phase_amplitude, BranchLabel, MomentumGrid, SpectralSystem,
};
use entwalk::validate::{run_validation, ValidationOptions};
use entwalk::{
    build_coin, classical_distribution, evolve, probabilities, ClassicalWalkConfig, Complex64,
    InitialStateSpec, MetricsReport, ProbabilityDistribution, Walk, WalkConfig, WalkError,
};
use rayon::prelude::*;

use crate::args::Amplitudes;
use crate::output::{Cell, Emitter, Table};

/// Allowed drift of `sum_x P(x)` from one at any step.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;
/// Allowed gap between momentum-space and direct evolution.
pub const ROUND_TRIP_TOLERANCE: f64 = 1e-10;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Invariant(String),
    Io(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Invariant(m) => write!(f, "invariant violated: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<WalkError> for CliError {
    fn from(e: WalkError) -> Self {
        match e {
            WalkError::NonUnitaryCoin { .. }
            | WalkError::BoundaryOverflow { .. }
            | WalkError::SpectralConsistency { .. }
            | WalkError::NotHermitian { .. }
            | WalkError::InvalidDistribution(_) => CliError::Invariant(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

pub struct Context {
    pub emitter: Emitter,
    pub threshold: f64,
}

impl Context {
    fn log_base(&self) -> LogBase {
        self.emitter.log_base
    }

    fn write(&self, stem: &str, table: &Table) -> CliResult {
        let path = self.emitter.write(stem, table)?;
        println!("wrote {}", path.display());
        Ok(())
    }
}

fn walk_config(n: usize, steps: usize, init: Option<&Amplitudes>, normalize: bool) -> CliResult<WalkConfig<f64>> {
    let config = WalkConfig::<f64>::new(n, steps)?;
    let Some(Amplitudes(amps)) = init else {
        return Ok(config);
    };
    if amps.len() != 1 << n {
        return Err(CliError::Usage(format!(
            "--init needs {} amplitudes for n = {n}, got {}",
            1usize << n,
            amps.len()
        )));
    }
    let spec = if normalize {
        InitialStateSpec::normalized(amps.clone(), 0)?
    } else {
        InitialStateSpec::new(amps.clone(), 0)?
    };
    Ok(config.with_initial_state(spec)?)
}

fn check_normalization(label: &str, step: usize, total: f64) -> CliResult {
    if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(CliError::Invariant(format!(
            "{label}: total probability {total:.17} at step {step} is outside 1 +- {NORMALIZATION_TOLERANCE:e}"
        )));
    }
    Ok(())
}

const METRIC_COLUMNS: [&str; 9] = [
    "step",
    "variance",
    "std_dev",
    "mean_x",
    "support",
    "H_shannon_pos",
    "S_vn_pos",
    "H_coin",
    "sym_defect",
];

fn metric_cells(r: &MetricsReport<f64>, base: LogBase) -> Vec<Cell> {
    vec![
        r.step.into(),
        r.variance.into(),
        r.std_dev.into(),
        r.expected_position.into(),
        r.support_count.into(),
        base.convert(r.shannon_entropy_position).into(),
        r.von_neumann_entropy_position.map(|s| base.convert(s)).into(),
        r.coin_entropy.map(|s| base.convert(s)).into(),
        r.symmetry_defect.into(),
    ]
}

fn metrics_table(series: &[MetricsReport<f64>], base: LogBase) -> Table {
    let mut t = Table::new(&METRIC_COLUMNS);
    for r in series {
        t.push(metric_cells(r, base));
    }
    t
}

fn push_distribution(table: &mut Table, step: usize, dist: &ProbabilityDistribution<f64>) {
    let t = step as i64;
    for x in -t..=t {
        table.push(vec![step.into(), x.into(), dist.probability(x).into()]);
    }
}

fn print_final(label: &str, r: &MetricsReport<f64>, base: LogBase) {
    println!(
        "{label} T={}: sigma={:.6} mean={:.6} support={} H={:.6} {unit}{}",
        r.step,
        r.std_dev,
        r.expected_position,
        r.support_count,
        base.convert(r.shannon_entropy_position),
        r.von_neumann_entropy_position
            .map(|s| format!(" S_vn={:.6} {}", base.convert(s), base.unit()))
            .unwrap_or_default(),
        unit = base.unit(),
    );
}

/// Evolves once and reports every step; fails fast on normalization drift.
fn walk_series(
    n: usize,
    config: &WalkConfig<f64>,
    threshold: f64,
    mut on_step: impl FnMut(usize, &ProbabilityDistribution<f64>),
) -> CliResult<Vec<MetricsReport<f64>>> {
    let mut walk = Walk::new(config)?;
    let mut out = Vec::with_capacity(config.steps() + 1);
    for t in 0..=config.steps() {
        if t > 0 {
            walk.step()?;
        }
        let report = state_report(t, walk.state(), threshold)?;
        check_normalization(&format!("n={n}"), t, report.total_probability)?;
        on_step(t, &probabilities(walk.state()));
        out.push(report);
    }
    Ok(out)
}

pub fn run(ctx: &Context, n: usize, steps: usize, init: Option<&Amplitudes>, normalize: bool) -> CliResult {
    let config = walk_config(n, steps, init, normalize)?;
    let mut dist_table = Table::new(&["step", "position", "probability"]).grouped();
    let series = walk_series(n, &config, ctx.threshold, |t, d| push_distribution(&mut dist_table, t, d))?;
    ctx.write(&format!("run_n{n}_T{steps}_distribution"), &dist_table)?;
    ctx.write(&format!("run_n{n}_T{steps}_metrics"), &metrics_table(&series, ctx.log_base()))?;
    if let Some(last) = series.last() {
        print_final(&format!("n={n}"), last, ctx.log_base());
    }
    Ok(())
}

fn classical_series(steps: usize, p_right: f64, threshold: f64) -> CliResult<Vec<(MetricsReport<f64>, ProbabilityDistribution<f64>)>> {
    (0..=steps)
        .map(|t| {
            let dist = classical_distribution(&ClassicalWalkConfig::new(t, p_right)?);
            let report = distribution_report(t, &dist, threshold);
            check_normalization("classical", t, report.total_probability)?;
            Ok((report, dist))
        })
        .collect()
}

pub fn classical(ctx: &Context, steps: usize, p_right: f64) -> CliResult {
    let series = classical_series(steps, p_right, ctx.threshold)?;
    let mut dist_table = Table::new(&["step", "position", "probability"]).grouped();
    for (r, d) in &series {
        push_distribution(&mut dist_table, r.step, d);
    }
    let reports: Vec<_> = series.into_iter().map(|(r, _)| r).collect();
    ctx.write(&format!("classical_T{steps}_distribution"), &dist_table)?;
    ctx.write(&format!("classical_T{steps}_metrics"), &metrics_table(&reports, ctx.log_base()))?;
    if let Some(last) = reports.last() {
        print_final(&format!("classical p={p_right}"), last, ctx.log_base());
    }
    Ok(())
}

fn wide_table(
    columns: &[&'static str],
    per_walk: &[&[MetricsReport<f64>]],
    steps: usize,
    cell: impl Fn(&MetricsReport<f64>) -> Cell,
) -> Table {
    let mut t = Table::new(columns);
    for s in 0..=steps {
        let mut row = vec![Cell::from(s)];
        row.extend(per_walk.iter().map(|series| cell(&series[s])));
        t.push(row);
    }
    t
}

const WALK_LABELS: [&str; 13] = [
    "n0", "n1", "n2", "n3", "n4", "n5", "n6", "n7", "n8", "n9", "n10", "n11", "n12",
];

pub fn sweep(ctx: &Context, range: RangeInclusive<usize>, steps: usize) -> CliResult {
    let threshold = ctx.threshold;
    let qubits: Vec<usize> = range.clone().collect();
    let quantum = qubits
        .par_iter()
        .map(|&n| {
            let config = WalkConfig::<f64>::new(n, steps)?;
            walk_series(n, &config, threshold, |_, _| {})
        })
        .collect::<CliResult<Vec<_>>>()?;
    let classical: Vec<_> = classical_series(steps, 0.5, threshold)?
        .into_iter()
        .map(|(r, _)| r)
        .collect();

    let base = ctx.log_base();
    let mut long_cols = vec!["walk"];
    long_cols.extend(METRIC_COLUMNS);
    let mut long = Table::new(&long_cols);
    for (n, series) in qubits.iter().zip(&quantum) {
        for r in series {
            let mut row = vec![Cell::from(WALK_LABELS[*n])];
            row.extend(metric_cells(r, base));
            long.push(row);
        }
    }
    for r in &classical {
        let mut row = vec![Cell::from("CW")];
        row.extend(metric_cells(r, base));
        long.push(row);
    }

    let mut wide_cols = vec!["step"];
    wide_cols.extend(qubits.iter().map(|&n| WALK_LABELS[n]));
    wide_cols.push("CW");
    let mut all: Vec<&[MetricsReport<f64>]> = quantum.iter().map(Vec::as_slice).collect();
    all.push(&classical);

    let stem = format!("sweep_n{}-{}_T{steps}", range.start(), range.end());
    ctx.write(&format!("{stem}_metrics"), &long)?;
    ctx.write(&format!("{stem}_support"), &wide_table(&wide_cols, &all, steps, |r| r.support_count.into()))?;
    ctx.write(
        &format!("{stem}_entropy"),
        &wide_table(&wide_cols, &all, steps, |r| base.convert(r.shannon_entropy_position).into()),
    )?;
    ctx.write(&format!("{stem}_std_dev"), &wide_table(&wide_cols, &all, steps, |r| r.std_dev.into()))?;

    let finals: Vec<(&str, &MetricsReport<f64>)> = qubits
        .iter()
        .map(|&n| WALK_LABELS[n])
        .chain(["CW"])
        .zip(all.iter().map(|s| &s[steps]))
        .collect();
    for (label, r) in &finals {
        print_final(label, r, base);
    }
    let best = |key: &dyn Fn(&MetricsReport<f64>) -> f64| {
        finals
            .iter()
            .filter(|(l, _)| *l != "CW")
            .fold(None, |acc: Option<(&str, f64)>, (l, r)| match acc {
                Some((_, v)) if v >= key(r) => acc,
                _ => Some((l, key(r))),
            })
            .map(|(l, _)| l)
            .unwrap_or("-")
    };
    println!(
        "max entropy: {}  max support: {}  max sigma: {}",
        best(&|r| r.shannon_entropy_position),
        best(&|r| r.support_count as f64),
        best(&|r| r.std_dev),
    );
    Ok(())
}

pub fn spectral_check(
    ctx: &Context,
    n: usize,
    steps: usize,
    grid: Option<usize>,
    init: Option<&Amplitudes>,
    normalize: bool,
) -> CliResult {
    let config = walk_config(n, steps, init, normalize)?;
    let grid = match grid {
        Some(m) => MomentumGrid::new(m)?,
        None => MomentumGrid::for_steps(steps),
    };
    grid.check_resolves(steps)?;
    let m = grid.num_points();

    let system = SpectralSystem::<f64>::closed_form(n, grid)?;
    let mut qubit_table = Table::new(&[
        "k_index",
        "k",
        "phi",
        "lambda_plus_re",
        "lambda_plus_im",
        "lambda_minus_re",
        "lambda_minus_im",
        "gamma_plus",
        "gamma_minus",
        "norm_plus",
        "norm_minus",
        "max_residual",
        "normalization_repaired",
    ]);
    let mut branch_table = Table::new(&["k_index", "selection", "m", "q", "lambda_re", "lambda_im"]);
    let branches: Vec<BranchLabel> = BranchLabel::all(n).collect();
    for (j, e) in system.entries.iter().enumerate() {
        let qe = &e.qubit;
        qubit_table.push(vec![
            j.into(),
            qe.k.into(),
            qe.phi.into(),
            qe.lambda_plus.re.into(),
            qe.lambda_plus.im.into(),
            qe.lambda_minus.re.into(),
            qe.lambda_minus.im.into(),
            qe.gamma_plus.into(),
            qe.gamma_minus.into(),
            qe.norm_plus.into(),
            qe.norm_minus.into(),
            e.max_residual.into(),
            usize::from(qe.normalization_repaired).into(),
        ]);
        for (b, lambda) in branches.iter().zip(&e.eigenvalues) {
            branch_table.push(vec![
                j.into(),
                b.selection().into(),
                b.m().into(),
                b.q().into(),
                lambda.re.into(),
                lambda.im.into(),
            ]);
        }
    }
    ctx.write(&format!("spectral_n{n}_M{m}_eigensystem"), &qubit_table)?;
    ctx.write(&format!("spectral_n{n}_M{m}_branches"), &branch_table)?;

    let worst_residual = system.entries.iter().map(|e| e.max_residual).fold(0.0, f64::max);
    let modulus = system.max_modulus_defect();
    let ortho = system.max_orthonormality_defect();
    let direct = evolve(&config)?;
    let spectral = spectral_evolve(&config, &grid)?;
    let gap = direct.max_abs_diff(&spectral)?;
    println!("n={n} M={m} T={steps}");
    println!("  max eigen residual        {worst_residual:.3e}");
    println!("  max ||Lambda| - 1|        {modulus:.3e}");
    println!("  max orthonormality defect {ortho:.3e}");
    println!("  round-trip max |diff|     {gap:.3e} (limit {ROUND_TRIP_TOLERANCE:e})");

    let limit = 1e-8;
    if !(worst_residual <= limit && modulus <= limit && ortho <= limit) {
        return Err(CliError::Invariant(format!(
            "closed-form eigensystem defects exceed {limit:e}"
        )));
    }
    if !(gap <= ROUND_TRIP_TOLERANCE) {
        return Err(CliError::Invariant(format!(
            "momentum-space evolution differs from direct evolution by {gap:e}"
        )));
    }
    Ok(())
}

fn add_into(acc: &mut [Complex64], v: &[Complex64]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b;
    }
}

pub fn stationary(ctx: &Context, n: usize, steps: usize) -> CliResult {
    if !(n == 1 || n == 2) {
        return Err(CliError::Usage(format!(
            "stationary-phase analysis covers n = 1 and n = 2 only, got n = {n}"
        )));
    }
    let dist = probabilities(&evolve(&WalkConfig::<f64>::new(n, steps)?)?);
    let grid = MomentumGrid::for_steps(steps);
    let branches: Vec<BranchLabel> = BranchLabel::all(n).filter(|b| b.balance() != 0).collect();
    let t = steps as i64;
    let sites: Vec<i64> = (-t..=t).collect();
    let rows = sites
        .par_iter()
        .map(|&x| {
            let mut amp = vec![Complex64::new(0.0, 0.0); 1 << n];
            let mut caustic = false;
            for b in &branches {
                let r = stationary_phase_amplitude::<f64>(b, steps, x)?;
                caustic |= r.degenerate;
                add_into(&mut amp, &r.amplitude);
            }
            if n % 2 == 0 {
                add_into(&mut amp, &dominant_term_amplitude::<f64>(n, steps, x, &grid)?.amplitude);
            }
            let approx: f64 = amp.iter().map(|z| z.norm_sqr()).sum();
            Ok((x, approx, caustic))
        })
        .collect::<Result<Vec<_>, WalkError>>()?;

    let mut table = Table::new(&["position", "exact", "stationary_phase", "rel_error", "caustic"]);
    let mut worst = 0.0f64;
    for &(x, approx, caustic) in &rows {
        let exact = dist.probability(x);
        let rel = (exact > 0.0).then(|| (approx - exact).abs() / exact);
        let frac = x.unsigned_abs() as f64 / steps.max(1) as f64;
        if let Some(r) = rel {
            if (0.1..=0.6).contains(&frac) && exact > 1e-12 {
                worst = worst.max(r);
            }
        }
        table.push(vec![x.into(), exact.into(), approx.into(), rel.into(), usize::from(caustic).into()]);
    }
    ctx.write(&format!("stationary_n{n}_T{steps}"), &table)?;

    let predicted = predicted_outer_peaks(&build_coin::<f64>(n)?, steps)?;
    let parity = if n == 1 { 2 } else { 1 };
    let simulated = outer_local_maxima(&dist, parity, 1e-3);
    println!("n={n} T={steps}");
    println!("  predicted outer peaks {predicted:?}");
    match simulated {
        Some(s) => println!("  simulated outer peaks {s:?}"),
        None => println!("  simulated outer peaks: none"),
    }
    println!("  max relative error for 0.1 <= |x|/T <= 0.6: {:.2}%", 100.0 * worst);
    Ok(())
}

pub fn validate(ctx: &Context, oracle_depth: usize, inject_fault: bool) -> CliResult {
    let opts = ValidationOptions {
        oracle_depth,
        inject_fault,
        ..ValidationOptions::default()
    };
    let report = run_validation(&opts)?;
    let mut table = Table::new(&["suite", "invariant", "subject", "value", "limit", "passed"]);
    for c in &report.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!(
            "[{tag}] {:<20} {:<28} {:<24} {:.3e} <= {:.1e}",
            c.suite.name(),
            c.invariant,
            c.subject,
            c.value,
            c.limit
        );
        table.push(vec![
            c.suite.name().into(),
            c.invariant.into(),
            c.subject.as_str().into(),
            c.value.into(),
            c.limit.into(),
            usize::from(c.passed).into(),
        ]);
    }
    ctx.write("validation", &table)?;
    let failed = report.failures().count();
    println!("{} checks, {failed} failed", report.checks.len());
    if failed > 0 {
        return Err(CliError::Invariant(format!("{failed} validation checks failed")));
    }
    Ok(())
}
