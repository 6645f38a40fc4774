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

//! Stationary-phase analysis of the branch integrals and group-velocity
//! limits of the walk.
//!
//! Branch integrals are written over the doubled momentum domain `[0, 4pi)`
//! with measure `dk / 4pi`, on which every branch term is periodic. Lattice
//! positions map onto the model velocity `v = (x - x0) / (s T)`, where `s = 2`
//! for one qubit (the walk symbol is the model at doubled momentum) and
//! `s = 1` for two.

use nalgebra::DMatrix;
use num_complex::Complex;

use super::closed_form::{qubit_eigensystem, BranchLabel};
use super::grid::MomentumGrid;
use super::walk_symbol::walk_eigensystem;
use crate::coin::{check_qubits, CoinOperator};
use crate::distribution::ProbabilityDistribution;
use crate::error::{Result, WalkError};
use crate::oracle::displacement;
use crate::scalar::{c_abs, c_real, c_zero, cis, lit, tol, wide, Real};
use crate::state::InitialStateSpec;

const NEWTON_TOLERANCE: f64 = 1e-12;
const NEWTON_MAX_ITERATIONS: usize = 50;
const SCAN_CELLS: usize = 2048;
const ROOT_MATCH: f64 = 1e-7;
/// Half-width, in the Airy variable, of the zone around a caustic in which
/// the two-point stationary-phase formula is replaced by quadrature.
const AIRY_ZONE: f64 = 3.0;
const CLUSTER_GAP: f64 = 1e-7;
const GOLDEN_ITERATIONS: usize = 60;

fn four_pi<T: Real>() -> T {
    T::two_pi() + T::two_pi()
}

fn require_dispersive(branch: &BranchLabel) -> Result<()> {
    if branch.balance() == 0 {
        Err(WalkError::FlatPhase { m: branch.m() })
    } else {
        Ok(())
    }
}

/// `Phi(k) = ((m - q) / 2) phi(k) - v k`.
pub fn branch_phase<T: Real>(branch: &BranchLabel, v: T, k: T) -> T {
    let b = lit::<T>(branch.balance() as f64);
    b * qubit_eigensystem(k).phi / lit(2.0) - v * k
}

/// `(Phi'(k), Phi''(k))`.
pub fn phase_derivatives<T: Real>(branch: &BranchLabel, v: T, k: T) -> Result<(T, T)> {
    require_dispersive(branch)?;
    let b = lit::<T>(branch.balance() as f64);
    let half = k / lit(2.0);
    let (s, c) = (half.sin(), half.cos());
    let first = b * c / (lit::<T>(2.0) * (lit::<T>(2.0) - s * s).sqrt()) - v;
    let base = lit::<T>(3.0) + k.cos();
    let second = -b * s / (T::SQRT_2() * base * base.sqrt());
    Ok((first, second))
}

/// `|m - q| / (2 sqrt 2)`, the largest `|v|` with real stationary points.
fn model_velocity_bound<T: Real>(branch: &BranchLabel) -> T {
    lit::<T>(branch.balance().unsigned_abs() as f64) / (lit::<T>(2.0) * T::SQRT_2())
}

fn newton<T: Real>(branch: &BranchLabel, mut k: T, v: T) -> Result<T> {
    for _ in 0..NEWTON_MAX_ITERATIONS {
        let (d1, d2) = phase_derivatives(branch, v, k)?;
        if d1.abs() <= tol::<T>(NEWTON_TOLERANCE) || d2 == T::zero() {
            break;
        }
        let next = k - d1 / d2;
        if (next - k).abs() > T::pi() / lit(4.0) {
            break;
        }
        k = next;
    }
    Ok(k)
}

fn scan_roots<T: Real>(branch: &BranchLabel, v: T) -> Result<Vec<T>> {
    let h = four_pi::<T>() / lit(SCAN_CELLS as f64);
    let mut roots = Vec::new();
    let mut prev = phase_derivatives(branch, v, T::zero())?.0;
    for i in 1..=SCAN_CELLS {
        let b = h * lit(i as f64);
        let fb = phase_derivatives(branch, v, b)?.0;
        if prev == T::zero() {
            roots.push(b - h);
        } else if prev * fb < T::zero() {
            let (mut lo, mut hi, mut flo) = (b - h, b, prev);
            for _ in 0..80 {
                let mid = (lo + hi) / lit(2.0);
                let fm = phase_derivatives(branch, v, mid)?.0;
                if flo * fm <= T::zero() {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push((lo + hi) / lit(2.0));
        }
        prev = fb;
    }
    Ok(roots)
}

/// Stationary points of `Phi` in `[0, 4pi)`, from the closed form
/// `k0 = ±2 acos(2v sgn(m-q) / sqrt((m-q)^2 - 4v^2))`, Newton-polished and
/// cross-checked against a bracketing scan of `Phi'`.
pub fn stationary_points<T: Real>(branch: &BranchLabel, v: T) -> Result<Vec<T>> {
    require_dispersive(branch)?;
    let b = lit::<T>(branch.balance() as f64);
    let disc = b * b - lit::<T>(4.0) * v * v;
    if disc <= T::zero() {
        return Ok(Vec::new());
    }
    let cval = lit::<T>(2.0) * v * b.signum() / disc.sqrt();
    if cval.abs() > T::one() {
        return Ok(Vec::new());
    }
    let a = lit::<T>(2.0) * cval.acos();
    let mut points = vec![newton(branch, a, v)?];
    let mirrored = four_pi::<T>() - a;
    if (mirrored - a).abs() > tol::<T>(ROOT_MATCH) && mirrored < four_pi::<T>() {
        points.push(newton(branch, mirrored, v)?);
    }
    for p in &mut points {
        *p = p.rem_euclid_t();
    }
    points.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));

    let cell = four_pi::<T>() / lit(SCAN_CELLS as f64);
    let scanned = scan_roots(branch, v)?;
    let near = |x: T, y: T| {
        let d = (x - y).abs();
        d.min(four_pi::<T>() - d)
    };
    for r in &scanned {
        let best = points.iter().fold(T::max_value().unwrap(), |m, p| m.min(near(*p, *r)));
        if best > cell {
            return Err(WalkError::SpectralConsistency {
                formula: "closed-form stationary points",
                k: wide(*r),
                residual: wide(best),
            });
        }
    }
    for (i, p) in points.iter().enumerate() {
        let isolated = points
            .iter()
            .enumerate()
            .all(|(j, q)| i == j || near(*p, *q) > cell + cell);
        let matched = scanned.iter().any(|r| near(*p, *r) < tol::<T>(ROOT_MATCH));
        if isolated && !matched {
            return Err(WalkError::SpectralConsistency {
                formula: "closed-form stationary points",
                k: wide(*p),
                residual: wide(phase_derivatives(branch, v, *p)?.0),
            });
        }
    }
    Ok(points)
}

trait Wrap {
    fn rem_euclid_t(self) -> Self;
}

impl<T: Real> Wrap for T {
    fn rem_euclid_t(self) -> Self {
        let p = four_pi::<T>();
        let r = self - p * (self / p).floor();
        if r >= p { r - p } else { r }
    }
}

/// `(-1)^{q T}`.
pub fn branch_sign<T: Real>(branch: &BranchLabel, steps: usize) -> T {
    if (branch.q() * steps) % 2 == 0 { T::one() } else { -T::one() }
}

/// Leading-order contribution of one branch to the amplitude at one site.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryPhaseResult<T: Real> {
    pub branch: BranchLabel,
    /// Model velocity `v`.
    pub velocity: T,
    pub stationary_points: Vec<T>,
    /// `Phi''` at each stationary point.
    pub phase_second_derivative: Vec<T>,
    /// Coin-space amplitude vector.
    pub amplitude: Vec<Complex<T>>,
    /// Set when `v` lies in the Airy zone of a caustic and the branch
    /// integral was evaluated by quadrature instead.
    pub degenerate: bool,
    /// `|m - q| / (2 sqrt 2)`.
    pub group_velocity_bound: T,
}

fn lattice_scale(n: usize) -> Result<usize> {
    match n {
        1 => Ok(2),
        2 => Ok(1),
        _ => Err(WalkError::ClosedFormMismatch(n)),
    }
}

fn branch_weight<T: Real>(branch: &BranchLabel, init: &[Complex<T>], k: T, steps: usize) -> Vec<Complex<T>> {
    let qe = qubit_eigensystem(k);
    let v = branch.eigenvector(&qe);
    let overlap = v.iter().zip(init).fold(c_zero::<T>(), |s, (a, b)| s + a.conj() * *b);
    let w = overlap.scale(branch_sign::<T>(branch, steps));
    v.into_iter().map(|z| z * w).collect()
}

/// `(1 / 4pi) int_0^{4pi} g(k) e^{i T Phi(k)} dk` by the periodic trapezoid rule.
fn branch_quadrature<T: Real>(branch: &BranchLabel, init: &[Complex<T>], steps: usize, v: T) -> Vec<Complex<T>> {
    let points = 64 * (steps + 1) * branch.qubits();
    let h = four_pi::<T>() / lit(points as f64);
    let t = lit::<T>(steps as f64);
    let mut acc = vec![c_zero::<T>(); init.len()];
    for j in 0..points {
        let k = h * lit(j as f64);
        let phase = cis(t * branch_phase(branch, v, k));
        for (a, g) in acc.iter_mut().zip(branch_weight(branch, init, k, steps)) {
            *a += g * phase;
        }
    }
    let scale = T::one() / lit(points as f64);
    acc.into_iter().map(|z| z.scale(scale)).collect()
}

/// Stationary-phase amplitude of one branch at lattice site `x` for the GHZ
/// initial state.
pub fn stationary_phase_amplitude<T: Real>(branch: &BranchLabel, steps: usize, x: i64) -> Result<StationaryPhaseResult<T>> {
    let init = InitialStateSpec::ghz(branch.qubits())?;
    stationary_phase_amplitude_with(branch, &init, steps, x)
}

/// Stationary-phase amplitude of one branch at lattice site `x`:
/// `sum_{k0} g(k0) e^{i T Phi(k0) + i sgn(Phi'') pi/4} sqrt(2pi / (T |Phi''|)) / 4pi`
/// with `g = (-1)^{qT} <V, psi0> V`.
pub fn stationary_phase_amplitude_with<T: Real>(
    branch: &BranchLabel,
    init: &InitialStateSpec<T>,
    steps: usize,
    x: i64,
) -> Result<StationaryPhaseResult<T>> {
    let n = branch.qubits();
    let scale = lattice_scale(n)?;
    require_dispersive(branch)?;
    if init.qubits() != n {
        return Err(WalkError::DimensionMismatch {
            expected: 1 << n,
            found: init.coin_amplitudes().len(),
        });
    }
    if steps == 0 {
        return Err(WalkError::InvalidParameter("stationary phase needs T > 0".into()));
    }
    let t = lit::<T>(steps as f64);
    let v = lit::<T>((x - init.origin()) as f64) / (lit::<T>(scale as f64) * t);
    let bound = model_velocity_bound::<T>(branch);
    let b = lit::<T>(branch.balance().unsigned_abs() as f64);
    let third = b / (lit::<T>(16.0) * T::SQRT_2());
    let airy = (bound - v.abs()) * t.powf(lit(2.0 / 3.0)) / (third / lit(2.0)).cbrt();
    let degenerate = airy < lit(AIRY_ZONE);
    let amps = init.coin_amplitudes();

    let points = stationary_points(branch, v)?;
    let mut second = Vec::with_capacity(points.len());
    for k0 in &points {
        second.push(phase_derivatives(branch, v, *k0)?.1);
    }
    let amplitude = if degenerate {
        branch_quadrature(branch, amps, steps, v)
    } else {
        let mut acc = vec![c_zero::<T>(); amps.len()];
        for (k0, d2) in points.iter().zip(&second) {
            let quarter = T::frac_pi_4() * d2.signum();
            let mag = (T::two_pi() / (t * d2.abs())).sqrt() / four_pi::<T>();
            let phase = cis(t * branch_phase(branch, v, *k0) + quarter).scale(mag);
            for (a, g) in acc.iter_mut().zip(branch_weight(branch, amps, *k0, steps)) {
                *a += g * phase;
            }
        }
        acc
    };
    Ok(StationaryPhaseResult {
        branch: *branch,
        velocity: v,
        stationary_points: points,
        phase_second_derivative: second,
        amplitude,
        degenerate,
        group_velocity_bound: bound,
    })
}

/// `sum_c |sum_b A_b(x)_c|^2` over every dispersive branch, GHZ initial state.
pub fn stationary_phase_probability<T: Real>(n: usize, steps: usize, x: i64) -> Result<T> {
    lattice_scale(n)?;
    let init = InitialStateSpec::ghz(n)?;
    let mut total = vec![c_zero::<T>(); 1 << n];
    for branch in BranchLabel::all(n).filter(|b| b.balance() != 0) {
        let r = stationary_phase_amplitude_with(&branch, &init, steps, x)?;
        for (t, a) in total.iter_mut().zip(r.amplitude) {
            *t += a;
        }
    }
    Ok(total.iter().fold(T::zero(), |s, z| s + z.norm_sqr()))
}

/// Stationary-phase probability at every site of `[-T, T]`.
pub fn stationary_phase_envelope<T: Real>(n: usize, steps: usize) -> Result<Vec<(i64, T)>> {
    let t = steps as i64;
    (-t..=t)
        .map(|x| Ok((x, stationary_phase_probability(n, steps, x)?)))
        .collect()
}

/// The non-dispersing contribution of the `m = q` branches.
#[derive(Debug, Clone, PartialEq)]
pub struct DominantTerm<T: Real> {
    /// Number of branches with `m = q`, `C(n, n/2)`.
    pub branch_count: usize,
    pub amplitude: Vec<Complex<T>>,
    pub probability: T,
}

/// Sum of the flat-phase (`m = q`) branch integrals of the factorized model
/// at site `x`, evaluated by the trapezoid rule on `grid` stretched over
/// `[0, 4pi)`. Only defined for even `n`.
pub fn dominant_term_amplitude<T: Real>(n: usize, steps: usize, x: i64, grid: &MomentumGrid) -> Result<DominantTerm<T>> {
    check_qubits(n)?;
    if n % 2 != 0 {
        return Err(WalkError::OddQubitCount(n));
    }
    let init = InitialStateSpec::<T>::ghz(n)?;
    let amps = init.coin_amplitudes();
    let branches: Vec<BranchLabel> = BranchLabel::all(n).filter(|b| b.balance() == 0).collect();
    let m = grid.num_points();
    let mut acc = vec![c_zero::<T>(); 1 << n];
    for j in 0..m {
        let k: T = grid.point::<T>(j) * lit(2.0);
        let phase = cis(-k * lit(x as f64));
        for b in &branches {
            for (a, g) in acc.iter_mut().zip(branch_weight(b, amps, k, steps)) {
                *a += g * phase;
            }
        }
    }
    let scale = T::one() / lit(m as f64);
    let amplitude: Vec<Complex<T>> = acc.into_iter().map(|z| z.scale(scale)).collect();
    let probability = amplitude.iter().fold(T::zero(), |s, z| s + z.norm_sqr());
    Ok(DominantTerm {
        branch_count: branches.len(),
        amplitude,
        probability,
    })
}

/// Group velocities `<V|K|V>` of every eigenvector of the walk symbol at `k`,
/// with `K = diag(d_c)`. Degenerate eigenspaces are resolved by diagonalizing
/// `K` inside them.
fn group_velocities<T: Real>(coin: &CoinOperator<T>, k: T) -> Result<Vec<T>> {
    let pairs = walk_eigensystem(coin, k)?;
    let n = coin.qubits();
    let d = coin.dim();
    let mut order: Vec<usize> = (0..d).collect();
    let angle = |j: usize| {
        let l = pairs.eigenvalues[j];
        l.im.atan2(l.re)
    };
    order.sort_by(|a, b| angle(*a).partial_cmp(&angle(*b)).unwrap_or(std::cmp::Ordering::Equal));
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for j in order {
        match clusters.last_mut() {
            Some(c) if c_abs(pairs.eigenvalues[*c.last().unwrap()] - pairs.eigenvalues[j]) < tol::<T>(CLUSTER_GAP) => c.push(j),
            _ => clusters.push(vec![j]),
        }
    }
    if clusters.len() > 1 {
        let first = clusters[0][0];
        let last = *clusters.last().unwrap().last().unwrap();
        if c_abs(pairs.eigenvalues[first] - pairs.eigenvalues[last]) < tol::<T>(CLUSTER_GAP) {
            let tail = clusters.pop().unwrap();
            clusters[0].extend(tail);
        }
    }
    let disp: Vec<T> = (0..d).map(|c| lit(displacement(n, c) as f64)).collect();
    let mut out = Vec::with_capacity(d);
    for cluster in clusters {
        let m = cluster.len();
        let block = DMatrix::from_fn(m, m, |a, b| {
            let (va, vb) = (&pairs.eigenvectors[cluster[a]], &pairs.eigenvectors[cluster[b]]);
            (0..d).fold(c_zero::<T>(), |s, c| s + va[c].conj() * vb[c] * c_real(disp[c]))
        });
        if m == 1 {
            out.push(block[(0, 0)].re);
        } else {
            out.extend(block.symmetric_eigenvalues().iter().copied());
        }
    }
    Ok(out)
}

fn golden_max<T: Real, F: Fn(T) -> Result<T>>(f: F, lo: T, hi: T) -> Result<T> {
    let ratio = (lit::<T>(5.0).sqrt() - T::one()) / lit(2.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..GOLDEN_ITERATIONS {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d)?;
        }
    }
    Ok(fc.max(fd))
}

/// `(slowest, fastest)` group velocity of the walk in sites per step.
///
/// The Hadamard coin on one or two qubits has the closed-form limits
/// `±1/sqrt 2`. Otherwise the velocities are sampled on `samples` momenta
/// and the extremes refined by golden-section search.
pub fn walk_velocity_limit<T: Real>(coin: &CoinOperator<T>, samples: usize) -> Result<(T, T)> {
    if coin.is_hadamard() && coin.qubits() <= 2 {
        let v = T::FRAC_1_SQRT_2();
        return Ok((-v, v));
    }
    if samples < 3 {
        return Err(WalkError::InvalidParameter(format!("need at least 3 momentum samples, got {samples}")));
    }
    let h = T::two_pi() / lit(samples as f64);
    let fastest = |k: T| -> Result<T> {
        Ok(group_velocities(coin, k)?.into_iter().fold(-T::max_value().unwrap(), |m, v| m.max(v)))
    };
    let slowest = |k: T| -> Result<T> {
        Ok(-group_velocities(coin, k)?.into_iter().fold(T::max_value().unwrap(), |m, v| m.min(v)))
    };
    let (mut best_hi, mut k_hi) = (-T::max_value().unwrap(), T::zero());
    let (mut best_lo, mut k_lo) = (-T::max_value().unwrap(), T::zero());
    for j in 0..samples {
        let k = h * lit(j as f64);
        let vs = group_velocities(coin, k)?;
        let hi = vs.iter().fold(-T::max_value().unwrap(), |m, v| m.max(*v));
        let lo = -vs.iter().fold(T::max_value().unwrap(), |m, v| m.min(*v));
        if hi > best_hi {
            best_hi = hi;
            k_hi = k;
        }
        if lo > best_lo {
            best_lo = lo;
            k_lo = k;
        }
    }
    let hi = golden_max(fastest, k_hi - h, k_hi + h)?.max(best_hi);
    let lo = golden_max(slowest, k_lo - h, k_lo + h)?.max(best_lo);
    Ok((-lo, hi))
}

/// Predicted outermost peak positions `(left, right)` after `steps` steps:
/// the outermost reachable sites inside the light cone `v T`. The one-qubit
/// walk only visits sites with the parity of `T`.
pub fn predicted_outer_peaks<T: Real>(coin: &CoinOperator<T>, steps: usize) -> Result<(i64, i64)> {
    let (slow, fast) = walk_velocity_limit(coin, 256)?;
    let t = lit::<T>(steps as f64);
    let mut right = (fast * t).floor().to_i64().unwrap_or(0);
    let mut left = (slow * t).ceil().to_i64().unwrap_or(0);
    if coin.qubits() == 1 {
        let parity = (steps % 2) as i64;
        if right.rem_euclid(2) != parity {
            right -= 1;
        }
        if left.rem_euclid(2) != parity {
            left += 1;
        }
    }
    Ok((left, right))
}

/// Outermost local maxima `(left, right)` of `dist`.
///
/// Only sites on the sublattice of the global maximum with spacing
/// `parity_step` are compared, and only maxima of at least
/// `rel_threshold * max P` count. Returns `None` for an empty distribution.
pub fn outer_local_maxima<T: Real>(dist: &ProbabilityDistribution<T>, parity_step: usize, rel_threshold: T) -> Option<(i64, i64)> {
    let step = parity_step.max(1) as i64;
    let (peak_x, peak_p) = dist
        .iter()
        .fold(None, |best: Option<(i64, T)>, (x, p)| match best {
            Some((_, bp)) if bp >= p => best,
            _ => Some((x, p)),
        })?;
    if peak_p <= T::zero() {
        return None;
    }
    let floor = rel_threshold * peak_p;
    let maxima: Vec<i64> = dist
        .positions()
        .filter(|x| (x - peak_x).rem_euclid(step) == 0)
        .filter(|x| {
            let p = dist.probability(*x);
            p >= floor && p >= dist.probability(x - step) && p >= dist.probability(x + step)
        })
        .collect();
    Some((*maxima.first()?, *maxima.last()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coin::build_coin;
    use crate::distribution::probabilities;
    use crate::walk::{evolve, WalkConfig};
    use std::f64::consts::{PI, SQRT_2};

    fn branch(n: usize, m: usize) -> BranchLabel {
        BranchLabel::with_balance(n, m).unwrap()
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let b = branch(3, 3);
        let (v, k, h) = (0.2f64, 1.3f64, 1e-5f64);
        let (d1, d2) = phase_derivatives(&b, v, k).unwrap();
        let fd1 = (branch_phase(&b, v, k + h) - branch_phase(&b, v, k - h)) / (2.0 * h);
        let fd2 = (branch_phase(&b, v, k + h) - 2.0 * branch_phase(&b, v, k) + branch_phase(&b, v, k - h)) / (h * h);
        assert!((d1 - fd1).abs() < 1e-9);
        assert!((d2 - fd2).abs() < 1e-4);
    }

    #[test]
    fn extremal_two_qubit_derivatives_at_origin() {
        let (d1, d2) = phase_derivatives(&branch(2, 2), 0.0f64, 0.0).unwrap();
        assert!((d1 - 1.0 / SQRT_2).abs() < 1e-15);
        assert_eq!(d2, 0.0);
        let b = branch(5, 4);
        let (v, k, h) = (-0.1f64, 2.2f64, 1e-5f64);
        let fd = (phase_derivatives(&b, v, k + h).unwrap().0 - phase_derivatives(&b, v, k - h).unwrap().0) / (2.0 * h);
        assert!((phase_derivatives(&b, v, k).unwrap().1 - fd).abs() < 1e-6);
    }

    #[test]
    fn mirrored_branch_signs() {
        for n in 1..=6 {
            for steps in [49, 50] {
                let b = branch(n, n);
                let product = branch_sign::<f64>(&b, steps) * branch_sign::<f64>(&b.mirror(), steps);
                let expect = if n % 2 == 1 && steps % 2 == 1 { -1.0 } else { 1.0 };
                assert_eq!(product, expect, "n={n} T={steps}");
            }
        }
    }

    #[test]
    fn dominant_term_shrinks_with_register_size() {
        let steps = 50;
        let g = MomentumGrid::for_steps(steps);
        let p: Vec<f64> = [2, 4, 6]
            .iter()
            .map(|n| dominant_term_amplitude::<f64>(*n, steps, 0, &g).unwrap().probability)
            .collect();
        assert!(p[0] > p[1] && p[1] > p[2], "{p:?}");
        assert_eq!(dominant_term_amplitude::<f64>(4, steps, 0, &g).unwrap().branch_count, 6);
        let exact = probabilities(&evolve(&WalkConfig::<f64>::new(2, steps).unwrap()).unwrap()).probability(0);
        assert!(p[0] > exact / 10.0 && p[0] < exact * 10.0, "{} vs {exact}", p[0]);
    }

    #[test]
    fn flat_branch_is_rejected() {
        let b = branch(2, 1);
        assert!(matches!(phase_derivatives(&b, 0.0, 1.0), Err(WalkError::FlatPhase { m: 1 })));
        assert!(stationary_points(&b, 0.1).is_err());
    }

    #[test]
    fn stationary_points_solve_phase_equation() {
        for (n, m) in [(1, 1), (1, 0), (2, 2), (3, 3), (3, 1), (4, 0)] {
            let b = branch(n, m);
            let bound = model_velocity_bound::<f64>(&b);
            for frac in [-0.9, -0.4, 0.0, 0.3, 0.8] {
                let v = frac * bound;
                let pts = stationary_points(&b, v).unwrap_or_else(|e| panic!("n={n} m={m} v={v}: {e}"));
                assert_eq!(pts.len(), 2, "n={n} m={m} v={v}");
                for k in pts {
                    assert!((0.0..4.0 * PI).contains(&k));
                    assert!(phase_derivatives(&b, v, k).unwrap().0.abs() < 1e-10);
                }
            }
            assert!(stationary_points(&b, 1.01 * bound).unwrap().is_empty());
        }
    }

    #[test]
    fn zero_velocity_points() {
        let pts = stationary_points(&branch(1, 1), 0.0).unwrap();
        assert!((pts[0] - PI).abs() < 1e-12 && (pts[1] - 3.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn sign_follows_q_parity() {
        let b = branch(3, 1);
        assert_eq!(branch_sign::<f64>(&b, 3), 1.0);
        assert_eq!(branch_sign::<f64>(&branch(3, 2), 3), -1.0);
        assert_eq!(branch_sign::<f64>(&branch(3, 2), 4), 1.0);
    }

    #[test]
    fn one_qubit_envelope_tracks_exact_distribution() {
        let steps = 50;
        let exact = probabilities(&evolve(&WalkConfig::<f64>::new(1, steps).unwrap()).unwrap());
        let mut worst: f64 = 0.0;
        for x in -30i64..=30 {
            if x.abs() < 5 || x.rem_euclid(2) != 0 {
                continue;
            }
            let sp: f64 = stationary_phase_probability(1, steps, x).unwrap();
            worst = worst.max((sp - exact.probability(x)).abs() / exact.probability(x));
        }
        assert!(worst < 0.15, "worst relative error {worst}");
    }

    #[test]
    fn wrong_parity_sites_cancel() {
        for x in [-21i64, -7, 3, 15] {
            let p: f64 = stationary_phase_probability(1, 50, x).unwrap();
            assert!(p < 1e-12, "x={x} p={p}");
        }
    }

    #[test]
    fn larger_registers_are_rejected() {
        assert!(matches!(
            stationary_phase_probability::<f64>(3, 20, 0),
            Err(WalkError::ClosedFormMismatch(3))
        ));
    }

    #[test]
    fn dominant_term_parity_guard() {
        let g = MomentumGrid::new(64).unwrap();
        assert!(matches!(dominant_term_amplitude::<f64>(3, 10, 0, &g), Err(WalkError::OddQubitCount(3))));
        let d = dominant_term_amplitude::<f64>(2, 10, 0, &g).unwrap();
        assert_eq!(d.branch_count, 2);
        assert!(d.probability > 0.0);
    }

    #[test]
    fn velocity_limits() {
        for n in 1..=2 {
            let coin = build_coin::<f64>(n).unwrap();
            let (lo, hi) = walk_velocity_limit(&coin, 64).unwrap();
            assert!((hi - 1.0 / SQRT_2).abs() < 1e-15 && (lo + hi).abs() < 1e-15);
            let dense = CoinOperator::from_matrix(coin.matrix()).unwrap();
            let (lo, hi) = walk_velocity_limit(&dense, 128).unwrap();
            assert!((hi - 1.0 / SQRT_2).abs() < 1e-8, "n={n} hi={hi}");
            assert!((lo + 1.0 / SQRT_2).abs() < 1e-8);
        }
    }

    #[test]
    fn predicted_peaks_respect_parity() {
        let coin = build_coin::<f64>(1).unwrap();
        assert_eq!(predicted_outer_peaks(&coin, 50).unwrap(), (-34, 34));
        assert_eq!(predicted_outer_peaks(&coin, 51).unwrap(), (-35, 35));
    }

    #[test]
    fn local_maxima_of_simple_profile() {
        let d = ProbabilityDistribution::from_points(&[(-2, 0.1), (-1, 0.05), (0, 0.3), (1, 0.05), (2, 0.4), (3, 0.1)]).unwrap();
        assert_eq!(outer_local_maxima(&d, 1, 0.01), Some((-2, 2)));
        assert_eq!(outer_local_maxima(&d, 2, 0.01), Some((2, 2)));
        assert_eq!(outer_local_maxima(&d, 1, 0.5), Some((0, 2)));
        assert_eq!(outer_local_maxima(&d, 1, 0.9), Some((2, 2)));
    }
}
