//! Monte Carlo verification engine.
//!
//! Every closed-form quantity in this crate (normalization, moment matrices,
//! entropy) can be re-estimated by integrating over CP^{D-1} with random
//! samples; this module provides those estimators so the analytic results
//! are never trusted on faith. Two sampling schemes:
//!
//! * **Self-normalized importance sampling** with the uniform proposal:
//!   draw points flat on the manifold, weight by `w = exp(−Z̄λZ)`, and
//!   average. Exact and cheap for moderate eigenvalue spreads; degrades
//!   (low effective sample size) when the state is concentrated.
//! * **Rejection sampling** in the eigenframe of `λ`: exact draws from the
//!   state itself, with acceptance probability `exp(−(Σ l_a p_a − l_min))`
//!   — the envelope `exp(−l_min)` is tight because the `p_a` sum to one.
//!
//! Standard errors for the self-normalized estimators use the delta method,
//! accumulated in a single pass over sufficient statistics
//! `(Σw, Σw², Σw·m, Σw²·m, Σw²·|m|²)`. Weights are computed relative to the
//! spectral floor of `λ` — `w = exp(−(Z̄λZ − l_min)) ∈ (0, 1]` — so they can
//! never overflow however concentrated the state; the constant cancels in
//! self-normalized ratios and is restored explicitly where an absolute
//! scale matters (the partition estimate). Work is split across a fixed
//! number of deterministic sub-streams (see [`substream_seed`]) and reduced
//! in stream order, so results are reproducible bit-for-bit for a given
//! seed regardless of thread scheduling.

use crate::manifold::{fs_total_volume, substream_seed, PurePoint, UniformSampler};
use crate::maxent::MaxEntState;
use crate::qstate::{max_abs_entry, validate_density, DensityMatrix, HermitianMatrix, MatrixJson};
use crate::{tol, Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Number of independent sub-streams estimation work is split across.
/// Part of the reproducibility contract: the pooled result depends on the
/// seed and this constant only, never on thread scheduling.
pub const N_STREAMS: usize = 8;

/// A scalar Monte Carlo estimate with a delta-method standard error.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScalarEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: usize,
    /// Effective sample size `(Σw)² / Σw²`.
    pub ess: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub acceptance_rate: Option<f64>,
}

impl ScalarEstimate {
    /// Whether `target` lies within `k` standard errors of the estimate.
    pub fn within_sigma(&self, target: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.std_error
    }
}

/// A Hermitian-matrix Monte Carlo estimate with per-entry standard errors.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "MatrixEstimateJson", into = "MatrixEstimateJson")]
pub struct MatrixEstimate {
    pub value: DMatrix<Complex64>,
    /// Per-entry standard error of the complex estimate (modulus scale).
    pub std_error: DMatrix<f64>,
    pub n_samples: usize,
    pub ess: f64,
    pub acceptance_rate: Option<f64>,
}

impl MatrixEstimate {
    /// Max-norm deviation of the estimate from a target matrix.
    pub fn max_deviation(&self, target: &DMatrix<Complex64>) -> f64 {
        max_abs_entry(&(&self.value - target))
    }

    /// Whether every entry of `target` lies within `k` standard errors.
    pub fn entrywise_within(&self, target: &DMatrix<Complex64>, k: f64) -> bool {
        self.value
            .iter()
            .zip(target.iter())
            .zip(self.std_error.iter())
            .all(|((est, want), se)| (est - want).norm() <= k * se)
    }

    /// Renormalizes the trace and validates the estimate as a density
    /// matrix (the raw estimate has unit trace only up to round-off).
    pub fn as_density(&self) -> Result<DensityMatrix> {
        let trace = self.value.diagonal().iter().map(|z| z.re).sum::<f64>();
        validate_density(&self.value.scale(1.0 / trace))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct MatrixEstimateJson {
    value: MatrixJson,
    std_error: MatrixJson,
    n_samples: usize,
    ess: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    acceptance_rate: Option<f64>,
}

impl From<MatrixEstimate> for MatrixEstimateJson {
    fn from(e: MatrixEstimate) -> Self {
        Self {
            value: MatrixJson::from_raw(&e.value),
            std_error: MatrixJson::from_raw(&e.std_error.map(|x| Complex64::new(x, 0.0))),
            n_samples: e.n_samples,
            ess: e.ess,
            acceptance_rate: e.acceptance_rate,
        }
    }
}

impl TryFrom<MatrixEstimateJson> for MatrixEstimate {
    type Error = Error;
    fn try_from(j: MatrixEstimateJson) -> Result<Self> {
        Ok(Self {
            value: j.value.to_raw()?,
            std_error: j.std_error.to_raw()?.map(|z| z.re),
            n_samples: j.n_samples,
            ess: j.ess,
            acceptance_rate: j.acceptance_rate,
        })
    }
}

/// `Re(v† M v)` without temporaries; `M` must be Hermitian.
fn quad_form(m: &DMatrix<Complex64>, v: &DVector<Complex64>) -> f64 {
    let d = v.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..d {
        let mut col = Complex64::new(0.0, 0.0);
        for j in 0..d {
            col += v[j].conj() * m[(j, k)];
        }
        acc += col * v[k];
    }
    acc.re
}

fn stream_counts(n: usize) -> [usize; N_STREAMS] {
    let base = n / N_STREAMS;
    let extra = n % N_STREAMS;
    core::array::from_fn(|k| base + usize::from(k < extra))
}

/// Runs `f(stream_index, samples_for_stream)` across the fixed sub-streams
/// in parallel and returns the per-stream results in stream order.
fn map_streams<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, usize) -> T + Sync,
{
    let counts = stream_counts(n);
    (0..N_STREAMS)
        .into_par_iter()
        .map(|k| f(k as u64, counts[k]))
        .collect()
}

/// Sufficient statistics for a self-normalized scalar estimate.
#[derive(Clone, Copy)]
struct ScalarStats {
    w1: f64,
    w2: f64,
    wm: f64,
    w2m: f64,
    w2mm: f64,
}

impl ScalarStats {
    fn zero() -> Self {
        Self {
            w1: 0.0,
            w2: 0.0,
            wm: 0.0,
            w2m: 0.0,
            w2mm: 0.0,
        }
    }

    fn push(&mut self, w: f64, m: f64) {
        let ww = w * w;
        self.w1 += w;
        self.w2 += ww;
        self.wm += w * m;
        self.w2m += ww * m;
        self.w2mm += ww * m * m;
    }

    fn merge(mut self, other: Self) -> Self {
        self.w1 += other.w1;
        self.w2 += other.w2;
        self.wm += other.wm;
        self.w2m += other.w2m;
        self.w2mm += other.w2mm;
        self
    }

    /// Delta-method point estimate and standard error:
    /// `Var ≈ Σ w²(m − R̂)² / (Σw)²`, expanded so one pass suffices.
    fn finish(&self, n: usize) -> Result<ScalarEstimate> {
        let ess = self.w1 * self.w1 / self.w2;
        check_ess(ess)?;
        let value = self.wm / self.w1;
        let var = (self.w2mm - 2.0 * value * self.w2m + value * value * self.w2).max(0.0)
            / (self.w1 * self.w1);
        Ok(ScalarEstimate {
            value,
            std_error: var.sqrt(),
            n_samples: n,
            ess,
            acceptance_rate: None,
        })
    }
}

/// Sufficient statistics for the Hermitian monomial matrix `Z Z̄†`.
struct MatrixStats {
    w1: f64,
    w2: f64,
    m1: DMatrix<Complex64>,
    m2: DMatrix<Complex64>,
    mm: DMatrix<f64>,
}

impl MatrixStats {
    fn zero(d: usize) -> Self {
        Self {
            w1: 0.0,
            w2: 0.0,
            m1: DMatrix::zeros(d, d),
            m2: DMatrix::zeros(d, d),
            mm: DMatrix::zeros(d, d),
        }
    }

    fn push(&mut self, w: f64, v: &DVector<Complex64>) {
        let ww = w * w;
        self.w1 += w;
        self.w2 += ww;
        let d = v.len();
        for k in 0..d {
            let ck = v[k].conj();
            for j in 0..d {
                let m = v[j] * ck;
                self.m1[(j, k)] += w * m;
                self.m2[(j, k)] += ww * m;
                self.mm[(j, k)] += ww * m.norm_sqr();
            }
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.w1 += other.w1;
        self.w2 += other.w2;
        self.m1 += other.m1;
        self.m2 += other.m2;
        self.mm += other.mm;
        self
    }

    fn finish(&self, n: usize) -> Result<MatrixEstimate> {
        let ess = self.w1 * self.w1 / self.w2;
        check_ess(ess)?;
        let value = self.m1.scale(1.0 / self.w1);
        let d = value.nrows();
        let mut std_error = DMatrix::zeros(d, d);
        for k in 0..d {
            for j in 0..d {
                let r = value[(j, k)];
                let var = (self.mm[(j, k)] - 2.0 * (r.conj() * self.m2[(j, k)]).re
                    + r.norm_sqr() * self.w2)
                    .max(0.0)
                    / (self.w1 * self.w1);
                std_error[(j, k)] = var.sqrt();
            }
        }
        Ok(MatrixEstimate {
            value,
            std_error,
            n_samples: n,
            ess,
            acceptance_rate: None,
        })
    }
}

// The negated comparison is load-bearing: an NaN effective sample size
// (all-zero weights) must fail the floor check, and `ess < floor` is false
// for NaN.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn check_ess(ess: f64) -> Result<()> {
    if !(ess >= tol::ESS_FLOOR) {
        return Err(Error::DegenerateWeights {
            ess,
            floor: tol::ESS_FLOOR,
        });
    }
    Ok(())
}

/// Estimates the moment matrix `E_q[Z^α Z̄^β]` by importance sampling with
/// the uniform proposal. For a solved state this reproduces the input
/// density matrix — the crate's principal verification path.
pub fn estimate_density_matrix(state: &MaxEntState, n: usize, seed: u64) -> Result<MatrixEstimate> {
    assert!(n >= 1_000, "need at least 10^3 samples");
    let d = state.dim();
    let lambda = state.multipliers().entries().clone();
    let shift = state.eigensystem().values()[0];
    let per_stream = map_streams(n, |k, count| {
        let mut sampler = UniformSampler::substream(d, seed, k);
        let mut stats = MatrixStats::zero(d);
        for _ in 0..count {
            let point = sampler.draw();
            let w = (shift - quad_form(&lambda, point.amplitudes())).exp();
            stats.push(w, point.amplitudes());
        }
        stats
    });
    per_stream
        .into_iter()
        .fold(MatrixStats::zero(d), MatrixStats::merge)
        .finish(n)
}

/// Estimates the geometric entropy `−E_q[log q]` by importance sampling,
/// using `−log q(Z) = Z̄λZ + log Z`.
pub fn estimate_entropy(state: &MaxEntState, n: usize, seed: u64) -> Result<ScalarEstimate> {
    assert!(n >= 1_000, "need at least 10^3 samples");
    let d = state.dim();
    let lambda = state.multipliers().entries().clone();
    let shift = state.eigensystem().values()[0];
    let log_z = state.log_z();
    let per_stream = map_streams(n, |k, count| {
        let mut sampler = UniformSampler::substream(d, seed, k);
        let mut stats = ScalarStats::zero();
        for _ in 0..count {
            let point = sampler.draw();
            let exponent = quad_form(&lambda, point.amplitudes());
            stats.push((shift - exponent).exp(), exponent + log_z);
        }
        stats
    });
    per_stream
        .into_iter()
        .fold(ScalarStats::zero(), ScalarStats::merge)
        .finish(n)
}

/// Estimates the expectation `E_q[Z̄ O Z]` of an observable function.
/// Consistency: `O = identity` gives exactly 1 with zero standard error,
/// because the weights cancel in the self-normalized ratio.
pub fn estimate_observable(
    state: &MaxEntState,
    observable: &HermitianMatrix,
    n: usize,
    seed: u64,
) -> Result<ScalarEstimate> {
    assert!(n >= 1_000, "need at least 10^3 samples");
    if observable.dim() != state.dim() {
        return Err(Error::DimensionMismatch {
            left: observable.dim(),
            right: state.dim(),
        });
    }
    let d = state.dim();
    let lambda = state.multipliers().entries().clone();
    let shift = state.eigensystem().values()[0];
    let obs = observable.entries().clone();
    let per_stream = map_streams(n, |k, count| {
        let mut sampler = UniformSampler::substream(d, seed, k);
        let mut stats = ScalarStats::zero();
        for _ in 0..count {
            let point = sampler.draw();
            let w = (shift - quad_form(&lambda, point.amplitudes())).exp();
            stats.push(w, quad_form(&obs, point.amplitudes()));
        }
        stats
    });
    per_stream
        .into_iter()
        .fold(ScalarStats::zero(), ScalarStats::merge)
        .finish(n)
}

/// Plain (not self-normalized) importance-sampling estimate of the
/// partition function `Z = ∫ exp(−Z̄λZ) dV`: mean weight times the total
/// manifold volume. Cross-checks `exp(log_z)`; dividing by the closed form
/// turns it into a normalization check `∫ q dV ≈ 1`.
pub fn estimate_partition_function(
    state: &MaxEntState,
    n: usize,
    seed: u64,
) -> Result<ScalarEstimate> {
    assert!(n >= 1_000, "need at least 10^3 samples");
    let d = state.dim();
    let lambda = state.multipliers().entries().clone();
    let shift = state.eigensystem().values()[0];
    let per_stream = map_streams(n, |k, count| {
        let mut sampler = UniformSampler::substream(d, seed, k);
        let mut acc = (0.0f64, 0.0f64);
        for _ in 0..count {
            let point = sampler.draw();
            let w = (shift - quad_form(&lambda, point.amplitudes())).exp();
            acc.0 += w;
            acc.1 += w * w;
        }
        acc
    });
    let (w1, w2) = per_stream
        .into_iter()
        .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let ess = w1 * w1 / w2;
    check_ess(ess)?;
    // Restore the spectral-floor constant factored out of the weights.
    let scale = fs_total_volume(d) * (-shift).exp();
    let nf = n as f64;
    let sample_var = ((w2 - w1 * w1 / nf) / (nf - 1.0)).max(0.0);
    Ok(ScalarEstimate {
        value: scale * w1 / nf,
        std_error: scale * (sample_var / nf).sqrt(),
        n_samples: n,
        ess,
        acceptance_rate: None,
    })
}

/// Exact draws from a max-ent state by rejection.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub points: Vec<PurePoint>,
    /// Accepted / proposed.
    pub acceptance_rate: f64,
    pub proposals: usize,
}

/// Draws `n` exact samples from the state by rejection sampling in the
/// eigenframe of `λ`: probabilities flat on the simplex, phases uniform,
/// acceptance probability `exp(−(Σ l_a p_a − l_min))`. The envelope is
/// tight (the exponent attains `l_min` at a simplex vertex), so acceptance
/// degrades only with the eigenvalue spread, never with phases. Accepted
/// frame points are rotated back to the original basis.
///
/// Arbitrarily low acceptance is permitted and reported, not an error; the
/// proposal count per accepted point is unbounded but almost-surely finite.
pub fn sample_maxent(state: &MaxEntState, n: usize, seed: u64) -> SampleBatch {
    assert!(n >= 1, "need at least one sample");
    let d = state.dim();
    let nodes = state.eigensystem().values().to_vec();
    let l_min = nodes[0];
    let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(seed, 0));
    let mut points = Vec::with_capacity(n);
    let mut proposals = 0usize;
    let mut probs = vec![0.0f64; d];
    while points.len() < n {
        proposals += 1;
        // Flat Dirichlet via normalized exponentials, as in UniformSampler.
        let mut total = 0.0;
        for p in probs.iter_mut() {
            let u: f64 = rng.random();
            *p = -(-u).ln_1p();
            total += *p;
        }
        for p in probs.iter_mut() {
            *p /= total;
        }
        let mut exponent = 0.0;
        for (p, l) in probs.iter().zip(&nodes) {
            exponent += p * l;
        }
        let mut phases = vec![0.0f64; d];
        for phase in phases.iter_mut().skip(1) {
            *phase = rng.random_range(0.0..TAU);
        }
        let u: f64 = rng.random();
        if u >= (-(exponent - l_min)).exp() {
            continue;
        }
        let frame = DVector::from_iterator(
            d,
            probs
                .iter()
                .zip(&phases)
                .map(|(&p, &nu)| Complex64::from_polar(p.sqrt(), nu)),
        );
        let original = state.eigensystem().rotate_from_frame(&frame);
        points.push(
            PurePoint::from_homogeneous(original.as_slice()).expect("rotated unit vector"),
        );
    }
    SampleBatch {
        points,
        acceptance_rate: n as f64 / proposals as f64,
        proposals,
    }
}

/// Plain empirical mean of the monomial matrices `Z Z̄†` over a set of
/// points (no weights) — the moment estimate matching exact draws.
pub fn empirical_moment_matrix(points: &[PurePoint]) -> DMatrix<Complex64> {
    assert!(!points.is_empty());
    let d = points[0].dim();
    let mut acc = DMatrix::zeros(d, d);
    for point in points {
        let v = point.amplitudes();
        for k in 0..d {
            let ck = v[k].conj();
            for j in 0..d {
                acc[(j, k)] += v[j] * ck;
            }
        }
    }
    acc.scale(1.0 / points.len() as f64)
}

#[cfg(test)]
// Test baselines keep every digit their oracle printed, value-changing or not.
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::partition::moments_matrix;
    use approx::assert_abs_diff_eq;

    fn state_diag(values: &[f64]) -> MaxEntState {
        MaxEntState::from_multipliers(&HermitianMatrix::from_real_diagonal(values)).unwrap()
    }

    #[test]
    fn uniform_state_moments_are_maximally_mixed() {
        let state = MaxEntState::uniform(2);
        let est = estimate_density_matrix(&state, 20_000, 7).unwrap();
        let target = DensityMatrix::maximally_mixed(2);
        assert!(est.entrywise_within(target.entries(), 3.0));
        assert!(est.max_deviation(target.entries()) < 0.02);
        // All weights are 1: the effective sample size is the sample size.
        assert_abs_diff_eq!(est.ess, 20_000.0, epsilon = 1e-6);
        assert!(est.as_density().is_ok());
    }

    #[test]
    fn identity_observable_has_no_statistical_error() {
        // The weights cancel in the self-normalized ratio, so the estimate
        // is exact up to the round-off of the normalized amplitudes.
        let state = state_diag(&[0.0, 1.0, 2.5]);
        let est = estimate_observable(&state, &HermitianMatrix::identity(3), 5_000, 11).unwrap();
        assert_abs_diff_eq!(est.value, 1.0, epsilon = 1e-14);
        assert!(est.std_error <= 1e-14);
    }

    #[test]
    fn uniform_projector_expectation_is_half() {
        let state = MaxEntState::uniform(2);
        let proj = HermitianMatrix::projector(&PurePoint::basis_state(2, 0));
        let est = estimate_observable(&state, &proj, 50_000, 3).unwrap();
        assert!(est.within_sigma(0.5, 3.0), "value {}", est.value);
        assert!(est.std_error > 0.0);
    }

    #[test]
    fn two_node_moments_match_closed_form() {
        let state = state_diag(&[0.0, 1.0]);
        let est = estimate_density_matrix(&state, 200_000, 1).unwrap();
        let target = moments_matrix(state.multipliers()).unwrap();
        assert!(est.entrywise_within(target.entries(), 3.0));
        assert_abs_diff_eq!(
            est.value[(0, 0)].re,
            0.58197670686932642,
            epsilon = 3.0 * est.std_error[(0, 0)] + 1e-12
        );
    }

    #[test]
    fn entropy_estimates_match_analytic_values() {
        const LOG_PI: f64 = 1.1447298858494002;
        let est = estimate_entropy(&MaxEntState::uniform(2), 100_000, 5).unwrap();
        // Uniform state: log q is constant, so the estimator is exact up to
        // weight round-off.
        assert_abs_diff_eq!(est.value, LOG_PI, epsilon = 1e-12);

        let est3 = estimate_entropy(&MaxEntState::uniform(3), 100_000, 5).unwrap();
        assert_abs_diff_eq!(est3.value, 1.596312591138855, epsilon = 1e-12);

        let skew = state_diag(&[0.0, 2.0]);
        let closed = crate::maxent::geometric_entropy(
            &skew,
            &validate_density(&moments_matrix(skew.multipliers()).unwrap().entries().clone())
                .unwrap(),
        )
        .unwrap();
        let est = estimate_entropy(&skew, 150_000, 9).unwrap();
        assert!(est.within_sigma(closed, 3.0), "{} vs {closed}", est.value);
        assert!(est.std_error > 0.0);
    }

    #[test]
    fn partition_estimate_matches_closed_form() {
        let state = state_diag(&[0.0, 1.0]);
        let est = estimate_partition_function(&state, 200_000, 2).unwrap();
        assert!(est.within_sigma(state.log_z().exp(), 3.0));

        // Uniform: every weight is exactly 1.
        let est = estimate_partition_function(&MaxEntState::uniform(3), 1_000, 2).unwrap();
        assert_abs_diff_eq!(est.value, fs_total_volume(3), epsilon = 1e-12);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn estimates_are_deterministic_per_seed() {
        let state = state_diag(&[0.0, 1.5]);
        let a = estimate_density_matrix(&state, 10_000, 42).unwrap();
        let b = estimate_density_matrix(&state, 10_000, 42).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.std_error, b.std_error);
        let c = estimate_density_matrix(&state, 10_000, 43).unwrap();
        assert!(a.value != c.value);
    }

    #[test]
    fn concentrated_state_trips_ess_floor() {
        let state = state_diag(&[0.0, 800.0]);
        match estimate_density_matrix(&state, 2_000, 1) {
            Err(Error::DegenerateWeights { ess, floor }) => {
                assert!(ess < floor);
                assert_eq!(floor, tol::ESS_FLOOR);
            }
            other => panic!("expected DegenerateWeights, got {other:?}"),
        }
    }

    #[test]
    fn rejection_sampler_uniform_accepts_everything() {
        let batch = sample_maxent(&MaxEntState::uniform(2), 500, 17);
        assert_eq!(batch.points.len(), 500);
        assert_eq!(batch.acceptance_rate, 1.0);
        assert_eq!(batch.proposals, 500);

        let again = sample_maxent(&MaxEntState::uniform(2), 500, 17);
        for (a, b) in batch.points.iter().zip(&again.points) {
            assert_eq!(a.amplitudes(), b.amplitudes());
        }
    }

    #[test]
    fn rejection_sampler_matches_closed_form_moments() {
        let state = state_diag(&[0.0, 1.0]);
        let batch = sample_maxent(&state, 30_000, 23);
        assert!(batch.acceptance_rate < 1.0 && batch.acceptance_rate > 0.4);
        let emp = empirical_moment_matrix(&batch.points);
        let target = moments_matrix(state.multipliers()).unwrap();
        // Binomial-scale bound: sd of p per sample ≤ 0.5.
        let bound = 3.0 * 0.5 / (batch.points.len() as f64).sqrt();
        assert!((emp[(1, 1)].re - 0.41802329313067358).abs() < bound);
        assert!(max_abs_entry(&(&emp - target.entries())) < 2.0 * bound);
    }

    #[test]
    fn rejection_and_importance_agree_off_diagonal() {
        // A multiplier with a nontrivial eigenframe (Pauli-X direction).
        let lambda = HermitianMatrix::from_entries(&DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        ))
        .unwrap();
        let state = MaxEntState::from_multipliers(&lambda).unwrap();
        let target = moments_matrix(state.multipliers()).unwrap();

        let imp = estimate_density_matrix(&state, 100_000, 6).unwrap();
        assert!(imp.entrywise_within(target.entries(), 3.5));

        let batch = sample_maxent(&state, 30_000, 6);
        let emp = empirical_moment_matrix(&batch.points);
        let bound = 3.0 * 0.5 / (batch.points.len() as f64).sqrt();
        assert!(max_abs_entry(&(&emp - target.entries())) < 2.0 * bound);
    }

    #[test]
    fn standard_error_shrinks_like_root_n() {
        let state = state_diag(&[0.0, 2.0]);
        let small = estimate_entropy(&state, 25_000, 31).unwrap();
        let large = estimate_entropy(&state, 100_000, 31).unwrap();
        let ratio = large.std_error / small.std_error;
        assert!(
            (0.35..=0.65).contains(&ratio),
            "expected ≈ 0.5, got {ratio}"
        );
    }

    #[test]
    fn estimate_json_round_trip() {
        let state = state_diag(&[0.0, 1.0]);
        let est = estimate_density_matrix(&state, 5_000, 4).unwrap();
        let text = serde_json::to_string(&est).unwrap();
        assert!(text.contains("\"stdError\""));
        assert!(text.contains("\"nSamples\""));
        assert!(!text.contains("acceptanceRate"));
        let back: MatrixEstimate = serde_json::from_str(&text).unwrap();
        assert_eq!(back.value, est.value);
        assert_eq!(back.ess, est.ess);

        let scalar = estimate_entropy(&state, 5_000, 4).unwrap();
        let text = serde_json::to_string(&scalar).unwrap();
        let back: ScalarEstimate = serde_json::from_str(&text).unwrap();
        assert_eq!(back.value, scalar.value);
    }
}
