//! Simulated measurement frontend: generate POVM outcome counts from a
//! known density matrix (Born rule), then reconstruct a density matrix from
//! frequencies by linear inversion with a projection back to the PSD cone.
//! The reconstructed matrix feeds the max-ent estimator, completing the
//! counts → density → geometric-state pipeline.
//!
//! Reconstruction is deliberately plain least squares: the goal is a
//! dependable informationally-complete frontend, not state-of-the-art
//! tomography (no likelihood maximization, no error models).

use crate::manifold::substream_seed;
use crate::qstate::{eigh, validate_density, DensityMatrix, HermitianMatrix, MatrixJson};
use crate::{tol, Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// A positive operator-valued measure: effects `E_j ⪰ 0` with `Σ E_j = I`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "PovmJson", into = "PovmJson")]
pub struct Povm {
    effects: Vec<HermitianMatrix>,
}

impl Povm {
    /// Validates effect positivity (eigenvalues ≥ −1e-10) and completeness
    /// (`Σ E_j = I` within 1e-10 max-norm).
    pub fn new(effects: Vec<HermitianMatrix>) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::InvalidPovm("no effects given".into()));
        }
        let dim = effects[0].dim();
        let mut sum = DMatrix::<Complex64>::zeros(dim, dim);
        for (j, effect) in effects.iter().enumerate() {
            if effect.dim() != dim {
                return Err(Error::InvalidPovm(format!(
                    "effect {j} has dimension {} but effect 0 has {dim}",
                    effect.dim()
                )));
            }
            let min_eig = eigh(effect)?.values()[0];
            if min_eig < -tol::POVM {
                return Err(Error::InvalidPovm(format!(
                    "effect {j} has negative eigenvalue {min_eig:.3e}"
                )));
            }
            sum += effect.entries();
        }
        sum -= DMatrix::<Complex64>::identity(dim, dim);
        let gap = crate::qstate::max_abs_entry(&sum);
        if gap > tol::POVM {
            return Err(Error::InvalidPovm(format!(
                "effects sum to identity only within {gap:.3e}"
            )));
        }
        Ok(Self { effects })
    }

    pub fn effects(&self) -> &[HermitianMatrix] {
        &self.effects
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn n_outcomes(&self) -> usize {
        self.effects.len()
    }
}

#[derive(Serialize, Deserialize)]
struct PovmJson {
    effects: Vec<MatrixJson>,
}

impl From<Povm> for PovmJson {
    fn from(p: Povm) -> Self {
        Self {
            effects: p
                .effects
                .iter()
                .map(|e| MatrixJson::from_raw(e.entries()))
                .collect(),
        }
    }
}

impl TryFrom<PovmJson> for Povm {
    type Error = Error;
    fn try_from(j: PovmJson) -> Result<Self> {
        let effects = j
            .effects
            .iter()
            .map(|m| HermitianMatrix::from_entries(&m.to_raw()?))
            .collect::<Result<Vec<_>>>()?;
        Povm::new(effects)
    }
}

/// The three two-outcome Pauli measurements `{(I ± P)/2}` for `P = X, Y, Z`
/// — jointly informationally complete for a qubit.
pub fn pauli_qubit_povms() -> Vec<Povm> {
    let half = |p: &HermitianMatrix, sign: f64| {
        let m = (DMatrix::<Complex64>::identity(2, 2) + p.entries().scale(sign)).scale(0.5);
        HermitianMatrix::from_entries(&m).expect("Pauli effects are Hermitian")
    };
    [
        HermitianMatrix::pauli_x(),
        HermitianMatrix::pauli_y(),
        HermitianMatrix::pauli_z(),
    ]
    .iter()
    .map(|p| Povm::new(vec![half(p, 1.0), half(p, -1.0)]).expect("Pauli POVMs are valid"))
    .collect()
}

/// Outcome counts for one POVM.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CountRecordJson", into = "CountRecordJson")]
pub struct CountRecord {
    counts: Vec<u64>,
    shots: u64,
}

impl CountRecord {
    pub fn new(counts: Vec<u64>) -> Self {
        let shots = counts.iter().sum();
        Self { counts, shots }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    /// Empirical outcome frequencies.
    pub fn frequencies(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.shots as f64)
            .collect()
    }
}

#[derive(Serialize, Deserialize)]
struct CountRecordJson {
    counts: Vec<u64>,
    shots: u64,
}

impl From<CountRecord> for CountRecordJson {
    fn from(r: CountRecord) -> Self {
        Self {
            counts: r.counts,
            shots: r.shots,
        }
    }
}

impl TryFrom<CountRecordJson> for CountRecord {
    type Error = Error;
    fn try_from(j: CountRecordJson) -> Result<Self> {
        let total: u64 = j.counts.iter().sum();
        if total != j.shots {
            return Err(Error::InvalidPovm(format!(
                "counts sum to {total} but shots field says {}",
                j.shots
            )));
        }
        Ok(CountRecord {
            counts: j.counts,
            shots: j.shots,
        })
    }
}

/// Born-rule outcome probabilities `p_j = Tr(E_j ρ)`; nonnegative and
/// summing to one within 1e-10 for any valid POVM/density pair.
pub fn outcome_probabilities(rho: &DensityMatrix, povm: &Povm) -> Result<Vec<f64>> {
    if rho.dim() != povm.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: povm.dim(),
        });
    }
    let mut probs = Vec::with_capacity(povm.n_outcomes());
    for effect in povm.effects() {
        let p = effect.pairing(rho.matrix())?;
        if p < -tol::POVM {
            return Err(Error::InvalidPovm(format!(
                "negative outcome probability {p:.3e}"
            )));
        }
        probs.push(p.max(0.0));
    }
    let total: f64 = probs.iter().sum();
    debug_assert!((total - 1.0).abs() <= tol::POVM);
    Ok(probs)
}

/// Draws a multinomial count vector from the Born probabilities, one
/// categorical draw per shot; deterministic for a fixed seed.
pub fn simulate_counts(
    rho: &DensityMatrix,
    povm: &Povm,
    shots: u64,
    seed: u64,
) -> Result<CountRecord> {
    assert!(shots >= 1, "need at least one shot");
    let probs = outcome_probabilities(rho, povm)?;
    let total: f64 = probs.iter().sum();
    let mut cumulative = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in &probs {
        acc += p / total;
        cumulative.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(seed, 0));
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        let u: f64 = rng.random();
        let j = cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(probs.len() - 1);
        counts[j] += 1;
    }
    Ok(CountRecord::new(counts))
}

/// Orthonormal basis of traceless Hermitian matrices under `Tr(AB)`:
/// real and imaginary off-diagonal pairs, then diagonal Helmert directions.
fn traceless_hermitian_basis(d: usize) -> Vec<DMatrix<Complex64>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in (j + 1)..d {
            let mut re = DMatrix::<Complex64>::zeros(d, d);
            re[(j, k)] = Complex64::new(s, 0.0);
            re[(k, j)] = Complex64::new(s, 0.0);
            basis.push(re);
            let mut im = DMatrix::<Complex64>::zeros(d, d);
            im[(j, k)] = Complex64::new(0.0, -s);
            im[(k, j)] = Complex64::new(0.0, s);
            basis.push(im);
        }
    }
    for k in 1..d {
        let norm = (k as f64 * (k + 1) as f64).sqrt();
        let mut diag = DMatrix::<Complex64>::zeros(d, d);
        for i in 0..k {
            diag[(i, i)] = Complex64::new(1.0 / norm, 0.0);
        }
        diag[(k, k)] = Complex64::new(-(k as f64) / norm, 0.0);
        basis.push(diag);
    }
    basis
}

fn real_pairing(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Least-squares reconstruction from empirical frequencies.
///
/// Writes `ρ = I/D + Σ_m x_m G_m` over an orthonormal traceless basis and
/// solves the stacked equations `Tr(E_j ρ) = f_j` in the least-squares
/// sense, then projects onto the PSD cone. Informational completeness is
/// checked first: the singular-value rank (relative tolerance 1e-10) of the
/// full design matrix, including the identity direction, must be `D²`.
pub fn linear_inversion_frequencies(
    records: &[(Povm, Vec<f64>)],
) -> Result<DensityMatrix> {
    assert!(!records.is_empty(), "no measurement records");
    let d = records[0].0.dim();
    for (povm, freqs) in records {
        if povm.dim() != d {
            return Err(Error::DimensionMismatch {
                left: d,
                right: povm.dim(),
            });
        }
        assert_eq!(
            povm.n_outcomes(),
            freqs.len(),
            "frequency vector does not match POVM outcome count"
        );
    }
    let basis = traceless_hermitian_basis(d);
    let n_rows: usize = records.iter().map(|(p, _)| p.n_outcomes()).sum();
    let n_cols = basis.len();

    // Full design over {I/√D} ∪ basis for the completeness rank check.
    let mut full = DMatrix::<f64>::zeros(n_rows, n_cols + 1);
    let mut reduced = DMatrix::<f64>::zeros(n_rows, n_cols);
    let mut rhs = DVector::<f64>::zeros(n_rows);
    let id_scale = 1.0 / (d as f64).sqrt();
    let mut row = 0;
    for (povm, freqs) in records {
        for (effect, &f) in povm.effects().iter().zip(freqs) {
            full[(row, 0)] = effect.trace_re() * id_scale;
            for (m, g) in basis.iter().enumerate() {
                let v = real_pairing(g, effect.entries());
                full[(row, m + 1)] = v;
                reduced[(row, m)] = v;
            }
            rhs[row] = f - effect.trace_re() / d as f64;
            row += 1;
        }
    }

    let svd = full.svd(false, false);
    let sigma_max = svd.singular_values.max();
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > tol::GRAM_RANK * sigma_max)
        .count();
    if rank < d * d {
        return Err(Error::NotInformationallyComplete {
            rank,
            required: d * d,
        });
    }

    let svd = reduced.svd(true, true);
    let cutoff = tol::GRAM_RANK * svd.singular_values.max();
    let x = svd
        .solve(&rhs, cutoff)
        .expect("SVD solve on rank-checked design");

    let mut estimate = DMatrix::<Complex64>::identity(d, d).scale(1.0 / d as f64);
    for (m, g) in basis.iter().enumerate() {
        estimate += g.scale(x[m]);
    }
    project_to_density(&HermitianMatrix::from_entries(&estimate)?)
}

/// [`linear_inversion_frequencies`] on finite-shot counts.
pub fn linear_inversion(records: &[(Povm, CountRecord)]) -> Result<DensityMatrix> {
    let freq_records: Vec<(Povm, Vec<f64>)> = records
        .iter()
        .map(|(p, c)| (p.clone(), c.frequencies()))
        .collect();
    linear_inversion_frequencies(&freq_records)
}

/// Projects a unit-trace Hermitian matrix onto the density-matrix cone:
/// clip negative eigenvalues to zero, then remove the surplus trace by the
/// uniform waterfilling that zeroes the smallest eigenvalues first (the
/// Euclidean projection onto the spectral simplex). Idempotent: a valid
/// density matrix is returned unchanged.
pub fn project_to_density(h: &HermitianMatrix) -> Result<DensityMatrix> {
    let sys = eigh(h)?;
    let mut values: Vec<f64> = sys.values().iter().map(|&v| v.max(0.0)).collect();
    if values.iter().sum::<f64>() <= 0.0 {
        return Ok(DensityMatrix::maximally_mixed(h.dim()));
    }
    // Values ascending: zero out entries too small to survive the uniform
    // subtraction, smallest first, then subtract the final share.
    loop {
        let positive: Vec<usize> = (0..values.len()).filter(|&i| values[i] > 0.0).collect();
        let surplus: f64 = values.iter().sum::<f64>() - 1.0;
        let share = surplus / positive.len() as f64;
        if let Some(&i) = positive.iter().find(|&&i| values[i] <= share) {
            values[i] = 0.0;
            continue;
        }
        for &i in &positive {
            values[i] -= share;
        }
        break;
    }
    validate_density(&sys.assemble(&values))
}
