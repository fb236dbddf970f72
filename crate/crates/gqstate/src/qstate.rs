//! Hermitian-matrix domain types: observables, density matrices,
//! eigendecompositions with a deterministic convention, and discrete
//! pure-state ensembles.

use crate::manifold::PurePoint;
use crate::{tol, Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Max-norm (largest entry modulus) of a complex matrix.
pub fn max_abs_entry(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// A validated D×D Hermitian matrix.
///
/// Construction from raw data tolerates deviations up to
/// [`tol::HERMITICITY`] in max-norm and stores the Hermitian average
/// `(A + A†)/2`, so the stored entries are exactly Hermitian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct HermitianMatrix {
    entries: DMatrix<Complex64>,
}

impl HermitianMatrix {
    pub fn from_entries(raw: &DMatrix<Complex64>) -> Result<Self> {
        if raw.nrows() != raw.ncols() {
            return Err(Error::DimensionMismatch {
                left: raw.nrows(),
                right: raw.ncols(),
            });
        }
        let adjoint = raw.adjoint();
        let deviation = max_abs_entry(&(raw - &adjoint));
        if deviation > tol::HERMITICITY {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self {
            entries: (raw + adjoint).scale(0.5),
        })
    }

    /// Wraps entries known to be exactly Hermitian by construction.
    pub(crate) fn from_entries_unchecked(entries: DMatrix<Complex64>) -> Self {
        debug_assert!(max_abs_entry(&(&entries - entries.adjoint())) == 0.0);
        Self { entries }
    }

    /// Hermitian matrix with the given real diagonal.
    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        Self {
            entries: DMatrix::from_diagonal(&DVector::from_iterator(
                diag.len(),
                diag.iter().map(|&v| Complex64::new(v, 0.0)),
            )),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: DMatrix::zeros(dim, dim),
        }
    }

    /// Rank-one projector `|z⟩⟨z|` onto a pure state.
    pub fn projector(z: &PurePoint) -> Self {
        let v = z.amplitudes();
        Self {
            entries: v * v.adjoint(),
        }
    }

    pub fn pauli_x() -> Self {
        let c = Complex64::new;
        Self {
            entries: DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
        }
    }

    pub fn pauli_y() -> Self {
        let c = Complex64::new;
        Self {
            entries: DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
        }
    }

    pub fn pauli_z() -> Self {
        let c = Complex64::new;
        Self {
            entries: DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn max_abs(&self) -> f64 {
        max_abs_entry(&self.entries)
    }

    pub fn trace_re(&self) -> f64 {
        self.entries.diagonal().iter().map(|z| z.re).sum()
    }

    /// Real pairing `Tr(A B)` of two Hermitian matrices.
    pub fn pairing(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        // Tr(AB) = Σ_{αβ} A_{αβ} conj(B_{αβ}) is real for Hermitian A, B.
        Ok(self
            .entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a * b.conj()).re)
            .sum())
    }

    /// Removes the trace: `A − (Tr A / D)·I`.
    pub fn traceless_part(&self) -> Self {
        let shift = Complex64::new(self.trace_re() / self.dim() as f64, 0.0);
        let mut entries = self.entries.clone();
        for a in 0..self.dim() {
            entries[(a, a)] -= shift;
        }
        Self { entries }
    }
}

/// JSON shape shared by Hermitian and density matrices:
/// `{"dim": D, "re": [[...]], "im": [[...]]}` with row-major D×D arrays.
#[derive(Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn to_raw(&self) -> Result<DMatrix<Complex64>> {
        let d = self.dim;
        let shape_ok = self.re.len() == d
            && self.im.len() == d
            && self.re.iter().all(|row| row.len() == d)
            && self.im.iter().all(|row| row.len() == d);
        if !shape_ok {
            return Err(Error::DimensionMismatch {
                left: d,
                right: self.re.len().max(self.im.len()),
            });
        }
        Ok(DMatrix::from_fn(d, d, |r, c| {
            Complex64::new(self.re[r][c], self.im[r][c])
        }))
    }

    pub fn from_raw(m: &DMatrix<Complex64>) -> Self {
        let d = m.nrows();
        Self {
            dim: d,
            re: (0..d)
                .map(|r| (0..d).map(|c| m[(r, c)].re).collect())
                .collect(),
            im: (0..d)
                .map(|r| (0..d).map(|c| m[(r, c)].im).collect())
                .collect(),
        }
    }
}

impl From<HermitianMatrix> for MatrixJson {
    fn from(h: HermitianMatrix) -> Self {
        Self::from_raw(h.entries())
    }
}

impl TryFrom<MatrixJson> for HermitianMatrix {
    type Error = Error;
    fn try_from(j: MatrixJson) -> Result<Self> {
        HermitianMatrix::from_entries(&j.to_raw()?)
    }
}

/// A Hermitian, positive-semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct DensityMatrix {
    base: HermitianMatrix,
}

/// Validates a raw complex matrix as a density matrix: Hermiticity within
/// [`tol::HERMITICITY`], unit trace within [`tol::TRACE`], and eigenvalues
/// at or above [`tol::PSD_FLOOR`].
pub fn validate_density(raw: &DMatrix<Complex64>) -> Result<DensityMatrix> {
    let base = HermitianMatrix::from_entries(raw)?;
    let trace = base.trace_re();
    if (trace - 1.0).abs() > tol::TRACE {
        return Err(Error::TraceNotOne {
            trace,
            deviation: (trace - 1.0).abs(),
        });
    }
    let eigsys = eigh(&base)?;
    let min_eigenvalue = eigsys.values()[0];
    if min_eigenvalue < tol::PSD_FLOOR {
        return Err(Error::NotPsd { min_eigenvalue });
    }
    Ok(DensityMatrix { base })
}

impl DensityMatrix {
    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            base: HermitianMatrix::from_entries_unchecked(
                DMatrix::identity(dim, dim).scale(1.0 / dim as f64),
            ),
        }
    }

    /// Density of the pure state `|z⟩⟨z|`.
    pub fn pure(z: &PurePoint) -> Self {
        Self {
            base: HermitianMatrix::projector(z),
        }
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        self.base.entries()
    }

    /// Explicit regularization `(1−ε)·ρ + ε·I/D`, lifting the spectrum off
    /// zero. Never applied silently anywhere in the crate.
    pub fn regularized(&self, epsilon: f64) -> Self {
        let d = self.dim();
        let mut entries = self.entries().scale(1.0 - epsilon);
        let shift = Complex64::new(epsilon / d as f64, 0.0);
        for a in 0..d {
            entries[(a, a)] += shift;
        }
        Self {
            base: HermitianMatrix::from_entries_unchecked(entries),
        }
    }

    /// Trace distance `½‖ρ − σ‖₁ = ½ Σ |eig(ρ − σ)|`.
    pub fn trace_distance(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        let diff = HermitianMatrix::from_entries_unchecked(self.entries() - other.entries());
        Ok(eigh(&diff)?.values().iter().map(|v| v.abs()).sum::<f64>() / 2.0)
    }
}

impl From<DensityMatrix> for MatrixJson {
    fn from(d: DensityMatrix) -> Self {
        Self::from_raw(d.entries())
    }
}

impl TryFrom<MatrixJson> for DensityMatrix {
    type Error = Error;
    fn try_from(j: MatrixJson) -> Result<Self> {
        validate_density(&j.to_raw()?)
    }
}

/// Eigendecomposition of a Hermitian matrix with a deterministic convention:
/// eigenvalues ascending, and the **rows** of `basis` are the eigenvectors,
/// each phase-fixed so its first component of modulus > 1e-12 is real
/// positive. Reconstruction is `basis† · diag(values) · basis`.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    values: Vec<f64>,
    basis: DMatrix<Complex64>,
}

/// Decomposes a Hermitian matrix, validating the result: reconstruction and
/// unitarity must hold within [`tol::EIGH_RECONSTRUCTION`] relative to the
/// matrix scale, else the solver is reported as failed.
pub fn eigh(h: &HermitianMatrix) -> Result<EigenSystem> {
    let dim = h.dim();
    let max_abs = h.max_abs();
    let fail = || Error::ConvergenceFailure { dim, max_abs };
    let se = h
        .entries()
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 10_000)
        .ok_or_else(fail)?;

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));

    let values: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let mut basis = DMatrix::zeros(dim, dim);
    for (row, &k) in order.iter().enumerate() {
        let column = se.eigenvectors.column(k);
        let rotation = column
            .iter()
            .find(|z| z.norm() > 1e-12)
            .map(|z| (z / z.norm()).conj())
            .unwrap_or(Complex64::ONE);
        for i in 0..dim {
            // Row `row` of the basis is the adjoint of eigenvector k.
            basis[(row, i)] = (column[i] * rotation).conj();
        }
    }

    let sys = EigenSystem { values, basis };
    let budget = tol::EIGH_RECONSTRUCTION * (1.0 + max_abs);
    let recon_err = max_abs_entry(&(sys.reconstruct() - h.entries()));
    let unit_err = max_abs_entry(&(&sys.basis * sys.basis.adjoint() - DMatrix::identity(dim, dim)));
    if recon_err > budget || unit_err > tol::EIGH_RECONSTRUCTION * 2.0 {
        return Err(fail());
    }
    Ok(sys)
}

impl EigenSystem {
    /// Eigenvalues in ascending order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Unitary whose rows are the eigenvectors: `basis · A · basis†` is
    /// diagonal.
    pub fn basis(&self) -> &DMatrix<Complex64> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Assembles `basis† · diag(d) · basis` for an arbitrary real diagonal —
    /// the matrix with the given spectrum in this eigenframe.
    pub fn assemble(&self, diag: &[f64]) -> DMatrix<Complex64> {
        let dim = self.dim();
        let d = DMatrix::from_diagonal(&DVector::from_iterator(
            dim,
            diag.iter().map(|&v| Complex64::new(v, 0.0)),
        ));
        self.basis.adjoint() * d * &self.basis
    }

    /// `basis† · diag(values) · basis`, which must equal the input matrix.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        self.assemble(&self.values)
    }

    /// Coordinates of a point in this eigenframe: `X = basis · Z`.
    pub fn rotate_to_frame(&self, z: &DVector<Complex64>) -> DVector<Complex64> {
        &self.basis * z
    }

    /// Inverse frame rotation: `Z = basis† · X`.
    pub fn rotate_from_frame(&self, x: &DVector<Complex64>) -> DVector<Complex64> {
        self.basis.adjoint() * x
    }
}

/// Finite convex mixture of pure states.
#[derive(Debug, Clone)]
pub struct DiscreteEnsemble {
    components: Vec<(f64, PurePoint)>,
}

impl DiscreteEnsemble {
    /// Validates weights: each in [0, 1], summing to 1 within
    /// [`tol::WEIGHT_SUM`], and all points of one dimension.
    pub fn new(components: Vec<(f64, PurePoint)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidSimplexPoint {
                detail: "ensemble must have at least one component".into(),
            });
        }
        let dim = components[0].1.dim();
        for (w, point) in &components {
            if !(0.0..=1.0).contains(w) {
                return Err(Error::InvalidSimplexPoint {
                    detail: format!("ensemble weight {w} outside [0, 1]"),
                });
            }
            if point.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: point.dim(),
                });
            }
        }
        let sum: f64 = components.iter().map(|(w, _)| w).sum();
        if (sum - 1.0).abs() > tol::WEIGHT_SUM {
            return Err(Error::InvalidSimplexPoint {
                detail: format!("ensemble weights sum to {sum}, not 1"),
            });
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[(f64, PurePoint)] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components[0].1.dim()
    }
}

/// Density matrix of an ensemble: `Σ_k w_k |Z_k⟩⟨Z_k|`.
pub fn ensemble_density(e: &DiscreteEnsemble) -> Result<DensityMatrix> {
    let dim = e.dim();
    let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
    for (w, point) in e.components() {
        let v = point.amplitudes();
        acc += (v * v.adjoint()).scale(*w);
    }
    validate_density(&acc)
}

/// Value of an observable at a pure state: `⟨Z|O|Z⟩`, real for Hermitian `O`
/// (the imaginary residue is asserted ≤ 1e-12 and discarded).
pub fn observable_value(o: &HermitianMatrix, z: &PurePoint) -> Result<f64> {
    if o.dim() != z.dim() {
        return Err(Error::DimensionMismatch {
            left: o.dim(),
            right: z.dim(),
        });
    }
    let v = z.amplitudes();
    let value = (v.adjoint() * o.entries() * v)[(0, 0)];
    assert!(
        value.im.abs() <= 1e-12,
        "observable value has imaginary residue {}",
        value.im
    );
    Ok(value.re)
}
