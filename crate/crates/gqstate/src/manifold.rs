//! Coordinates and uniform sampling on the pure-state manifold CP^{D-1}.
//!
//! A pure state is a ray in C^D; we represent it by its normalized
//! homogeneous coordinates `Z^α` with a global-phase gauge, or equivalently by
//! probability + phase coordinates `Z^α = √p_α · e^{iν_α}` where `p` lies on
//! the (D−1)-simplex and the D−1 phases `ν_α` (α ≥ 1) live on the torus. In
//! these coordinates the natural (Fubini–Study) volume element is the flat
//! product `∏_{α=1}^{D-1} dp_α dν_α / 2`, so the uniform distribution is
//! exactly "flat Dirichlet on the simplex × independent uniform phases" and
//! can be sampled directly.

use crate::{tol, Error, Result};
use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::io::{self, Write};

/// A point of CP^{D-1}: normalized amplitudes with the global-phase gauge
/// fixed so that the first non-vanishing component is real and nonnegative.
///
/// Components may be exactly zero (boundary of the simplex); the phase of a
/// zero component is conventionally 0.
#[derive(Debug, Clone, PartialEq)]
pub struct PurePoint {
    amplitudes: DVector<Complex64>,
}

impl PurePoint {
    /// Builds a point from probability + phase coordinates.
    ///
    /// `probs` must be nonnegative and sum to 1 within [`tol::SIMPLEX_SUM`]
    /// (the sum is then normalized away exactly); `phases` holds `ν_α` for
    /// `α = 1..D-1` and must be finite. The result is gauge-canonicalized.
    pub fn to_homogeneous(probs: &[f64], phases: &[f64]) -> Result<Self> {
        let dim = probs.len();
        if dim == 0 {
            return Err(Error::InvalidSimplexPoint {
                detail: "empty probability vector".into(),
            });
        }
        if phases.len() + 1 != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: phases.len() + 1,
            });
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidSimplexPoint {
                detail: format!("negative or non-finite probability {p}"),
            });
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > tol::SIMPLEX_SUM {
            return Err(Error::InvalidSimplexPoint {
                detail: format!("probabilities sum to {sum}, not 1"),
            });
        }
        if let Some(nu) = phases.iter().find(|nu| !nu.is_finite()) {
            return Err(Error::InvalidSimplexPoint {
                detail: format!("non-finite phase {nu}"),
            });
        }
        let amplitudes = DVector::from_iterator(
            dim,
            probs.iter().enumerate().map(|(alpha, &p)| {
                let r = (p / sum).sqrt();
                if alpha == 0 || p == 0.0 {
                    Complex64::new(r, 0.0)
                } else {
                    Complex64::from_polar(r, phases[alpha - 1])
                }
            }),
        );
        Ok(Self::gauge_fixed(amplitudes))
    }

    /// Projects an arbitrary nonzero vector to its canonical representative:
    /// normalize, then rotate the global phase so the first component of
    /// modulus > [`tol::GAUGE_AMPLITUDE`] becomes real positive (fallback to
    /// later components when the leading ones vanish).
    pub fn from_homogeneous(z: &[Complex64]) -> Result<Self> {
        let norm = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        let amplitudes = DVector::from_iterator(z.len(), z.iter().map(|c| c / norm));
        Ok(Self::gauge_fixed(amplitudes))
    }

    fn gauge_fixed(mut amplitudes: DVector<Complex64>) -> Self {
        if let Some(lead) = amplitudes
            .iter()
            .position(|c| c.norm() > tol::GAUGE_AMPLITUDE)
        {
            let modulus = amplitudes[lead].norm();
            let phase = amplitudes[lead] / modulus;
            let rotation = phase.conj();
            for c in amplitudes.iter_mut() {
                *c *= rotation;
            }
            amplitudes[lead] = Complex64::new(modulus, 0.0);
        }
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    /// Probability coordinates `p_α = |Z^α|²`.
    pub fn probs(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Phase coordinates `ν_α ∈ [0, 2π)` for `α = 1..D-1`; zero components
    /// report phase 0.
    pub fn phases(&self) -> Vec<f64> {
        self.amplitudes
            .iter()
            .skip(1)
            .map(|c| {
                if c.norm() == 0.0 {
                    0.0
                } else {
                    c.arg().rem_euclid(TAU)
                }
            })
            .collect()
    }

    /// The computational basis state `|k⟩`.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut amplitudes = DVector::from_element(dim, Complex64::ZERO);
        amplitudes[k] = Complex64::ONE;
        Self { amplitudes }
    }
}

/// JSON shape for [`PurePoint`]: `{"probs": [...], "phases": [...]}`.
#[derive(Serialize, Deserialize)]
pub struct PurePointJson {
    pub probs: Vec<f64>,
    pub phases: Vec<f64>,
}

impl From<&PurePoint> for PurePointJson {
    fn from(p: &PurePoint) -> Self {
        Self {
            probs: p.probs(),
            phases: p.phases(),
        }
    }
}

impl TryFrom<PurePointJson> for PurePoint {
    type Error = Error;
    fn try_from(j: PurePointJson) -> Result<Self> {
        PurePoint::to_homogeneous(&j.probs, &j.phases)
    }
}

/// Total volume of CP^{D-1} under `∏ dp dν / 2`: `π^{D-1} / (D−1)!`.
///
/// The simplex has volume `1/(D−1)!`, each phase contributes `2π`, and the
/// `1/2` per probability+phase pair turns `(2π)^{D-1}` into `π^{D-1}`.
pub fn fs_total_volume(dim: usize) -> f64 {
    assert!(dim >= 1, "dimension must be positive");
    (1..dim).map(|k| std::f64::consts::PI / k as f64).product()
}

/// Derives the seed of an independent sub-stream from a base seed.
///
/// The hash is the SplitMix64 finalizer applied to
/// `seed + (index+1)·0x9E3779B97F4A7C15` (all wrapping), giving well-dispersed
/// decorrelated seeds with random access by index. Fixed here as part of the
/// reproducibility contract: results quoted for a seed assume this derivation.
pub fn substream_seed(seed: u64, index: u64) -> u64 {
    let x = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let z = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    let z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic sampler for the uniform distribution on CP^{D-1}.
///
/// The probability vector is drawn flat on the simplex (normalized unit-rate
/// exponentials, i.e. a Dirichlet with all concentration parameters 1) and
/// the D−1 phases uniformly on `[0, 2π)`. Identical `(dim, seed)` reproduce
/// the identical point stream; `counter` reports how many points have been
/// drawn. Each point consumes exactly `2D−1` double draws in a fixed order
/// (D exponentials, then the phases).
#[derive(Debug, Clone)]
pub struct UniformSampler {
    dim: usize,
    seed: u64,
    counter: u64,
    rng: ChaCha8Rng,
}

impl UniformSampler {
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        Self {
            dim,
            seed,
            counter: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Sampler for sub-stream `index` of `seed`, per [`substream_seed`].
    pub fn substream(dim: usize, seed: u64, index: u64) -> Self {
        Self::new(dim, substream_seed(seed, index))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of points drawn so far.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Draws one uniform point.
    pub fn draw(&mut self) -> PurePoint {
        self.counter += 1;
        let mut sum = 0.0;
        let mut p = vec![0.0; self.dim];
        for slot in p.iter_mut() {
            // -ln(1-u) with u in [0,1) is a unit-rate exponential and never
            // takes the log of zero.
            let e = -(-self.rng.random::<f64>()).ln_1p();
            *slot = e;
            sum += e;
        }
        let amplitudes = DVector::from_iterator(
            self.dim,
            p.iter().enumerate().map(|(alpha, &e)| {
                let r = (e / sum).sqrt();
                if alpha == 0 {
                    Complex64::new(r, 0.0)
                } else {
                    Complex64::from_polar(r, self.rng.random_range(0.0..TAU))
                }
            }),
        );
        PurePoint { amplitudes }
    }

    /// Draws `n` points, advancing the stream by `n`.
    pub fn sample_uniform(&mut self, n: usize) -> Vec<PurePoint> {
        (0..n).map(|_| self.draw()).collect()
    }
}

/// Writes sample batches as CSV with columns `p_0..p_{D-1}, nu_1..nu_{D-1}`.
///
/// `comment` lines (if any) are emitted first, prefixed with `# `.
pub fn write_samples_csv<W: Write>(
    mut out: W,
    points: &[PurePoint],
    comments: &[String],
) -> io::Result<()> {
    for line in comments {
        writeln!(out, "# {line}")?;
    }
    if points.is_empty() {
        return Ok(());
    }
    let dim = points[0].dim();
    let mut header: Vec<String> = (0..dim).map(|a| format!("p_{a}")).collect();
    header.extend((1..dim).map(|a| format!("nu_{a}")));
    writeln!(out, "{}", header.join(","))?;
    for point in points {
        let mut fields: Vec<String> = point.probs().iter().map(|v| format!("{v}")).collect();
        fields.extend(point.phases().iter().map(|v| format!("{v}")));
        writeln!(out, "{}", fields.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn to_homogeneous_matches_coordinate_map() {
        let z = PurePoint::to_homogeneous(&[1.0, 0.0], &[0.0]).unwrap();
        assert_eq!(z.amplitudes()[0], Complex64::ONE);
        assert_eq!(z.amplitudes()[1], Complex64::ZERO);

        let z = PurePoint::to_homogeneous(&[0.5, 0.5], &[0.0]).unwrap();
        assert_abs_diff_eq!(z.amplitudes()[0].re, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(z.amplitudes()[1].re, 0.5f64.sqrt(), epsilon = 1e-15);

        let z = PurePoint::to_homogeneous(&[0.5, 0.5], &[std::f64::consts::PI]).unwrap();
        assert_abs_diff_eq!(z.amplitudes()[1].re, -(0.5f64.sqrt()), epsilon = 1e-15);
        assert_abs_diff_eq!(z.amplitudes()[1].im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn to_homogeneous_rejects_bad_simplex_points() {
        assert!(matches!(
            PurePoint::to_homogeneous(&[0.7, 0.7], &[0.0]),
            Err(Error::InvalidSimplexPoint { .. })
        ));
        assert!(matches!(
            PurePoint::to_homogeneous(&[-0.1, 1.1], &[0.0]),
            Err(Error::InvalidSimplexPoint { .. })
        ));
        assert!(matches!(
            PurePoint::to_homogeneous(&[0.5, 0.5], &[f64::NAN]),
            Err(Error::InvalidSimplexPoint { .. })
        ));
    }

    #[test]
    fn from_homogeneous_normalizes_and_fixes_gauge() {
        let c = Complex64::new;
        let z = PurePoint::from_homogeneous(&[c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(z.amplitudes()[0], Complex64::ONE);

        let z = PurePoint::from_homogeneous(&[c(0.0, 1.0), c(0.0, 1.0)]).unwrap();
        assert_abs_diff_eq!(z.amplitudes()[0].re, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(z.amplitudes()[0].im, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(z.amplitudes()[1].re, 0.5f64.sqrt(), epsilon = 1e-15);

        // Vanishing leading component: gauge falls back to the next one.
        let z = PurePoint::from_homogeneous(&[c(0.0, 0.0), c(0.0, 3.0)]).unwrap();
        assert_eq!(z.amplitudes()[0], Complex64::ZERO);
        assert_abs_diff_eq!(z.amplitudes()[1].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(z.amplitudes()[1].im, 0.0, epsilon = 1e-15);

        assert!(matches!(
            PurePoint::from_homogeneous(&[c(0.0, 0.0)]),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn round_trip_on_gauge_fixed_points() {
        let p = [0.3, 0.2, 0.5];
        let nu = [1.0, 5.5];
        let z = PurePoint::to_homogeneous(&p, &nu).unwrap();
        let back = PurePoint::to_homogeneous(&z.probs(), &z.phases()).unwrap();
        for a in 0..3 {
            assert_abs_diff_eq!(z.amplitudes()[a].re, back.amplitudes()[a].re, epsilon = 1e-12);
            assert_abs_diff_eq!(z.amplitudes()[a].im, back.amplitudes()[a].im, epsilon = 1e-12);
        }
    }

    #[test]
    fn total_volume_values() {
        assert_eq!(fs_total_volume(1), 1.0);
        assert_abs_diff_eq!(fs_total_volume(2), std::f64::consts::PI, epsilon = 1e-15);
        assert_abs_diff_eq!(
            fs_total_volume(3),
            std::f64::consts::PI.powi(2) / 2.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn sampler_is_deterministic_per_seed() {
        let mut a = UniformSampler::new(3, 42);
        let mut b = UniformSampler::new(3, 42);
        let xs = a.sample_uniform(100);
        let ys = b.sample_uniform(100);
        assert_eq!(a.counter(), 100);
        for (x, y) in xs.iter().zip(&ys) {
            assert_eq!(x.amplitudes(), y.amplitudes());
        }
        let mut c = UniformSampler::new(3, 43);
        assert_ne!(c.draw().amplitudes(), xs[0].amplitudes());
    }

    #[test]
    fn sampler_mean_matches_flat_simplex() {
        let mut s = UniformSampler::new(2, 7);
        let n = 100_000;
        let mean_p0: f64 =
            s.sample_uniform(n).iter().map(|z| z.probs()[0]).sum::<f64>() / n as f64;
        // Var(p_0) = 1/12 on the flat 1-simplex.
        let se = (1.0f64 / 12.0 / n as f64).sqrt();
        assert!((mean_p0 - 0.5).abs() < 5.0 * se, "mean {mean_p0}");
    }

    #[test]
    fn substream_seeds_differ() {
        let s: Vec<u64> = (0..8).map(|i| substream_seed(123, i)).collect();
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                assert_ne!(s[i], s[j]);
            }
        }
        assert_eq!(substream_seed(123, 3), substream_seed(123, 3));
    }

    #[test]
    fn csv_has_expected_shape() {
        let mut s = UniformSampler::new(2, 1);
        let pts = s.sample_uniform(3);
        let mut buf = Vec::new();
        write_samples_csv(&mut buf, &pts, &["seed=1".into()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# seed=1");
        assert_eq!(lines[1], "p_0,p_1,nu_1");
        assert_eq!(lines.len(), 5);
    }
}
