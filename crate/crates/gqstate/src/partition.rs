//! Closed-form partition function and moments of the exponential family on
//! CP^{D-1}.
//!
//! In the eigenbasis of the multiplier matrix `λ` (spectrum `l_1..l_D`), the
//! phase integrals are trivial and the partition function reduces to a
//! simplex integral with a closed form:
//!
//! ```text
//! Z(λ) = π^{D-1} · ∫_{Δ_{D-1}} e^{−Σ_a l_a q_a} dq = π^{D-1} · exp[−l_1, …, −l_D],
//! ```
//!
//! where `exp[x_1, …, x_D]` is the divided difference of the exponential
//! function — equivalently the partial-fraction sum `Σ_k e^{−l_k} /
//! ∏_{j≠k}(l_k − l_j)` when the nodes are distinct. Divided differences of a
//! smooth function stay finite as nodes collide (the confluent limit), so the
//! implementation clusters near-coincident nodes and evaluates each cluster
//! by a Taylor series instead of the catastrophically cancelling
//! partial-fraction form. Derivatives of `log Z` — the moments `E[q_a]` and
//! their covariance — are again divided differences, with the differentiated
//! node repeated.
//!
//! Numerical strategy, in order:
//! 1. shift nodes so the minimum is 0 (`log Z` shifts back exactly, by the
//!    gauge identity), making every table entry ≤ 1;
//! 2. cluster nodes closer than `1e-7·(1 + max|l|)` and evaluate in-cluster
//!    windows by the confluent Taylor series in complete homogeneous
//!    symmetric polynomials;
//! 3. evaluate adjacent cross-cluster entries in the cancellation-free
//!    midpoint form `e^{(x_i+x_j)/2}·sinh(h)/h`;
//! 4. switch the whole table to log-domain arithmetic when the spread is
//!    large enough that linear evaluation could over- or underflow.

use crate::qstate::{eigh, validate_density, DensityMatrix, EigenSystem, HermitianMatrix};
use crate::{tol, Result};
use nalgebra::DMatrix;

/// Log-partition value together with the spectrum it was computed from.
#[derive(Debug, Clone)]
pub struct PartitionValue {
    /// Natural log of the full partition function, `π^{D-1}` prefactor
    /// included, so that `exp(−Z̄λZ − logZ)` integrates to 1 against the
    /// volume element.
    pub log_z: f64,
    /// Eigensystem of the multiplier matrix (`nodes = values()`).
    pub nodes: EigenSystem,
}

/// Eigenbasis moments `E[q_a]`: strictly positive, summing to 1.
#[derive(Debug, Clone)]
pub struct MomentVector {
    values: Vec<f64>,
}

impl MomentVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

struct Prepared {
    /// Shifted negated nodes `x = −(l − min l)`, ascending in `[−S, 0]`.
    xs: Vec<f64>,
    /// `min l`; `log dd(l) = log dd(shifted) − shift`.
    shift: f64,
    /// Cluster index per entry of `xs` (nondecreasing).
    cluster: Vec<usize>,
    use_log: bool,
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

fn prepare(nodes: &[f64]) -> Prepared {
    assert!(!nodes.is_empty(), "at least one node required");
    assert!(
        nodes.iter().all(|l| l.is_finite()),
        "nodes must be finite, got {nodes:?}"
    );
    let shift = nodes.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_abs = nodes.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let tau = tol::NODE_CLUSTER * (1.0 + max_abs);

    let mut xs: Vec<f64> = nodes.iter().map(|l| -(l - shift)).collect();
    xs.sort_by(f64::total_cmp);

    let mut cluster = vec![0usize; xs.len()];
    for i in 1..xs.len() {
        cluster[i] = if xs[i] - xs[i - 1] <= tau {
            cluster[i - 1]
        } else {
            cluster[i - 1] + 1
        };
    }

    let spread = -xs[0];
    let use_log = spread + ln_factorial(xs.len() - 1) > 650.0 || shift < -650.0;
    Prepared {
        xs,
        shift,
        cluster,
        use_log,
    }
}

/// Confluent window: divided difference of `exp` over nodes spanning one
/// cluster, via `e^μ · Σ_j h_j(x−μ) / (n+j)!` with `h_j` the complete
/// homogeneous symmetric polynomials. Returns `(sum, μ)`; the value is
/// `exp(μ) · sum`.
fn confluent_sum(window: &[f64]) -> (f64, f64) {
    let n = window.len() - 1;
    let mu = window.iter().sum::<f64>() / window.len() as f64;

    const MAX_ORDER: usize = 16;
    let mut h = [0.0f64; MAX_ORDER + 1];
    h[0] = 1.0;
    for &x in window {
        let delta = x - mu;
        for j in 1..=MAX_ORDER {
            h[j] += delta * h[j - 1];
        }
    }

    let mut inv_fact = 1.0;
    for k in 2..=n {
        inv_fact /= k as f64;
    }
    // inv_fact = 1/n!; term_j = h_j / (n+j)!.
    let mut term = inv_fact;
    let mut sum = h[0] * term;
    for (j, &hj) in h.iter().enumerate().skip(1) {
        term /= (n + j) as f64;
        let t = hj * term;
        sum += t;
        if t.abs() <= sum.abs() * 1e-20 {
            break;
        }
    }
    (sum, mu)
}

/// `sinh(h)/h`, series-expanded near 0.
fn sinh_over(h: f64) -> f64 {
    if h.abs() < 1e-5 {
        let h2 = h * h;
        1.0 + h2 / 6.0 * (1.0 + h2 / 20.0)
    } else {
        h.sinh() / h
    }
}

/// `ln(sinh(h)/h)` for h ≥ 0, stable for all magnitudes.
fn ln_sinh_over(h: f64) -> f64 {
    if h < 1e-5 {
        let h2 = h * h;
        (h2 / 6.0 * (1.0 + h2 / 20.0)).ln_1p()
    } else if h < 300.0 {
        (h.sinh() / h).ln()
    } else {
        // sinh(h) = e^h (1 − e^{−2h}) / 2.
        h + (-(-2.0 * h).exp()).ln_1p() - (2.0 * h).ln()
    }
}

/// Divided-difference table in linear arithmetic. All entries are positive
/// and ≤ 1 because the shifted nodes are ≤ 0.
fn table_linear(p: &Prepared) -> f64 {
    let m = p.xs.len();
    let mut row: Vec<f64> = p.xs.iter().map(|&x| x.exp()).collect();
    for k in 1..m {
        for i in 0..m - k {
            row[i] = if p.cluster[i + k] == p.cluster[i] {
                let (sum, mu) = confluent_sum(&p.xs[i..=i + k]);
                mu.exp() * sum
            } else if k == 1 {
                let h = (p.xs[i + 1] - p.xs[i]) / 2.0;
                (0.5 * (p.xs[i] + p.xs[i + 1])).exp() * sinh_over(h)
            } else {
                (row[i + 1] - row[i]) / (p.xs[i + k] - p.xs[i])
            };
        }
    }
    row[0]
}

/// Same table in log domain. Differences `exp[x_{i+1}..] − exp[x_i..]` are
/// positive because divided differences of `exp` increase in every node, so
/// a log representation (without signs) suffices.
fn table_log(p: &Prepared) -> f64 {
    fn log_sub(a: f64, b: f64) -> f64 {
        debug_assert!(a >= b, "divided-difference monotonicity violated");
        a + (-(b - a).exp()).ln_1p()
    }
    let m = p.xs.len();
    let mut row: Vec<f64> = p.xs.clone();
    for k in 1..m {
        for i in 0..m - k {
            row[i] = if p.cluster[i + k] == p.cluster[i] {
                let (sum, mu) = confluent_sum(&p.xs[i..=i + k]);
                mu + sum.ln()
            } else if k == 1 {
                let h = (p.xs[i + 1] - p.xs[i]) / 2.0;
                0.5 * (p.xs[i] + p.xs[i + 1]) + ln_sinh_over(h)
            } else {
                log_sub(row[i + 1], row[i]) - (p.xs[i + k] - p.xs[i]).ln()
            };
        }
    }
    row[0]
}

/// Divided difference of the exponential at `x_k = −l_k` — the simplex
/// integral `∫_{Δ} e^{−Σ l_a q_a} dq` with the nodes as exponents. Strictly
/// positive; stable under node collisions; safe for node spreads well past
/// 700 (the result may round to 0 or ∞ only when it is genuinely outside
/// double range — use [`log_divided_diff_exp`] there).
pub fn divided_diff_exp(nodes: &[f64]) -> f64 {
    let p = prepare(nodes);
    if p.use_log {
        (table_log(&p) - p.shift).exp()
    } else {
        table_linear(&p) * (-p.shift).exp()
    }
}

/// Natural log of [`divided_diff_exp`], finite for any finite nodes.
pub fn log_divided_diff_exp(nodes: &[f64]) -> f64 {
    let p = prepare(nodes);
    let body = if p.use_log {
        table_log(&p)
    } else {
        table_linear(&p).ln()
    };
    body - p.shift
}

/// `log Z` for a given multiplier spectrum:
/// `(D−1)·log π + log exp[−l_1, …, −l_D]`.
pub fn log_partition_nodes(nodes: &[f64]) -> f64 {
    (nodes.len() as f64 - 1.0) * std::f64::consts::PI.ln() + log_divided_diff_exp(nodes)
}

/// `log Z(λ)` with the `π^{D-1}` prefactor, via the spectrum of `λ`.
pub fn log_partition(lambda: &HermitianMatrix) -> Result<PartitionValue> {
    let nodes = eigh(lambda)?;
    let log_z = log_partition_nodes(nodes.values());
    Ok(PartitionValue { log_z, nodes })
}

/// Appends `extra` to `nodes` (divided differences are symmetric, so order
/// is irrelevant; repeats trigger the confluent path).
fn with_repeats(nodes: &[f64], extra: &[f64]) -> Vec<f64> {
    let mut v = Vec::with_capacity(nodes.len() + extra.len());
    v.extend_from_slice(nodes);
    v.extend_from_slice(extra);
    v
}

/// Eigenbasis moments `E[q_a] = −∂ log exp[−l]/∂ l_a`, computed exactly as
/// the ratio of the divided difference with node `l_a` doubled to the plain
/// one. The entries sum to 1 identically (Σ q_a = 1 on the simplex).
pub fn moments_eigenbasis(nodes: &[f64]) -> MomentVector {
    let base = log_divided_diff_exp(nodes);
    let values: Vec<f64> = nodes
        .iter()
        .map(|&l| (log_divided_diff_exp(&with_repeats(nodes, &[l])) - base).exp())
        .collect();
    debug_assert!(
        (values.iter().sum::<f64>() - 1.0).abs() < 1e-9,
        "moments must sum to 1, got {values:?}"
    );
    MomentVector { values }
}

/// Covariance matrix of the simplex coordinates, `C_ab = Cov(q_a, q_b)` —
/// the Hessian of `log Z` in the eigenbasis. Positive semidefinite with the
/// all-ones vector in its kernel (Σ q_a is constant).
pub fn moment_covariance(nodes: &[f64]) -> DMatrix<f64> {
    let d = nodes.len();
    let base = log_divided_diff_exp(nodes);
    let first: Vec<f64> = nodes
        .iter()
        .map(|&l| (log_divided_diff_exp(&with_repeats(nodes, &[l])) - base).exp())
        .collect();
    let mut cov = DMatrix::zeros(d, d);
    for a in 0..d {
        for b in a..d {
            let second =
                (log_divided_diff_exp(&with_repeats(nodes, &[nodes[a], nodes[b]])) - base).exp();
            // E[q_a q_b] is the repeated-node ratio, doubled on the diagonal
            // (node multiplicity 2 contributes the derivative factor 2).
            let e_ab = if a == b { 2.0 * second } else { second };
            let c = e_ab - first[a] * first[b];
            cov[(a, b)] = c;
            cov[(b, a)] = c;
        }
    }
    cov
}

/// Second-moment matrix `E[Z^α Z̄^β]` of the exponential family with
/// multiplier `λ`: phases are uniform in the eigenframe of `λ`, so the
/// cross-moments vanish there and the result is
/// `U† · diag(moments_eigenbasis(l)) · U` — a valid density matrix.
pub fn moments_matrix(lambda: &HermitianMatrix) -> Result<DensityMatrix> {
    let sys = eigh(lambda)?;
    let m = moments_eigenbasis(sys.values());
    validate_density(&sys.assemble(m.values()))
}
