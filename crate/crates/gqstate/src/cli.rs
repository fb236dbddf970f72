//! Command-line pipeline: estimate multipliers from a density matrix,
//! verify the solution by Monte Carlo, export a qubit density grid, draw
//! exact samples, and simulate/invert tomographic measurements.
//!
//! Structured outputs are JSON, point and grid data are CSV. Every command
//! validates its inputs before computing and writes output files atomically
//! (temp file + rename), so a crashed or failed run never leaves a partial
//! file behind.
//!
//! Exit codes — stable so shell pipelines can branch on failure modes:
//!
//! | code | meaning                                              |
//! |------|------------------------------------------------------|
//! | 0    | success                                              |
//! | 1    | I/O failure, or verification outside 3σ              |
//! | 2    | singular (rank-deficient) density matrix             |
//! | 3    | input file failed to parse or validate               |
//! | 4    | solver hit the iteration cap (report still written)  |
//! | 5    | degenerate importance weights (ESS below floor)      |
//! | 6    | grid export requested for dimension ≠ 2              |
//! | 7    | POVM set not informationally complete                |
//! | 64   | command-line usage error                             |

use crate::manifold::{substream_seed, write_samples_csv};
use crate::maxent::{solve_multipliers, SolveReport};
use crate::montecarlo::{
    estimate_density_matrix, estimate_entropy, sample_maxent, MatrixEstimate, ScalarEstimate,
};
use crate::qstate::DensityMatrix;
use crate::tomography::{
    linear_inversion_frequencies, outcome_probabilities, simulate_counts, CountRecord, Povm,
};
use crate::{Error, Result};
use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "gqstate",
    version,
    about = "Maximum-entropy geometric quantum states: estimate, verify, sample"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve for the multiplier matrix whose state matches a density matrix.
    Estimate {
        /// Density-matrix JSON file.
        #[arg(long)]
        input: PathBuf,
        /// Where to write the solve-report JSON.
        #[arg(long)]
        output: PathBuf,
        /// Max-norm moment residual to converge to.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Newton iteration cap.
        #[arg(long, default_value_t = 200)]
        max_iter: usize,
        /// Blend the input with the maximally mixed state:
        /// ρ ← (1−ε)ρ + ε·I/D. Lifts singular inputs to full rank.
        #[arg(long, value_name = "EPSILON")]
        regularize: Option<f64>,
    },
    /// Monte Carlo check of a solve report against the original density.
    Verify {
        /// Density-matrix JSON file (the estimation target).
        #[arg(long)]
        input: PathBuf,
        /// Solve-report JSON produced by `estimate`.
        #[arg(long)]
        report: PathBuf,
        /// Where to write the verification JSON.
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Export the qubit density q(p, φ) on a regular grid as CSV.
    Grid {
        /// Solve-report JSON (dimension must be 2).
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Cells per axis.
        #[arg(long, default_value_t = 200)]
        grid_size: usize,
    },
    /// Simulate POVM counts from a known density (or take counts files)
    /// and reconstruct a density matrix by linear inversion.
    Tomo {
        /// True density-matrix JSON to simulate measurements from.
        #[arg(long)]
        input: Option<PathBuf>,
        /// POVM JSON file; repeat once per measurement.
        #[arg(long = "povm", required = true)]
        povms: Vec<PathBuf>,
        /// Count-record JSON files paired with --povm (alternative to
        /// simulation from --input).
        #[arg(long = "counts")]
        counts: Vec<PathBuf>,
        /// Shots per POVM; 0 means exact frequencies (no sampling noise).
        #[arg(long, default_value_t = 100_000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Where to write the reconstructed density JSON.
        #[arg(long)]
        output: PathBuf,
    },
    /// Draw exact samples from a solved state into CSV.
    Sample {
        /// Solve-report JSON.
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Verification summary written by the `verify` subcommand.
#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyOutput {
    /// Monte Carlo estimate of the moment matrix.
    pub density: MatrixEstimate,
    /// Monte Carlo estimate of the geometric entropy.
    pub entropy: ScalarEstimate,
    /// Closed-form entropy from the solve report's state.
    pub closed_form_entropy: f64,
    /// Max-norm of (estimate − target).
    pub max_deviation: f64,
    /// True when every entry of the target lies within 3 standard errors.
    pub within_three_sigma: bool,
}

/// Parses arguments and runs; returns the process exit code.
pub fn run_from_env() -> ExitCode {
    run(std::env::args_os())
}

/// Testable entry point over explicit arguments.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            // clap's own code (2) collides with the SingularDensity slot;
            // usage problems use the conventional EX_USAGE instead.
            let _ = err.print();
            return match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(64),
            };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            if let Error::DegenerateWeights { .. } = err {
                eprintln!(
                    "hint: increase --samples, or draw from the state directly \
                     with `gqstate sample` (rejection sampling does not share \
                     the uniform proposal's weight degeneracy)"
                );
            }
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::SingularDensity { .. } => 2,
        Error::Json(_)
        | Error::NotHermitian { .. }
        | Error::TraceNotOne { .. }
        | Error::NotPsd { .. }
        | Error::InvalidSimplexPoint { .. }
        | Error::InvalidPovm(_) => 3,
        Error::MaxIterationsExceeded { .. } => 4,
        Error::DegenerateWeights { .. } => 5,
        Error::GridRequiresQubit { .. } => 6,
        Error::NotInformationallyComplete { .. } => 7,
        _ => 1,
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Estimate {
            input,
            output,
            tol,
            max_iter,
            regularize,
        } => cmd_estimate(&input, &output, tol, max_iter, regularize),
        Command::Verify {
            input,
            report,
            output,
            samples,
            seed,
        } => cmd_verify(&input, &report, &output, samples, seed),
        Command::Grid {
            report,
            output,
            grid_size,
        } => cmd_grid(&report, &output, grid_size),
        Command::Tomo {
            input,
            povms,
            counts,
            shots,
            seed,
            output,
        } => cmd_tomo(input.as_deref(), &povms, &counts, shots, seed, &output),
        Command::Sample {
            report,
            output,
            samples,
            seed,
        } => cmd_sample(&report, &output, samples, seed),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Writes via a sibling temp file and an atomic rename, so failures never
/// leave a truncated output behind.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp-{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents)?;
    match fs::rename(&tmp, path) {
        Ok(()) => Ok(()),
        Err(err) => {
            let _ = fs::remove_file(&tmp);
            Err(err.into())
        }
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable output");
    text.push('\n');
    write_atomic(path, &text)
}

fn cmd_estimate(
    input: &Path,
    output: &Path,
    tol: f64,
    max_iter: usize,
    regularize: Option<f64>,
) -> Result<ExitCode> {
    let mut rho: DensityMatrix = read_json(input)?;
    if let Some(epsilon) = regularize {
        rho = rho.regularized(epsilon);
    }
    match solve_multipliers(&rho, tol, max_iter) {
        Ok(report) => {
            write_json(output, &report)?;
            Ok(ExitCode::SUCCESS)
        }
        // Contract: the best-effort report is still written on
        // non-convergence so the caller can inspect how close it got.
        Err(Error::MaxIterationsExceeded {
            iterations,
            residual,
            report,
        }) => {
            write_json(output, report.as_ref())?;
            Err(Error::MaxIterationsExceeded {
                iterations,
                residual,
                report,
            })
        }
        Err(err) => Err(err),
    }
}

fn cmd_verify(
    input: &Path,
    report: &Path,
    output: &Path,
    samples: usize,
    seed: u64,
) -> Result<ExitCode> {
    let rho: DensityMatrix = read_json(input)?;
    let report: SolveReport = read_json(report)?;
    if rho.dim() != report.state.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: report.state.dim(),
        });
    }
    let density = estimate_density_matrix(&report.state, samples, seed)?;
    let entropy = estimate_entropy(&report.state, samples, seed)?;
    let max_deviation = density.max_deviation(rho.entries());
    let within_three_sigma = density.entrywise_within(rho.entries(), 3.0);
    let summary = VerifyOutput {
        density,
        entropy,
        closed_form_entropy: report.entropy,
        max_deviation,
        within_three_sigma,
    };
    write_json(output, &summary)?;
    if within_three_sigma {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "verification failed: max deviation {max_deviation:.3e} exceeds 3 standard errors"
        );
        Ok(ExitCode::FAILURE)
    }
}

fn cmd_grid(report: &Path, output: &Path, grid_size: usize) -> Result<ExitCode> {
    assert!(grid_size >= 2, "grid must have at least 2 cells per axis");
    let report: SolveReport = read_json(report)?;
    let state = report.state;
    if state.dim() != 2 {
        return Err(Error::GridRequiresQubit { dim: state.dim() });
    }
    // Cell midpoints over (p, φ) ∈ [0,1] × [0,2π); q is evaluated from the
    // amplitudes Z = (√(1−p), √p e^{iφ}). With the volume element
    // dV = dp dφ / 2, the grid sum times (1/N)(2π/N)(1/2) approximates 1.
    let n = grid_size;
    let mut text = String::with_capacity(n * n * 32);
    text.push_str("p,phi,q\n");
    for i in 0..n {
        let p = (i as f64 + 0.5) / n as f64;
        for j in 0..n {
            let phi = (j as f64 + 0.5) * std::f64::consts::TAU / n as f64;
            let point = crate::manifold::PurePoint::to_homogeneous(&[1.0 - p, p], &[phi])
                .expect("grid point is a valid simplex point");
            let q = state.density(&point);
            text.push_str(&format!("{p},{phi},{q}\n"));
        }
    }
    write_atomic(output, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_tomo(
    input: Option<&Path>,
    povm_paths: &[PathBuf],
    count_paths: &[PathBuf],
    shots: u64,
    seed: u64,
    output: &Path,
) -> Result<ExitCode> {
    let povms: Vec<Povm> = povm_paths
        .iter()
        .map(|p| read_json::<Povm>(p))
        .collect::<Result<_>>()?;

    let records: Vec<(Povm, Vec<f64>)> = match (input, count_paths.is_empty()) {
        (Some(truth_path), true) => {
            let truth: DensityMatrix = read_json(truth_path)?;
            povms
                .into_iter()
                .enumerate()
                .map(|(j, povm)| {
                    let freqs = if shots == 0 {
                        // Exact-frequency mode: no sampling noise at all.
                        outcome_probabilities(&truth, &povm)?
                    } else {
                        simulate_counts(&truth, &povm, shots, substream_seed(seed, j as u64))?
                            .frequencies()
                    };
                    Ok((povm, freqs))
                })
                .collect::<Result<_>>()?
        }
        (None, false) => {
            if count_paths.len() != povm_paths.len() {
                return Err(Error::InvalidPovm(format!(
                    "{} POVM files but {} counts files",
                    povm_paths.len(),
                    count_paths.len()
                )));
            }
            povms
                .into_iter()
                .zip(count_paths)
                .map(|(povm, path)| {
                    let record: CountRecord = read_json(path)?;
                    if record.counts().len() != povm.n_outcomes() {
                        return Err(Error::InvalidPovm(format!(
                            "count record {} has {} outcomes, POVM has {}",
                            path.display(),
                            record.counts().len(),
                            povm.n_outcomes()
                        )));
                    }
                    Ok((povm, record.frequencies()))
                })
                .collect::<Result<_>>()?
        }
        (Some(_), false) => {
            return Err(Error::InvalidPovm(
                "give either --input (simulate) or --counts (invert existing), not both".into(),
            ))
        }
        (None, true) => {
            return Err(Error::InvalidPovm(
                "need --input to simulate counts, or --counts files to invert".into(),
            ))
        }
    };

    let reconstructed = linear_inversion_frequencies(&records)?;
    write_json(output, &reconstructed)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_sample(report: &Path, output: &Path, samples: usize, seed: u64) -> Result<ExitCode> {
    let report: SolveReport = read_json(report)?;
    let batch = sample_maxent(&report.state, samples, seed);
    let comments = vec![
        format!("seed={seed}"),
        format!("samples={samples}"),
        format!("acceptance_rate={}", batch.acceptance_rate),
    ];
    let mut buffer = Vec::new();
    write_samples_csv(&mut buffer, &batch.points, &comments)?;
    write_atomic(output, &String::from_utf8(buffer).expect("CSV is UTF-8"))?;
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_64() {
        let code = run(["gqstate", "no-such-command"]);
        assert_eq!(format!("{code:?}"), format!("{:?}", ExitCode::from(64)));
    }

    #[test]
    fn help_exits_zero() {
        let code = run(["gqstate", "--help"]);
        assert_eq!(format!("{code:?}"), format!("{:?}", ExitCode::SUCCESS));
    }

    #[test]
    fn exit_codes_cover_error_variants() {
        assert_eq!(
            exit_code_for(&Error::SingularDensity {
                min_eigenvalue: 0.0,
                tol: 1e-10
            }),
            2
        );
        assert_eq!(
            exit_code_for(&Error::DegenerateWeights {
                ess: 1.0,
                floor: 100.0
            }),
            5
        );
        assert_eq!(exit_code_for(&Error::GridRequiresQubit { dim: 3 }), 6);
        assert_eq!(
            exit_code_for(&Error::NotInformationallyComplete {
                rank: 2,
                required: 4
            }),
            7
        );
        assert_eq!(exit_code_for(&Error::ZeroVector), 1);
    }
}
