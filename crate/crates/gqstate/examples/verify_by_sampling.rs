//! Verify a solved state by importance-sampled Monte Carlo: the sampled
//! moment matrix and entropy must match the closed-form values within
//! their reported standard errors.
//!
//! Run with: cargo run --release --example verify_by_sampling

use gqstate::maxent::solve_multipliers;
use gqstate::montecarlo::{estimate_density_matrix, estimate_entropy};
use gqstate::qstate::validate_density;
use nalgebra::DMatrix;
use num_complex::Complex64;

fn main() {
    let c = Complex64::new;
    let rho = validate_density(&DMatrix::from_row_slice(
        2,
        2,
        &[c(0.45, 0.0), c(0.2, -0.3), c(0.2, 0.3), c(0.55, 0.0)],
    ))
    .unwrap();
    let report = solve_multipliers(&rho, 1e-10, 200).unwrap();

    let n = 1_000_000;
    let seed = 2;
    let density = estimate_density_matrix(&report.state, n, seed).unwrap();
    let entropy = estimate_entropy(&report.state, n, seed).unwrap();

    println!("monte carlo with {n} samples (seed {seed})");
    println!(
        "effective sample size: {:.0} ({:.1}% of n)",
        density.ess,
        100.0 * density.ess / n as f64
    );
    println!();
    println!("moment matrix, entry by entry (target | estimate ± SE):");
    for i in 0..2 {
        for j in 0..2 {
            let target = rho.entries()[(i, j)];
            let got = density.value[(i, j)];
            let se = density.std_error[(i, j)];
            println!(
                "  [{i}{j}]  {:+.6}{:+.6}i | {:+.6}{:+.6}i ± {:.1e}",
                target.re, target.im, got.re, got.im, se
            );
        }
    }
    println!();
    println!(
        "entropy: closed form {:.9}, sampled {:.9} ± {:.1e}",
        report.entropy, entropy.value, entropy.std_error
    );
    println!(
        "max deviation of moments: {:.3e}",
        density.max_deviation(rho.entries())
    );
    println!(
        "every entry within 3σ:    {}",
        density.entrywise_within(rho.entries(), 3.0)
    );
}
