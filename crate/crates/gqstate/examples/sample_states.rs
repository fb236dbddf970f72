//! Draw exact samples from a maximum-entropy geometric state by rejection
//! sampling and compare the empirical moments with the closed form.
//!
//! Run with: cargo run --release --example sample_states

use gqstate::manifold::write_samples_csv;
use gqstate::maxent::solve_multipliers;
use gqstate::montecarlo::{empirical_moment_matrix, sample_maxent};
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
    let state = solve_multipliers(&rho, 1e-10, 200).unwrap().state;

    let n = 50_000;
    let seed = 123;
    let batch = sample_maxent(&state, n, seed);
    println!("drew {n} exact samples (seed {seed})");
    println!(
        "acceptance rate: {:.4} ({} proposals)",
        batch.acceptance_rate, batch.proposals
    );

    let empirical = empirical_moment_matrix(&batch.points);
    println!();
    println!("empirical moments vs targets (entry: target | empirical):");
    for i in 0..2 {
        for j in 0..2 {
            let t = rho.entries()[(i, j)];
            let e = empirical[(i, j)];
            println!(
                "  [{i}{j}]  {:+.5}{:+.5}i | {:+.5}{:+.5}i",
                t.re, t.im, e.re, e.im
            );
        }
    }

    let path = std::env::temp_dir().join("gqstate_samples.csv");
    let mut buffer = Vec::new();
    write_samples_csv(
        &mut buffer,
        &batch.points[..1000],
        &[format!("seed={seed}"), "first 1000 of the batch".into()],
    )
    .unwrap();
    std::fs::write(&path, &buffer).unwrap();
    println!();
    println!("wrote the first 1000 points to {}", path.display());
    let text = String::from_utf8(buffer).unwrap();
    println!("file head:");
    for line in text.lines().take(6) {
        println!("  {line}");
    }
}
