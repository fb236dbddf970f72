//! Estimate the maximum-entropy geometric state of a qubit density matrix
//! and print the solve report.
//!
//! Run with: cargo run --example estimate_qubit

use gqstate::maxent::solve_multipliers;
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
    .expect("a valid density matrix");

    let report = solve_multipliers(&rho, 1e-10, 200).expect("full-rank input converges");

    println!("input density matrix ρ:");
    print_complex_matrix(rho.entries());
    println!();
    println!("multiplier matrix λ (traceless gauge):");
    print_complex_matrix(report.state.multipliers().entries());
    println!();
    println!("eigenvalues of λ:   {:?}", report.state.eigensystem().values());
    println!("log Z:              {:.15}", report.state.log_z());
    println!("geometric entropy:  {:.15} nats", report.entropy);
    println!("moment residual:    {:.3e}", report.residual);
    println!("newton iterations:  {}", report.iterations);

    // The defining property: the state's second moments reproduce ρ.
    let moments = gqstate::partition::moments_matrix(report.state.multipliers()).unwrap();
    println!();
    println!("second moments E[Z Z̄†] of the estimated state:");
    print_complex_matrix(moments.entries());
}

fn print_complex_matrix(m: &DMatrix<Complex64>) {
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| format!("{:+.6}{:+.6}i", m[(i, j)].re, m[(i, j)].im))
            .collect();
        println!("  [ {} ]", row.join("  "));
    }
}
