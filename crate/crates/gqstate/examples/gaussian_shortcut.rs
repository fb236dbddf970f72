//! The inverse-density shortcut λ = ½ρ⁻¹ and how far it lands from the
//! true maximum-entropy multipliers: exact for the maximally mixed state,
//! an increasingly rough approximation as the state purifies.
//!
//! Run with: cargo run --example gaussian_shortcut

use gqstate::maxent::ansatz_audit;
use gqstate::qstate::{validate_density, DensityMatrix};
use nalgebra::DMatrix;
use num_complex::Complex64;

fn main() {
    let c = Complex64::new;
    let cases: Vec<(&str, DensityMatrix)> = vec![
        ("maximally mixed", DensityMatrix::maximally_mixed(2)),
        (
            "worked qubit example",
            validate_density(&DMatrix::from_row_slice(
                2,
                2,
                &[c(0.45, 0.0), c(0.2, -0.3), c(0.2, 0.3), c(0.55, 0.0)],
            ))
            .unwrap(),
        ),
        (
            "diag(0.9, 0.1)",
            validate_density(&DMatrix::from_row_slice(
                2,
                2,
                &[c(0.9, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.1, 0.0)],
            ))
            .unwrap(),
        ),
        (
            "diag(0.5, 0.3, 0.2)",
            validate_density(&DMatrix::from_row_slice(
                3,
                3,
                &[
                    c(0.5, 0.0),
                    c(0.0, 0.0),
                    c(0.0, 0.0),
                    c(0.0, 0.0),
                    c(0.3, 0.0),
                    c(0.0, 0.0),
                    c(0.0, 0.0),
                    c(0.0, 0.0),
                    c(0.2, 0.0),
                ],
            ))
            .unwrap(),
        ),
    ];

    println!("{:<24} {:>14} {:>16}", "density", "moment gap", "multiplier dist");
    println!("{}", "-".repeat(56));
    for (name, rho) in cases {
        let audit = ansatz_audit(&rho).unwrap();
        println!(
            "{:<24} {:>14.6e} {:>16.6e}",
            name, audit.moment_gap, audit.multiplier_distance
        );
    }
    println!();
    println!("moment gap:      max-norm error of the shortcut's second moments");
    println!("multiplier dist: max-norm distance to the solved multipliers");
    println!();
    println!("the shortcut is exact only at the maximally mixed state; use");
    println!("it as a cheap initial guess or sanity scale, not as an answer.");
}
