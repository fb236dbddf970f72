//! Evaluate a qubit geometric state on a coordinate grid, locate its mode,
//! and check normalization by midpoint quadrature.
//!
//! Run with: cargo run --release --example density_grid

use gqstate::manifold::PurePoint;
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
    .unwrap();
    let state = solve_multipliers(&rho, 1e-10, 200).unwrap().state;

    // q(p, φ) over cell midpoints of [0,1] × [0,2π).
    let n = 120;
    let mut total = 0.0;
    let mut mode = (0.0, 0.0, f64::NEG_INFINITY);
    for i in 0..n {
        let p = (i as f64 + 0.5) / n as f64;
        for j in 0..n {
            let phi = (j as f64 + 0.5) * std::f64::consts::TAU / n as f64;
            let z = PurePoint::to_homogeneous(&[1.0 - p, p], &[phi]).unwrap();
            let q = state.density(&z);
            total += q;
            if q > mode.2 {
                mode = (p, phi, q);
            }
        }
    }
    // Volume element dp dφ / 2.
    let integral = total / (n as f64) * (std::f64::consts::TAU / n as f64) * 0.5;

    println!("grid {n}×{n} over (p, φ)");
    println!("∫ q dV by midpoint quadrature = {integral:.9} (exact: 1)");
    println!(
        "mode of q at p = {:.4}, φ = {:.4}, q = {:.6}",
        mode.0, mode.1, mode.2
    );
    println!();

    // A coarse ASCII heat map: rows sweep p, columns sweep φ.
    let shades = [' ', '.', ':', '-', '=', '+', '*', '#', '%', '@'];
    println!("density heat map (p down, φ across):");
    for i in 0..24 {
        let p = (i as f64 + 0.5) / 24.0;
        let mut row = String::new();
        for j in 0..72 {
            let phi = (j as f64 + 0.5) * std::f64::consts::TAU / 72.0;
            let z = PurePoint::to_homogeneous(&[1.0 - p, p], &[phi]).unwrap();
            let q = state.density(&z);
            let level = ((q / mode.2) * (shades.len() as f64 - 1.0)).round() as usize;
            row.push(shades[level.min(shades.len() - 1)]);
        }
        println!("  {row}");
    }
}
