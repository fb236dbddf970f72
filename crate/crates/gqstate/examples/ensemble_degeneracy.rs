//! Why the density matrix is not the whole story: two visibly different
//! pure-state ensembles share one density matrix, so no measurement can
//! tell them apart — yet as distributions on the state manifold they are
//! distinct. The maximum-entropy geometric state is the canonical
//! density-compatible distribution.
//!
//! Run with: cargo run --example ensemble_degeneracy

use gqstate::manifold::PurePoint;
use gqstate::maxent::solve_multipliers;
use gqstate::qstate::{ensemble_density, DiscreteEnsemble};
use gqstate::tomography::{outcome_probabilities, pauli_qubit_povms};
use num_complex::Complex64;

fn main() {
    let c = Complex64::new;
    let s = std::f64::consts::FRAC_1_SQRT_2;

    // Ensemble A: equal mixture of the computational basis states.
    let a = DiscreteEnsemble::new(vec![
        (0.5, PurePoint::basis_state(2, 0)),
        (0.5, PurePoint::basis_state(2, 1)),
    ])
    .unwrap();
    // Ensemble B: equal mixture of |±⟩ = (|0⟩ ± |1⟩)/√2.
    let b = DiscreteEnsemble::new(vec![
        (0.5, PurePoint::from_homogeneous(&[c(s, 0.0), c(s, 0.0)]).unwrap()),
        (0.5, PurePoint::from_homogeneous(&[c(s, 0.0), c(-s, 0.0)]).unwrap()),
    ])
    .unwrap();

    let rho_a = ensemble_density(&a).unwrap();
    let rho_b = ensemble_density(&b).unwrap();
    println!("ensemble A points: |0⟩, |1⟩          (p = 1/2 each)");
    println!("ensemble B points: |+⟩, |−⟩          (p = 1/2 each)");
    println!(
        "densities agree entrywise to {:.1e}",
        gqstate::qstate::max_abs_entry(&(rho_a.entries() - rho_b.entries()))
    );
    println!();

    println!("outcome probabilities under the three Pauli measurements:");
    for (k, povm) in pauli_qubit_povms().iter().enumerate() {
        let pa = outcome_probabilities(&rho_a, povm).unwrap();
        let pb = outcome_probabilities(&rho_b, povm).unwrap();
        println!("  axis {k}: A {pa:?}  B {pb:?}");
    }
    println!();
    println!("identical statistics — the ensembles are operationally");
    println!("indistinguishable, though they put mass on different points.");
    println!();

    let report = solve_multipliers(&rho_a, 1e-10, 200).unwrap();
    println!(
        "the shared density is maximally mixed, so the max-ent geometric"
    );
    println!(
        "state is the uniform distribution: |λ| = {:.1e}, entropy = {:.9} (log π = {:.9})",
        report.state.multipliers().max_abs(),
        report.entropy,
        std::f64::consts::PI.ln()
    );
}
