//! The operator identities behind the quantum strategies.
//!
//! cargo run --example eigen_relations

use nonlocal_games::harness::verify_eigen_relations;
use nonlocal_games::quantum::{apply, pauli_x_observable, singlet_state, Site, TwoQubitObservable};

fn main() {
    for check in verify_eigen_relations() {
        println!(
            "{:<24} on {:<8} eigenvalue {:+}  residual {:.2e}  {}",
            check.observable,
            check.state,
            check.eigenvalue,
            check.residual,
            if check.passed { "ok" } else { "FAILED" }
        );
    }

    let sum = &pauli_x_observable(Site::A) + &pauli_x_observable(Site::B);
    let image = apply(&sum, &singlet_state()).map(|a| a.to_string());
    println!("\n(σx⊗I + I⊗σx)|singlet⟩ = [{}]", image.join(", "));
    let b = pauli_x_observable(Site::B);
    println!(
        "(I⊗σx)² is the identity: {}",
        b.compose(&b) == *TwoQubitObservable::identity().matrix()
    );
}
