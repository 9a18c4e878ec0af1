//! Born-rule sampling of joint σx outcomes on the two Bell states and on
//! the product state |00⟩.
//!
//! cargo run --example bell_measurements

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nonlocal_games::quantum::{
    measure_x_pair, phi_plus_state, singlet_state, x_basis_probabilities, OutcomePair, StateVector,
};

fn main() {
    let samples = 100_000;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let labels = ["(+1,+1)", "(+1,-1)", "(-1,+1)", "(-1,-1)"];

    for state in [singlet_state(), phi_plus_state(), StateVector::basis(0, 0)] {
        let probs = x_basis_probabilities(&state);
        let mut counts = [0u32; 4];
        for _ in 0..samples {
            let (outcome, _) = measure_x_pair(&state, &mut rng).unwrap();
            counts[OutcomePair::ALL.iter().position(|o| *o == outcome).unwrap()] += 1;
        }
        println!("{}", state.label().unwrap_or("state"));
        for i in 0..4 {
            println!(
                "  {}  born {:.4}  observed {:.4}",
                labels[i],
                probs[i],
                f64::from(counts[i]) / f64::from(samples)
            );
        }
    }
}
