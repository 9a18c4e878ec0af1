//! Exact uniform-random win probabilities, cross-checked by enumeration,
//! and the decay of the Game 1 value.
//!
//! cargo run --example exact_values

use nonlocal_games::analysis::{
    brute_force_uniform_win_prob, central_binomial, decay_ratio, uniform_win_prob, MAX_ENUMERATION_ROUNDS,
};
use nonlocal_games::games::GameSpec;

fn main() {
    println!(
        "{:>3}  {:>8}  {:>22}  {:>16}  {:>10}",
        "n", "C(2n,n)", "P(win) game 1", "decimal", "enumerated"
    );
    for n in 1..=12 {
        let spec = GameSpec::game1(n).unwrap();
        let p = uniform_win_prob(&spec);
        let brute = if n <= 10 {
            brute_force_uniform_win_prob(&spec, MAX_ENUMERATION_ROUNDS)
                .unwrap()
                .to_string()
        } else {
            "-".to_string()
        };
        println!(
            "{n:>3}  {:>8}  {:>22}  {:>16}  {:>10}",
            central_binomial(n),
            p.to_string(),
            p.to_decimal_string(12),
            brute
        );
    }

    println!();
    for n in 1..=5 {
        println!("P(n={}) / P(n={n}) = {}", n + 1, decay_ratio(n).unwrap());
    }
    for n in [100, 1_000, 10_000] {
        let p = uniform_win_prob(&GameSpec::game1(n).unwrap());
        println!("P(n={n}) ~ {}", p.to_decimal_string(6));
    }

    println!();
    println!("game 2, any n: {}", uniform_win_prob(&GameSpec::game2(7).unwrap()));
    println!("game 3:        {}", uniform_win_prob(&GameSpec::game3()));
}
