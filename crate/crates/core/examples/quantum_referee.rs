//! Referee-driven Monte-Carlo runs: entangled players against players
//! answering uniformly at random.
//!
//! cargo run --release --example quantum_referee

use nonlocal_games::games::GameSpec;
use nonlocal_games::harness::{binomial_band, quantum_players, run_game, BellState, Players};

fn main() {
    let trials = 100_000;
    let seed = 2024;
    let games = [
        (GameSpec::game1(10).unwrap(), BellState::Singlet),
        (GameSpec::game2(5).unwrap(), BellState::PhiPlus),
        (GameSpec::game3(), BellState::PhiPlus),
    ];
    for (spec, bell) in games {
        let quantum = run_game(&spec, &quantum_players(bell), trials, seed).unwrap();
        let classical = run_game(&spec, &Players::uniform(), trials, seed).unwrap();
        let p = classical.exact_reference.as_ref().unwrap();
        println!("{spec}");
        println!("  quantum ({bell}):  {}/{} wins", quantum.wins, quantum.trials);
        println!(
            "  uniform:           {:.5} (exact {p} = {:.5}, 4σ band ±{:.5})",
            classical.win_frequency,
            p.to_f64(),
            binomial_band(p.to_f64(), trials)
        );
    }
}
