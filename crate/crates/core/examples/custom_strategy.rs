//! Plugging a user-defined player into the referee.
//!
//! Strategies answer from `&self`, the question and the round's resources
//! only. The referee refuses a pair whose two players are the same instance.
//!
//! cargo run --example custom_strategy

use std::sync::Arc;

use rand::Rng;

use nonlocal_games::games::{Answer, GameSpec, Question};
use nonlocal_games::harness::{run_game, PlayerStrategy, Players, RoundResource, StrategyKind, UniformRandomPlayer};

/// Answers +1 to X and flips a biased coin for X̄.
struct Biased {
    p_plus: f64,
}

impl PlayerStrategy for Biased {
    fn kind(&self) -> StrategyKind {
        StrategyKind::Custom
    }

    fn answer(&self, question: Question, resource: &mut RoundResource<'_>) -> Answer {
        match question {
            Question::X => Answer::Plus,
            Question::XBar => Answer::from_bit(!resource.rng().gen_bool(self.p_plus)),
        }
    }
}

fn main() {
    let spec = GameSpec::game3();
    let players = Players::new(Arc::new(Biased { p_plus: 0.9 }), Arc::new(UniformRandomPlayer)).unwrap();
    let report = run_game(&spec, &players, 20_000, 5).unwrap();
    println!(
        "{spec}: {} wins out of {} (exact reference: {:?})",
        report.wins, report.trials, report.exact_reference
    );

    let shared: Arc<dyn PlayerStrategy> = Arc::new(Biased { p_plus: 0.5 });
    match Players::new(shared.clone(), shared) {
        Ok(_) => println!("unexpected: shared instance accepted"),
        Err(e) => println!("rejected: {e}"),
    }
}
