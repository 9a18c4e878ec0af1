use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nonlocal_games::analysis::QuestionMap;
use nonlocal_games::analysis::{brute_force_uniform_win_prob, uniform_win_prob, ExactProb};
use nonlocal_games::games::{Answer, GameId, GameSpec, Question, Round, Transcript};
use nonlocal_games::harness::{
    binomial_band, quantum_players, run_game, run_game_recorded, uniform_random_player, BellState, DeterministicPlayer,
    Players,
};
use nonlocal_games::quantum::{
    is_eigenstate, measure_x_pair, pauli_x_observable, x_basis_probabilities, Site, StateVector,
};

fn unit_state() -> impl Strategy<Value = StateVector> {
    prop::array::uniform8(-1.0f64..1.0)
        .prop_filter("nonzero", |v| v.iter().map(|x| x * x).sum::<f64>() > 1e-6)
        .prop_map(|v| {
            let amps = [0, 1, 2, 3].map(|i| Complex64::new(v[2 * i], v[2 * i + 1]));
            StateVector::normalized(amps).unwrap()
        })
}

fn answer() -> impl Strategy<Value = Answer> {
    prop_oneof![Just(Answer::Plus), Just(Answer::Minus)]
}

fn xx_rounds(max: usize) -> impl Strategy<Value = Vec<Round>> {
    prop::collection::vec((answer(), answer()).prop_map(|(a, b)| Round::xx(a, b)), 1..=max)
}

fn negate(rounds: &[Round]) -> Vec<Round> {
    rounds
        .iter()
        .map(|r| Round {
            a: r.a.negate(),
            b: r.b.negate(),
            ..*r
        })
        .collect()
}

fn win(game: GameId, rounds: &[Round]) -> bool {
    let spec = GameSpec::from_id(game, rounds.len()).unwrap();
    spec.evaluate_win(&Transcript::new(game, rounds.to_vec())).unwrap()
}

proptest! {
    #[test]
    fn born_probabilities_sum_to_one(state in unit_state()) {
        let total: f64 = x_basis_probabilities(&state).iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn post_state_is_eigenstate_and_stable(state in unit_state(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (outcome, post) = measure_x_pair(&state, &mut rng).unwrap();
        prop_assert!(is_eigenstate(&pauli_x_observable(Site::A), &post, outcome.a.value().into(), 1e-12));
        prop_assert!(is_eigenstate(&pauli_x_observable(Site::B), &post, outcome.b.value().into(), 1e-12));
        for _ in 0..5 {
            prop_assert_eq!(measure_x_pair(&post, &mut rng).unwrap().0, outcome);
        }
    }

    #[test]
    fn game1_symmetries(rounds in xx_rounds(8), rotate in 0usize..8) {
        let verdict = win(GameId::Game1, &rounds);
        let mut permuted = rounds.clone();
        let k = rotate % permuted.len();
        permuted.rotate_left(k);
        permuted.reverse();
        prop_assert_eq!(win(GameId::Game1, &permuted), verdict);
        let swapped: Vec<Round> = rounds.iter().map(|r| Round { a: r.b, b: r.a, ..*r }).collect();
        prop_assert_eq!(win(GameId::Game1, &swapped), verdict);
        prop_assert_eq!(win(GameId::Game1, &negate(&rounds)), verdict);
    }

    #[test]
    fn game2_depends_only_on_minus_parity(rounds in xx_rounds(8)) {
        let minus = rounds.iter().map(|r| usize::from(r.a == Answer::Minus) + usize::from(r.b == Answer::Minus)).sum::<usize>();
        prop_assert_eq!(win(GameId::Game2, &rounds), minus % 2 == 0);
        prop_assert_eq!(win(GameId::Game2, &negate(&rounds)), win(GameId::Game2, &rounds));
    }

    #[test]
    fn game3_never_wins(q in prop_oneof![Just(Question::X), Just(Question::XBar)], a in answer(), b in answer()) {
        let t = Transcript::new(GameId::Game3, vec![Round { q_a: q, q_b: q.complement(), a, b }]);
        prop_assert_eq!(GameSpec::game3().evaluate_win(&t), Ok(false));
    }

    #[test]
    fn json_report_round_trips(seed in any::<u64>(), game in 1u8..=3, rounds in 1usize..4) {
        let id = [GameId::Game1, GameId::Game2, GameId::Game3][usize::from(game - 1)];
        let spec = GameSpec::from_id(id, rounds).unwrap();
        let report = run_game(&spec, &Players::uniform(), 50, seed).unwrap();
        let json = serde_json::to_string_pretty(&report).unwrap();
        let parsed: nonlocal_games::harness::RunReport = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(serde_json::to_string_pretty(&parsed).unwrap(), json);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn quantum_players_always_win(n in 1usize..12, seed in any::<u64>()) {
        let g1 = run_game(&GameSpec::game1(n).unwrap(), &quantum_players(BellState::Singlet), 200, seed).unwrap();
        prop_assert_eq!(g1.win_frequency, 1.0);
        let g2 = run_game(&GameSpec::game2(n).unwrap(), &quantum_players(BellState::PhiPlus), 200, seed).unwrap();
        prop_assert_eq!(g2.win_frequency, 1.0);
        prop_assert_eq!(g1.promise_violations + g2.promise_violations, 0);
    }

    #[test]
    fn seed_determinism(n in 1usize..6, seed in any::<u64>()) {
        let spec = GameSpec::game1(n).unwrap();
        let a = run_game_recorded(&spec, &Players::uniform(), 300, seed).unwrap();
        let b = run_game_recorded(&spec, &Players::uniform(), 300, seed).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn isolation_untouched_player_replays(seed in any::<u64>()) {
        let spec = GameSpec::game2(4).unwrap();
        let both = Players::uniform();
        // Bob's random stream is no longer consumed
        let bob_fixed = Players::new(
            uniform_random_player(),
            Arc::new(DeterministicPlayer::new(QuestionMap::constant(Answer::Plus))),
        ).unwrap();
        let (_, t1) = run_game_recorded(&spec, &both, 100, seed).unwrap();
        let (_, t2) = run_game_recorded(&spec, &bob_fixed, 100, seed).unwrap();
        for (x, y) in t1.iter().zip(&t2) {
            let alice_x: Vec<Answer> = x.rounds.iter().map(|r| r.a).collect();
            let alice_y: Vec<Answer> = y.rounds.iter().map(|r| r.a).collect();
            prop_assert_eq!(alice_x, alice_y);
        }
    }
}

#[test]
fn closed_forms_match_enumeration_for_small_n() {
    for n in 1..=10 {
        let g1 = GameSpec::game1(n).unwrap();
        assert_eq!(uniform_win_prob(&g1), brute_force_uniform_win_prob(&g1, 12).unwrap());
        let g2 = GameSpec::game2(n).unwrap();
        assert_eq!(brute_force_uniform_win_prob(&g2, 12).unwrap(), ExactProb::half());
        if n > 1 {
            let prev = uniform_win_prob(&GameSpec::game1(n - 1).unwrap());
            assert!(uniform_win_prob(&g1) < prev);
        }
    }
}

#[test]
fn empirical_born_frequencies_converge() {
    let state = StateVector::normalized([
        Complex64::new(0.3, 0.1),
        Complex64::new(-0.5, 0.2),
        Complex64::new(0.1, -0.4),
        Complex64::new(0.6, 0.0),
    ])
    .unwrap();
    let probs = x_basis_probabilities(&state);
    let samples = 100_000u64;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut counts = [0u64; 4];
    for _ in 0..samples {
        let (o, _) = measure_x_pair(&state, &mut rng).unwrap();
        let idx = nonlocal_games::quantum::OutcomePair::ALL
            .iter()
            .position(|x| *x == o)
            .unwrap();
        counts[idx] += 1;
    }
    for (c, p) in counts.iter().zip(probs) {
        let f = *c as f64 / samples as f64;
        assert!((f - p).abs() <= binomial_band(p, samples), "{f} vs {p}");
    }
}

#[test]
fn game3_uniform_players_never_violate_promise() {
    let r = run_game(&GameSpec::game3(), &Players::uniform(), 10_000, 1).unwrap();
    assert_eq!(r.promise_violations, 0);
    assert_eq!(r.wins, 0);
}

#[test]
fn summed_x_annihilates_singlet() {
    let a = pauli_x_observable(Site::A);
    let b = pauli_x_observable(Site::B);
    assert!(a.commutes_with(&b));
    let sum = &a + &b;
    assert!(is_eigenstate(
        &sum,
        &nonlocal_games::quantum::singlet_state(),
        0.0,
        1e-15
    ));
}
