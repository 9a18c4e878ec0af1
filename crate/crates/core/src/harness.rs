//! Referee-driven Monte-Carlo execution.
//!
//! Each trial gets its own random streams derived from the master seed, the
//! trial index and a role tag, so results do not depend on the order in which
//! trials execute. Players see only the current question and the current
//! round's resources: their private stream and, for quantum players, one half
//! of a freshly provisioned entangled pair.

use std::cell::RefCell;
use std::fmt;
use std::io;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{DeterministicStrategyPair, ExactProb, QuestionMap, MAX_ENUMERATION_ROUNDS};
use crate::games::{Answer, Game3Conditions, GameId, GameSpec, Question, Round, Transcript, Verdict};
use crate::quantum::{
    eigen_residual, measure_x_site, pauli_x_observable, phi_plus_state, singlet_state, Site, StateVector,
    TwoQubitObservable, EIGEN_TOLERANCE,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HarnessError {
    #[error("trial count must be at least 1")]
    ZeroTrials,
    #[error("both players are the same strategy instance; players may not share state")]
    SharedInstance,
    #[error("quantum players expect different entangled states ({alice} vs {bob})")]
    MismatchedEntanglement { alice: BellState, bob: BellState },
}

/// Entangled two-qubit resource states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellState {
    Singlet,
    PhiPlus,
}

impl BellState {
    pub fn state(self) -> StateVector {
        match self {
            BellState::Singlet => singlet_state(),
            BellState::PhiPlus => phi_plus_state(),
        }
    }
}

impl fmt::Display for BellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BellState::Singlet => "singlet",
            BellState::PhiPlus => "phi_plus",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StrategyKind {
    UniformRandom,
    QuantumSinglet,
    QuantumPhiPlus,
    FixedDeterministic,
    /// User-supplied strategy; no exact reference is computed for it.
    Custom,
}

impl StrategyKind {
    pub fn entanglement(self) -> Option<BellState> {
        match self {
            StrategyKind::QuantumSinglet => Some(BellState::Singlet),
            StrategyKind::QuantumPhiPlus => Some(BellState::PhiPlus),
            _ => None,
        }
    }
}

struct EntangledPair {
    state: StateVector,
    rng: ChaCha8Rng,
}

/// One player's half of the round's entangled pair.
pub struct QubitShare<'a> {
    pair: &'a RefCell<EntangledPair>,
    site: Site,
}

impl QubitShare<'_> {
    pub fn site(&self) -> Site {
        self.site
    }

    /// Measures σx on this player's qubit, collapsing the shared pair.
    pub fn measure_x(&self) -> Answer {
        let mut pair = self.pair.borrow_mut();
        let EntangledPair { state, rng } = &mut *pair;
        let (sign, post) = measure_x_site(state, self.site, rng).expect("pair states stay normalized");
        *state = post;
        sign.into()
    }
}

/// What a player holds while answering a single round.
pub struct RoundResource<'a> {
    rng: &'a mut ChaCha8Rng,
    qubit: Option<QubitShare<'a>>,
}

impl<'a> RoundResource<'a> {
    /// Player-private random stream.
    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        self.rng
    }

    pub fn qubit(&self) -> Option<&QubitShare<'a>> {
        self.qubit.as_ref()
    }
}

/// A player's answering rule.
///
/// Answers are computed from `&self`, the question and the round resource;
/// no trial index or history is passed in.
pub trait PlayerStrategy: Send + Sync {
    fn kind(&self) -> StrategyKind;

    fn answer(&self, question: Question, resource: &mut RoundResource<'_>) -> Answer;

    /// The fixed answer map, for deterministic strategies.
    fn deterministic_map(&self) -> Option<QuestionMap> {
        None
    }
}

/// Fair coin from the player's private stream.
#[derive(Debug, Clone, Copy, Default)]
pub struct UniformRandomPlayer;

impl PlayerStrategy for UniformRandomPlayer {
    fn kind(&self) -> StrategyKind {
        StrategyKind::UniformRandom
    }

    fn answer(&self, _question: Question, resource: &mut RoundResource<'_>) -> Answer {
        Answer::from_bit(resource.rng().gen::<bool>())
    }
}

/// Measures σx on its qubit whatever the question; X̄ maps to σx as well
/// because σx² = I.
#[derive(Debug, Clone, Copy)]
pub struct QuantumPlayer {
    state: BellState,
}

impl QuantumPlayer {
    pub fn new(state: BellState) -> QuantumPlayer {
        QuantumPlayer { state }
    }
}

impl PlayerStrategy for QuantumPlayer {
    fn kind(&self) -> StrategyKind {
        match self.state {
            BellState::Singlet => StrategyKind::QuantumSinglet,
            BellState::PhiPlus => StrategyKind::QuantumPhiPlus,
        }
    }

    fn answer(&self, _question: Question, resource: &mut RoundResource<'_>) -> Answer {
        resource
            .qubit()
            .expect("referee provisions a pair for quantum players")
            .measure_x()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DeterministicPlayer {
    map: QuestionMap,
}

impl DeterministicPlayer {
    pub fn new(map: QuestionMap) -> DeterministicPlayer {
        DeterministicPlayer { map }
    }
}

impl PlayerStrategy for DeterministicPlayer {
    fn kind(&self) -> StrategyKind {
        StrategyKind::FixedDeterministic
    }

    fn answer(&self, question: Question, _resource: &mut RoundResource<'_>) -> Answer {
        self.map.answer(question)
    }

    fn deterministic_map(&self) -> Option<QuestionMap> {
        Some(self.map)
    }
}

pub fn uniform_random_player() -> Arc<dyn PlayerStrategy> {
    Arc::new(UniformRandomPlayer)
}

/// Alice and Bob for the given shared state.
pub fn quantum_players(state: BellState) -> Players {
    Players::new(Arc::new(QuantumPlayer::new(state)), Arc::new(QuantumPlayer::new(state)))
        .expect("matching quantum players")
}

/// Alice and Bob, validated against the isolation contract.
#[derive(Clone)]
pub struct Players {
    alice: Arc<dyn PlayerStrategy>,
    bob: Arc<dyn PlayerStrategy>,
    pair: Option<BellState>,
}

impl Players {
    pub fn new(alice: Arc<dyn PlayerStrategy>, bob: Arc<dyn PlayerStrategy>) -> Result<Players, HarnessError> {
        if std::ptr::addr_eq(Arc::as_ptr(&alice), Arc::as_ptr(&bob)) {
            return Err(HarnessError::SharedInstance);
        }
        let pair = match (alice.kind().entanglement(), bob.kind().entanglement()) {
            (Some(a), Some(b)) if a != b => {
                return Err(HarnessError::MismatchedEntanglement { alice: a, bob: b });
            }
            (a, b) => a.or(b),
        };
        Ok(Players { alice, bob, pair })
    }

    pub fn uniform() -> Players {
        Players::new(uniform_random_player(), uniform_random_player()).expect("distinct instances")
    }

    pub fn deterministic(pair: DeterministicStrategyPair) -> Players {
        Players::new(
            Arc::new(DeterministicPlayer::new(pair.alice)),
            Arc::new(DeterministicPlayer::new(pair.bob)),
        )
        .expect("distinct instances")
    }

    pub fn kinds(&self) -> (StrategyKind, StrategyKind) {
        (self.alice.kind(), self.bob.kind())
    }

    /// The state the referee provisions each round, if any player is quantum.
    pub fn shared_state(&self) -> Option<BellState> {
        self.pair
    }
}

impl fmt::Debug for Players {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Players")
            .field("alice", &self.alice.kind())
            .field("bob", &self.bob.kind())
            .field("pair", &self.pair)
            .finish()
    }
}

#[derive(Debug, Clone, Copy)]
enum Role {
    Referee = 0,
    Alice = 1,
    Bob = 2,
    Source = 3,
}

// Counter-based split: the ChaCha key is (master seed, trial, role).
fn stream(seed: u64, trial: u64, role: Role) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&trial.to_le_bytes());
    key[16..24].copy_from_slice(&(role as u64).to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn play_trial(spec: &GameSpec, players: &Players, seed: u64, trial: u64) -> Transcript {
    let mut referee = stream(seed, trial, Role::Referee);
    let mut alice_rng = stream(seed, trial, Role::Alice);
    let mut bob_rng = stream(seed, trial, Role::Bob);
    let mut source_rng = players.pair.map(|_| stream(seed, trial, Role::Source));

    let mut rounds = Vec::with_capacity(spec.rounds());
    for round_index in 0..spec.rounds() {
        // fresh pair before the questions go out
        let pair = match (players.pair, source_rng.take()) {
            (Some(bell), Some(rng)) => Some(RefCell::new(EntangledPair {
                state: bell.state(),
                rng,
            })),
            _ => None,
        };
        let (q_a, q_b) = spec.assign_questions(round_index, &mut referee);
        let a = players.alice.answer(
            q_a,
            &mut RoundResource {
                rng: &mut alice_rng,
                qubit: pair.as_ref().map(|pair| QubitShare { pair, site: Site::A }),
            },
        );
        let b = players.bob.answer(
            q_b,
            &mut RoundResource {
                rng: &mut bob_rng,
                qubit: pair.as_ref().map(|pair| QubitShare { pair, site: Site::B }),
            },
        );
        source_rng = pair.map(|p| p.into_inner().rng);
        rounds.push(Round { q_a, q_b, a, b });
    }
    Transcript::new(spec.game_id(), rounds)
}

/// One eigen-relation check O|ψ⟩ = λ|ψ⟩.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenCheck {
    pub observable: String,
    pub state: String,
    pub eigenvalue: f64,
    pub residual: f64,
    pub passed: bool,
}

impl EigenCheck {
    pub fn run(name: &str, obs: &TwoQubitObservable, state: &StateVector, eigenvalue: f64) -> EigenCheck {
        let residual = eigen_residual(obs, state, eigenvalue);
        EigenCheck {
            observable: name.to_string(),
            state: state.label().unwrap_or("unnamed").to_string(),
            eigenvalue,
            residual,
            passed: residual <= EIGEN_TOLERANCE,
        }
    }
}

pub const SUM_OBSERVABLE: &str = "sigma_x(A)+sigma_x(B)";
pub const PRODUCT_OBSERVABLE: &str = "sigma_x(A)*sigma_x(B)";

fn zero_sum_check() -> EigenCheck {
    let sum = &pauli_x_observable(Site::A) + &pauli_x_observable(Site::B);
    EigenCheck::run(SUM_OBSERVABLE, &sum, &singlet_state(), 0.0)
}

fn product_check(state: BellState) -> EigenCheck {
    let eigenvalue = match state {
        BellState::Singlet => -1.0,
        BellState::PhiPlus => 1.0,
    };
    EigenCheck::run(
        PRODUCT_OBSERVABLE,
        &pauli_x_observable(Site::Joint),
        &state.state(),
        eigenvalue,
    )
}

/// (σx⊗I + I⊗σx) on the singlet with eigenvalue 0, σx⊗σx on Φ⁺ with +1,
/// and σx⊗σx on the singlet with −1.
pub fn verify_eigen_relations() -> Vec<EigenCheck> {
    vec![
        zero_sum_check(),
        product_check(BellState::PhiPlus),
        product_check(BellState::Singlet),
    ]
}

fn relations_for(state: BellState) -> Vec<EigenCheck> {
    match state {
        BellState::Singlet => vec![zero_sum_check(), product_check(BellState::Singlet)],
        BellState::PhiPlus => vec![product_check(BellState::PhiPlus)],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub game_id: GameId,
    pub n: usize,
    pub trials: u64,
    pub wins: u64,
    pub win_frequency: f64,
    pub exact_reference: Option<ExactProb>,
    pub eigen_checks: Vec<EigenCheck>,
    pub seed: u64,
    pub promise_violations: u64,
}

#[derive(Debug, Serialize)]
struct CsvSummary<'a> {
    game_id: GameId,
    n: usize,
    trials: u64,
    wins: u64,
    win_frequency: f64,
    exact_reference: Option<&'a ExactProb>,
    eigen_checks_passed: usize,
    eigen_checks_total: usize,
    seed: u64,
    promise_violations: u64,
}

impl RunReport {
    /// Header line plus one summary row.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.serialize(CsvSummary {
            game_id: self.game_id,
            n: self.n,
            trials: self.trials,
            wins: self.wins,
            win_frequency: self.win_frequency,
            exact_reference: self.exact_reference.as_ref(),
            eigen_checks_passed: self.eigen_checks.iter().filter(|c| c.passed).count(),
            eigen_checks_total: self.eigen_checks.len(),
            seed: self.seed,
            promise_violations: self.promise_violations,
        })?;
        out.flush()?;
        Ok(())
    }
}

/// Exact win probability of the strategy pair where it is known in closed
/// form: both uniform, both deterministic, or quantum players sharing one
/// pair (for n up to the enumeration cap).
pub fn exact_reference(spec: &GameSpec, players: &Players) -> Option<ExactProb> {
    match players.kinds() {
        (StrategyKind::UniformRandom, StrategyKind::UniformRandom) => Some(crate::analysis::uniform_win_prob(spec)),
        (StrategyKind::FixedDeterministic, StrategyKind::FixedDeterministic) => {
            let pair = DeterministicStrategyPair {
                alice: players.alice.deterministic_map()?,
                bob: players.bob.deterministic_map()?,
            };
            Some(pair.win_prob(spec))
        }
        (a, b) if a == b && a.entanglement().is_some() => {
            correlated_win_prob(spec, a.entanglement().expect("quantum kind"))
        }
        _ => None,
    }
}

// σx outcomes on the singlet are (s, −s) and on Φ⁺ are (s, s), with s a fair
// coin per round. Enumerate Alice's 2^n sign sequences.
fn correlated_win_prob(spec: &GameSpec, state: BellState) -> Option<ExactProb> {
    let n = spec.rounds();
    if n > MAX_ENUMERATION_ROUNDS {
        return None;
    }
    let mut wins = 0u64;
    let total = 1u64 << n;
    let mut rounds = Vec::with_capacity(n);
    for mask in 0..total {
        rounds.clear();
        for i in 0..n {
            let a = Answer::from_bit(mask >> i & 1 == 1);
            let b = match state {
                BellState::Singlet => a.negate(),
                BellState::PhiPlus => a,
            };
            // question arrangement does not affect the answers
            let (q_a, q_b) = spec.question_arrangements()[0];
            rounds.push(Round { q_a, q_b, a, b });
        }
        wins += u64::from(spec.wins(&rounds));
    }
    ExactProb::new(wins, total).ok()
}

fn summarize(spec: &GameSpec, players: &Players, trials: u64, seed: u64, wins: u64, violations: u64) -> RunReport {
    RunReport {
        game_id: spec.game_id(),
        n: spec.rounds(),
        trials,
        wins,
        win_frequency: wins as f64 / trials as f64,
        exact_reference: exact_reference(spec, players),
        eigen_checks: players.pair.map(relations_for).unwrap_or_default(),
        seed,
        promise_violations: violations,
    }
}

fn tally(spec: &GameSpec, transcript: &Transcript) -> (u64, u64) {
    match spec
        .verdict(transcript)
        .expect("referee builds well-formed transcripts")
    {
        Verdict::Win => (1, 0),
        Verdict::Lose => (0, 0),
        Verdict::PromiseViolation => (0, 1),
    }
}

/// Plays `trials` independent transcripts and aggregates them. Equal
/// arguments give identical reports regardless of thread count.
pub fn run_game(spec: &GameSpec, players: &Players, trials: u64, seed: u64) -> Result<RunReport, HarnessError> {
    if trials == 0 {
        return Err(HarnessError::ZeroTrials);
    }
    let (wins, violations) = (0..trials)
        .into_par_iter()
        .map(|trial| tally(spec, &play_trial(spec, players, seed, trial)))
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    Ok(summarize(spec, players, trials, seed, wins, violations))
}

/// [`run_game`] that also returns every transcript, in trial order.
pub fn run_game_recorded(
    spec: &GameSpec,
    players: &Players,
    trials: u64,
    seed: u64,
) -> Result<(RunReport, Vec<Transcript>), HarnessError> {
    if trials == 0 {
        return Err(HarnessError::ZeroTrials);
    }
    let transcripts: Vec<Transcript> = (0..trials)
        .into_par_iter()
        .map(|trial| play_trial(spec, players, seed, trial))
        .collect();
    let (wins, violations) = transcripts
        .iter()
        .map(|t| tally(spec, t))
        .fold((0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    Ok((summarize(spec, players, trials, seed, wins, violations), transcripts))
}

#[derive(Debug, Serialize)]
struct CsvTranscriptRow {
    trial: usize,
    round_index: usize,
    q_a: Question,
    q_b: Question,
    a: i8,
    b: i8,
}

/// Streams `trial,round_index,q_a,q_b,a,b` rows.
pub fn write_transcripts_csv<W: io::Write>(transcripts: &[Transcript], writer: W) -> csv::Result<()> {
    let mut out = csv::Writer::from_writer(writer);
    for (trial, t) in transcripts.iter().enumerate() {
        for (round_index, r) in t.rounds.iter().enumerate() {
            out.serialize(CsvTranscriptRow {
                trial,
                round_index,
                q_a: r.q_a,
                q_b: r.q_b,
                a: r.a.value(),
                b: r.b.value(),
            })?;
        }
    }
    out.flush()?;
    Ok(())
}

/// GAME3 with Φ⁺ players, reported two ways: how often each clause of the
/// winning condition held in the sampled outcomes, and whether σx⊗σx has
/// eigenvalue +1 on Φ⁺.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Game3DualReport {
    pub report: RunReport,
    /// Trials with a·b = 1.
    pub product_condition_count: u64,
    /// Trials with b = −a.
    pub inverse_condition_count: u64,
    pub product_condition_rate: f64,
    pub inverse_condition_rate: f64,
    pub eigen_check: EigenCheck,
}

pub fn game3_dual_report(trials: u64, seed: u64) -> Result<Game3DualReport, HarnessError> {
    let spec = GameSpec::game3();
    let players = quantum_players(BellState::PhiPlus);
    let (report, transcripts) = run_game_recorded(&spec, &players, trials, seed)?;
    let (mut product, mut inverse) = (0u64, 0u64);
    for round in transcripts.iter().flat_map(|t| t.rounds.iter()) {
        let c = Game3Conditions::of(round);
        product += u64::from(c.product);
        inverse += u64::from(c.inverse);
    }
    Ok(Game3DualReport {
        product_condition_count: product,
        inverse_condition_count: inverse,
        product_condition_rate: product as f64 / trials as f64,
        inverse_condition_rate: inverse as f64 / trials as f64,
        eigen_check: product_check(BellState::PhiPlus),
        report,
    })
}

/// Half-width of the 4σ binomial band for `trials` draws at probability `p`.
pub fn binomial_band(p: f64, trials: u64) -> f64 {
    4.0 * (p * (1.0 - p) / trials as f64).sqrt()
}
