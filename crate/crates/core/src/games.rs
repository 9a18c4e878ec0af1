//! Referee-side definitions of the three games: question assignment,
//! promise, and winning predicate.
//!
//! | game  | rounds | questions          | win                         |
//! |-------|--------|--------------------|-----------------------------|
//! | GAME1 | n ≥ 1  | (X, X) every round | Σ (aᵢ + bᵢ) = 0             |
//! | GAME2 | n ≥ 1  | (X, X) every round | Π aᵢ·bᵢ = 1                 |
//! | GAME3 | 1      | {X, XBAR} by coin  | b = −a  and  a·b = 1        |

use std::fmt;
use std::io;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("round count must be at least 1")]
    ZeroRounds,
    #[error("transcript belongs to {found} but the game is {expected}")]
    GameMismatch { expected: GameId, found: GameId },
    #[error("transcript has {found} rounds, expected {expected}")]
    RoundCount { expected: usize, found: usize },
    #[error("promise violated in round {round}: questions ({q_a}, {q_b})")]
    PromiseViolation { round: usize, q_a: Question, q_b: Question },
    #[error("answer must be +1 or -1, got {0}")]
    InvalidAnswer(i64),
    #[error("unknown question {0:?}")]
    InvalidQuestion(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GameId {
    Game1,
    Game2,
    Game3,
}

impl GameId {
    pub fn number(self) -> u8 {
        match self {
            GameId::Game1 => 1,
            GameId::Game2 => 2,
            GameId::Game3 => 3,
        }
    }
}

impl fmt::Display for GameId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GAME{}", self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Question {
    #[serde(rename = "X")]
    X,
    /// The complementary question X̄.
    #[serde(rename = "XBAR")]
    XBar,
}

impl Question {
    pub const ALL: [Question; 2] = [Question::X, Question::XBar];

    pub fn complement(self) -> Question {
        match self {
            Question::X => Question::XBar,
            Question::XBar => Question::X,
        }
    }
}

impl fmt::Display for Question {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Question::X => "X",
            Question::XBar => "XBAR",
        })
    }
}

impl std::str::FromStr for Question {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "X" => Ok(Question::X),
            "XBAR" => Ok(Question::XBar),
            other => Err(GameError::InvalidQuestion(other.to_string())),
        }
    }
}

/// A player's answer, +1 or −1. Serialized as the integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i64")]
pub enum Answer {
    Minus,
    Plus,
}

impl Answer {
    pub const ALL: [Answer; 2] = [Answer::Plus, Answer::Minus];

    pub fn value(self) -> i8 {
        match self {
            Answer::Plus => 1,
            Answer::Minus => -1,
        }
    }

    pub fn negate(self) -> Answer {
        match self {
            Answer::Plus => Answer::Minus,
            Answer::Minus => Answer::Plus,
        }
    }

    pub fn from_bit(bit: bool) -> Answer {
        if bit {
            Answer::Minus
        } else {
            Answer::Plus
        }
    }
}

impl From<Answer> for i8 {
    fn from(a: Answer) -> i8 {
        a.value()
    }
}

impl TryFrom<i64> for Answer {
    type Error = GameError;

    fn try_from(v: i64) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Answer::Plus),
            -1 => Ok(Answer::Minus),
            other => Err(GameError::InvalidAnswer(other)),
        }
    }
}

impl From<crate::quantum::Sign> for Answer {
    fn from(s: crate::quantum::Sign) -> Answer {
        match s {
            crate::quantum::Sign::Plus => Answer::Plus,
            crate::quantum::Sign::Minus => Answer::Minus,
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Plus => "+1",
            Answer::Minus => "-1",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Round {
    pub q_a: Question,
    pub q_b: Question,
    pub a: Answer,
    pub b: Answer,
}

impl Round {
    /// Round with both players asked X.
    pub fn xx(a: Answer, b: Answer) -> Round {
        Round {
            q_a: Question::X,
            q_b: Question::X,
            a,
            b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub game_id: GameId,
    pub rounds: Vec<Round>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRound {
    round_index: usize,
    q_a: Question,
    q_b: Question,
    a: i8,
    b: i8,
}

impl Transcript {
    pub fn new(game_id: GameId, rounds: Vec<Round>) -> Transcript {
        Transcript { game_id, rounds }
    }

    /// Writes `round_index,q_a,q_b,a,b` rows with a header.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        for (round_index, r) in self.rounds.iter().enumerate() {
            out.serialize(CsvRound {
                round_index,
                q_a: r.q_a,
                q_b: r.q_b,
                a: r.a.value(),
                b: r.b.value(),
            })?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: io::Read>(game_id: GameId, reader: R) -> Result<Transcript, TranscriptCsvError> {
        let mut rows = csv::Reader::from_reader(reader);
        let mut rounds = Vec::new();
        for (expected, row) in rows.deserialize::<CsvRound>().enumerate() {
            let row = row?;
            if row.round_index != expected {
                return Err(TranscriptCsvError::RoundIndex {
                    expected,
                    found: row.round_index,
                });
            }
            rounds.push(Round {
                q_a: row.q_a,
                q_b: row.q_b,
                a: Answer::try_from(i64::from(row.a))?,
                b: Answer::try_from(i64::from(row.b))?,
            });
        }
        Ok(Transcript { game_id, rounds })
    }
}

#[derive(Debug, Error)]
pub enum TranscriptCsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("round_index {found} out of order, expected {expected}")]
    RoundIndex { expected: usize, found: usize },
}

/// Outcome of scoring one transcript.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Win,
    Lose,
    PromiseViolation,
}

/// A game instance: identity plus round count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GameSpec {
    game_id: GameId,
    rounds: usize,
}

impl GameSpec {
    /// Sum of all answers must vanish.
    pub fn game1(rounds: usize) -> Result<GameSpec, GameError> {
        if rounds == 0 {
            return Err(GameError::ZeroRounds);
        }
        Ok(GameSpec {
            game_id: GameId::Game1,
            rounds,
        })
    }

    /// Product of all answers must be +1.
    pub fn game2(rounds: usize) -> Result<GameSpec, GameError> {
        if rounds == 0 {
            return Err(GameError::ZeroRounds);
        }
        Ok(GameSpec {
            game_id: GameId::Game2,
            rounds,
        })
    }

    /// Single round, complementary questions, answers must be additive
    /// inverses whose product is 1.
    pub fn game3() -> GameSpec {
        GameSpec {
            game_id: GameId::Game3,
            rounds: 1,
        }
    }

    /// `rounds` is ignored for GAME3.
    pub fn from_id(game_id: GameId, rounds: usize) -> Result<GameSpec, GameError> {
        match game_id {
            GameId::Game1 => Self::game1(rounds),
            GameId::Game2 => Self::game2(rounds),
            GameId::Game3 => Ok(Self::game3()),
        }
    }

    pub fn game_id(&self) -> GameId {
        self.game_id
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// Questions sent to (Alice, Bob) in one round.
    pub fn assign_questions<R: Rng + ?Sized>(&self, round_index: usize, rng: &mut R) -> (Question, Question) {
        debug_assert!(round_index < self.rounds);
        match self.game_id {
            GameId::Game1 | GameId::Game2 => (Question::X, Question::X),
            GameId::Game3 => {
                if rng.gen::<bool>() {
                    (Question::X, Question::XBar)
                } else {
                    (Question::XBar, Question::X)
                }
            }
        }
    }

    /// Question arrangements the referee can produce, each equally likely.
    pub fn question_arrangements(&self) -> &'static [(Question, Question)] {
        match self.game_id {
            GameId::Game1 | GameId::Game2 => &[(Question::X, Question::X)],
            GameId::Game3 => &[(Question::X, Question::XBar), (Question::XBar, Question::X)],
        }
    }

    fn check_shape(&self, transcript: &Transcript) -> Result<(), GameError> {
        if transcript.game_id != self.game_id {
            return Err(GameError::GameMismatch {
                expected: self.game_id,
                found: transcript.game_id,
            });
        }
        if transcript.rounds.len() != self.rounds {
            return Err(GameError::RoundCount {
                expected: self.rounds,
                found: transcript.rounds.len(),
            });
        }
        Ok(())
    }

    fn first_promise_violation(&self, rounds: &[Round]) -> Option<usize> {
        match self.game_id {
            GameId::Game1 | GameId::Game2 => None,
            GameId::Game3 => rounds.iter().position(|r| r.q_a == r.q_b),
        }
    }

    /// GAME1/GAME2 carry no promise. GAME3 requires complementary questions.
    pub fn check_promise(&self, transcript: &Transcript) -> Result<bool, GameError> {
        self.check_shape(transcript)?;
        Ok(self.first_promise_violation(&transcript.rounds).is_none())
    }

    /// Winning predicate over answers only, assuming the promise holds.
    pub fn wins(&self, rounds: &[Round]) -> bool {
        match self.game_id {
            GameId::Game1 => {
                rounds
                    .iter()
                    .map(|r| i64::from(r.a.value()) + i64::from(r.b.value()))
                    .sum::<i64>()
                    == 0
            }
            GameId::Game2 => {
                // product is +1 iff the number of −1 answers is even
                let minus = rounds
                    .iter()
                    .map(|r| usize::from(r.a == Answer::Minus) + usize::from(r.b == Answer::Minus))
                    .sum::<usize>();
                minus % 2 == 0
            }
            GameId::Game3 => rounds.iter().all(|r| {
                let conditions = Game3Conditions::of(r);
                conditions.inverse && conditions.product
            }),
        }
    }

    /// Scores a transcript. A promise violation is an error, not a loss.
    pub fn evaluate_win(&self, transcript: &Transcript) -> Result<bool, GameError> {
        self.check_shape(transcript)?;
        if let Some(round) = self.first_promise_violation(&transcript.rounds) {
            let r = transcript.rounds[round];
            return Err(GameError::PromiseViolation {
                round,
                q_a: r.q_a,
                q_b: r.q_b,
            });
        }
        Ok(self.wins(&transcript.rounds))
    }

    /// Like [`GameSpec::evaluate_win`] but folds promise violations into a
    /// verdict. Shape errors are still returned.
    pub fn verdict(&self, transcript: &Transcript) -> Result<Verdict, GameError> {
        match self.evaluate_win(transcript) {
            Ok(true) => Ok(Verdict::Win),
            Ok(false) => Ok(Verdict::Lose),
            Err(GameError::PromiseViolation { .. }) => Ok(Verdict::PromiseViolation),
            Err(e) => Err(e),
        }
    }
}

impl fmt::Display for GameSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(n={})", self.game_id, self.rounds)
    }
}

pub fn game1_spec(rounds: usize) -> Result<GameSpec, GameError> {
    GameSpec::game1(rounds)
}

pub fn game2_spec(rounds: usize) -> Result<GameSpec, GameError> {
    GameSpec::game2(rounds)
}

pub fn game3_spec() -> GameSpec {
    GameSpec::game3()
}

/// The two clauses of the GAME3 winning condition, evaluated separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Game3Conditions {
    /// a·b = 1
    pub product: bool,
    /// b = −a
    pub inverse: bool,
}

impl Game3Conditions {
    pub fn of(round: &Round) -> Game3Conditions {
        Game3Conditions {
            product: round.a.value() * round.b.value() == 1,
            inverse: round.b == round.a.negate(),
        }
    }
}
