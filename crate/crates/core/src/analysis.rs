//! Exact classical game values.
//!
//! Two classical models are kept apart:
//!
//! * **Model U**: both players answer independently and uniformly at random.
//!   [`uniform_win_prob`] gives the closed form and
//!   [`brute_force_uniform_win_prob`] counts winning answer tuples.
//! * **Model D**: the players fix a coordinated, memoryless deterministic
//!   strategy pair (one answer per question each).
//!   [`coordinated_deterministic_max`] searches all 16 such pairs.
//!
//! All values are reduced big-integer rationals.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::games::{Answer, GameId, GameSpec, Question, Round, Transcript};

/// Largest round count the brute-force enumerator accepts (2^24 tuples).
pub const MAX_ENUMERATION_ROUNDS: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("enumeration of {rounds} rounds exceeds the cap of {cap}")]
    TooLarge { rounds: usize, cap: usize },
    #[error("probability must lie in [0, 1]: {0}")]
    OutOfRange(String),
    #[error("malformed fraction {0:?}")]
    Parse(String),
    #[error("round count must be at least 1")]
    ZeroRounds,
}

/// A probability held as a reduced fraction num/den with 0 ≤ num ≤ den.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactProb(BigRational);

impl ExactProb {
    pub fn new(num: impl Into<BigUint>, den: impl Into<BigUint>) -> Result<ExactProb, AnalysisError> {
        let (num, den) = (num.into(), den.into());
        if den.is_zero() {
            return Err(AnalysisError::OutOfRange(format!("{num}/0")));
        }
        Self::from_rational(BigRational::new(num.into(), den.into()))
    }

    pub fn from_rational(r: BigRational) -> Result<ExactProb, AnalysisError> {
        if r.is_negative() || r > BigRational::one() {
            return Err(AnalysisError::OutOfRange(r.to_string()));
        }
        Ok(ExactProb(r))
    }

    pub fn zero() -> ExactProb {
        ExactProb(BigRational::zero())
    }

    pub fn one() -> ExactProb {
        ExactProb(BigRational::one())
    }

    pub fn half() -> ExactProb {
        ExactProb(BigRational::new(1.into(), 2.into()))
    }

    pub fn numer(&self) -> BigUint {
        self.0.numer().magnitude().clone()
    }

    pub fn denom(&self) -> BigUint {
        self.0.denom().magnitude().clone()
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn mul(&self, other: &ExactProb) -> ExactProb {
        ExactProb(&self.0 * &other.0)
    }

    /// self / other, when the quotient is still a probability.
    pub fn checked_div(&self, other: &ExactProb) -> Result<ExactProb, AnalysisError> {
        if other.0.is_zero() {
            return Err(AnalysisError::OutOfRange(format!("{self} / 0")));
        }
        ExactProb::from_rational(&self.0 / &other.0)
    }

    /// Decimal string rounded half-up to `digits` significant digits,
    /// computed from the exact fraction.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        assert!(digits >= 1);
        let num = self.numer();
        let den = self.denom();
        if num.is_zero() {
            return format!("0.{}", "0".repeat(digits - 1));
        }
        if num == den {
            return format!("1.{}", "0".repeat(digits - 1));
        }
        let ten = BigUint::from(10u32);
        // leading zeros after the decimal point
        let mut zeros = 0usize;
        let mut scaled = num.clone() * &ten;
        while scaled < den {
            scaled *= &ten;
            zeros += 1;
        }
        let shift = zeros + digits;
        let numerator = num * ten.pow(shift as u32);
        let mut mantissa = (&numerator + &den / 2u32) / &den;
        if mantissa == ten.pow(digits as u32) {
            // rounded up to the next power of ten
            if zeros == 0 {
                return format!("1.{}", "0".repeat(digits - 1));
            }
            mantissa /= &ten;
            zeros -= 1;
        }
        format!("0.{}{}", "0".repeat(zeros), mantissa)
    }
}

impl fmt::Display for ExactProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for ExactProb {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| {
            t.trim()
                .parse::<BigUint>()
                .map_err(|_| AnalysisError::Parse(s.to_string()))
        };
        match s.split_once('/') {
            Some((n, d)) => ExactProb::new(parse(n)?, parse(d)?),
            None => ExactProb::new(parse(s)?, BigUint::one()),
        }
    }
}

impl Serialize for ExactProb {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactProb {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// C(2n, n), computed by the multiplicative formula.
pub fn central_binomial(n: usize) -> BigUint {
    // C(2n, n) = Π_{k=1..n} (n + k) / k, each partial product is an integer
    let mut acc = BigUint::one();
    for k in 1..=n {
        acc *= BigUint::from(n + k);
        acc /= BigUint::from(k);
    }
    acc
}

/// Model U win probability from closed forms:
/// GAME1 → C(2n,n)/4ⁿ, GAME2 → 1/2, GAME3 → 0.
pub fn uniform_win_prob(spec: &GameSpec) -> ExactProb {
    match spec.game_id() {
        GameId::Game1 => {
            let n = spec.rounds();
            let den = BigUint::one() << (2 * n);
            ExactProb::new(central_binomial(n), den).expect("C(2n,n) <= 4^n")
        }
        GameId::Game2 => ExactProb::half(),
        GameId::Game3 => ExactProb::zero(),
    }
}

/// Model U win probability by counting winning answer tuples.
///
/// GAME1/GAME2 enumerate all 2^(2n) answer tuples. GAME3 enumerates both
/// question arrangements times the four answer pairs.
pub fn brute_force_uniform_win_prob(spec: &GameSpec, n_cap: usize) -> Result<ExactProb, AnalysisError> {
    let cap = n_cap.min(MAX_ENUMERATION_ROUNDS);
    if spec.rounds() > cap {
        return Err(AnalysisError::TooLarge {
            rounds: spec.rounds(),
            cap,
        });
    }
    let (wins, total) = match spec.game_id() {
        GameId::Game1 | GameId::Game2 => {
            let n = spec.rounds();
            let total: u64 = 1 << (2 * n);
            let wins: u64 = (0..total)
                .into_par_iter()
                .map_init(
                    || vec![Round::xx(Answer::Plus, Answer::Plus); n],
                    |rounds, mask| {
                        for (i, r) in rounds.iter_mut().enumerate() {
                            r.a = Answer::from_bit(mask >> (2 * i) & 1 == 1);
                            r.b = Answer::from_bit(mask >> (2 * i + 1) & 1 == 1);
                        }
                        u64::from(spec.wins(rounds))
                    },
                )
                .sum();
            (wins, total)
        }
        GameId::Game3 => {
            let mut wins = 0u64;
            let mut total = 0u64;
            for &(q_a, q_b) in spec.question_arrangements() {
                for a in Answer::ALL {
                    for b in Answer::ALL {
                        let t = Transcript::new(GameId::Game3, vec![Round { q_a, q_b, a, b }]);
                        wins += u64::from(spec.evaluate_win(&t).expect("referee arrangement"));
                        total += 1;
                    }
                }
            }
            (wins, total)
        }
    };
    ExactProb::new(wins, total)
}

/// P(game1(n+1)) / P(game1(n)) by exact division of the two closed-form
/// values. Equals (2n+1)/(2n+2).
pub fn decay_ratio(n: usize) -> Result<ExactProb, AnalysisError> {
    if n == 0 {
        return Err(AnalysisError::ZeroRounds);
    }
    let current = uniform_win_prob(&GameSpec::game1(n).expect("n >= 1"));
    let next = uniform_win_prob(&GameSpec::game1(n + 1).expect("n >= 1"));
    next.checked_div(&current)
}

/// Memoryless deterministic answers for both players, indexed by question.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeterministicStrategyPair {
    pub alice: QuestionMap,
    pub bob: QuestionMap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuestionMap {
    pub x: Answer,
    pub xbar: Answer,
}

impl QuestionMap {
    pub fn constant(answer: Answer) -> QuestionMap {
        QuestionMap {
            x: answer,
            xbar: answer,
        }
    }

    pub fn answer(&self, q: Question) -> Answer {
        match q {
            Question::X => self.x,
            Question::XBar => self.xbar,
        }
    }

    pub fn all() -> impl Iterator<Item = QuestionMap> {
        Answer::ALL
            .into_iter()
            .flat_map(|x| Answer::ALL.into_iter().map(move |xbar| QuestionMap { x, xbar }))
    }
}

impl fmt::Display for QuestionMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X->{} XBAR->{}", self.x, self.xbar)
    }
}

impl DeterministicStrategyPair {
    /// All 16 pairs, Alice's map varying slowest.
    pub fn all() -> Vec<DeterministicStrategyPair> {
        QuestionMap::all()
            .flat_map(|alice| QuestionMap::all().map(move |bob| DeterministicStrategyPair { alice, bob }))
            .collect()
    }

    /// Exact win probability, averaging over the referee's equally likely
    /// question arrangements.
    pub fn win_prob(&self, spec: &GameSpec) -> ExactProb {
        let arrangements = spec.question_arrangements();
        let wins = arrangements
            .iter()
            .filter(|&&(q_a, q_b)| {
                let round = Round {
                    q_a,
                    q_b,
                    a: self.alice.answer(q_a),
                    b: self.bob.answer(q_b),
                };
                let t = Transcript::new(spec.game_id(), vec![round; spec.rounds()]);
                spec.evaluate_win(&t).expect("referee arrangement")
            })
            .count();
        ExactProb::new(wins, arrangements.len()).expect("wins <= arrangements")
    }
}

impl fmt::Display for DeterministicStrategyPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "alice[{}] bob[{}]", self.alice, self.bob)
    }
}

/// Every deterministic pair with its exact win probability.
pub fn enumerate_deterministic(spec: &GameSpec) -> Vec<(DeterministicStrategyPair, ExactProb)> {
    DeterministicStrategyPair::all()
        .into_iter()
        .map(|pair| {
            let p = pair.win_prob(spec);
            (pair, p)
        })
        .collect()
}

/// Model D value: best win probability over all deterministic pairs.
pub fn coordinated_deterministic_max(spec: &GameSpec) -> ExactProb {
    enumerate_deterministic(spec)
        .into_iter()
        .map(|(_, p)| p)
        .max()
        .expect("16 pairs")
}
