//! Two-party nonlocal games: exact classical values, entangled-qubit
//! strategies, and a seeded Monte-Carlo referee.
//!
//! * [`quantum`]: two-qubit states, σx observables, Born-rule sampling.
//! * [`games`]: questions, promises and winning predicates for the three games.
//! * [`analysis`]: exact rational win probabilities and deterministic search.
//! * [`harness`]: referee, player strategies, run reports.
//! * [`cli`]: the `nlgames` command line.
//!
//! ```
//! use nonlocal_games::analysis::uniform_win_prob;
//! use nonlocal_games::games::GameSpec;
//!
//! let p = uniform_win_prob(&GameSpec::game1(2).unwrap());
//! assert_eq!(p.to_string(), "3/8");
//! ```

pub mod analysis;
pub mod cli;
pub mod games;
pub mod harness;
pub mod quantum;
