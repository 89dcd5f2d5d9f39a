//! Boundedness of a counter machine as a reachability game under
//! one-resetting clocks.
//!
//! Timer first plays pool letters `☐` whose fractional parts form the pool,
//! then instructions. A counter's value is the number of its *active*
//! fractional parts: those whose latest instruction on the counter is an
//! increment issued after the counter's latest zero test. Monitor answers
//! each letter with `✓` or `✗` and must object exactly when the latest
//! letter breaks one of two rules:
//!
//! * an increment must use an inactive fractional part;
//! * a decrement must use an active one.
//!
//! Timer wins a finite play once Monitor objects to a correct letter (one
//! whose fractional part is in the pool) or accepts an incorrect one.

mod controller;
mod falsify;
mod honest;
mod machines;
mod semantics;

use thiserror::Error;

use crate::automata::AutomatonError;
use crate::game::GameError;
use crate::lcm::Lcm;

pub use controller::{summarize_guards, synthesize_monitor_controller, GuardSummary};
pub use falsify::{falsify_controller, probe_fracs};
pub use honest::{even_pool, honest_timer, honest_word, honest_word_with_order, inject_fault, Fault, ScriptedTimer};
pub use machines::{bounded_game, build_rule_automata, build_win, RuleAutomata};
pub use semantics::{activity, claim62_check, rule_oracles, val_and_rho, Activity, RuleStatus, ValAndRho};

pub const POOL: &str = "☐";
pub const OK: &str = "✓";
pub const ERR: &str = "✗";
pub const ANSWERS: [&str; 2] = [OK, ERR];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundedError {
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("letter {0:?} is neither the pool letter nor an instruction")]
    UnknownLetter(String),
    #[error("word is not pool letters followed by a chain of instructions from the initial location")]
    NotRegular,
    #[error("run is not a free-test run from the initial configuration")]
    NotARun,
    #[error("pool must be strictly increasing timestamps in (0, 1): {0}")]
    BadPool(String),
    #[error("step {step}: every pooled fractional part is already active")]
    PoolExhausted { step: usize },
    #[error("target {target} is below the required {needed}")]
    TargetTooSmall { target: u64, needed: u64 },
    #[error("no counter reaches {target} within {steps} free-test steps")]
    TargetUnreached { target: u64, steps: usize },
    #[error("controller has {0} enabled transitions on a probe")]
    Nondeterministic(usize),
}

/// A Timer letter of the game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Letter {
    Pool,
    Instr(usize),
}

/// The pool letter followed by the instruction letters.
pub fn timer_alphabet(m: &Lcm) -> Vec<String> {
    std::iter::once(POOL.to_string()).chain(m.instruction_letters()).collect()
}

pub fn classify(m: &Lcm, letter: &str) -> Result<Letter, BoundedError> {
    if letter == POOL {
        return Ok(Letter::Pool);
    }
    m.instruction_by_letter(letter)
        .map(Letter::Instr)
        .ok_or_else(|| BoundedError::UnknownLetter(letter.to_string()))
}
