//! Asymmetric timed games: Timer picks a letter and a delay, Monitor answers
//! with a letter, and the owner wins iff the resulting timed word over pair
//! letters `t|m` is accepted by the winning condition.

mod controller;
mod extract;
mod play;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{Acceptance, AutomatonDoc, AutomatonError, LassoWord, TimedAutomaton};
use crate::exact_time::Rat;

pub use controller::{
    MonitorController, MonitorRunner, TimerController, TimerControllerDoc, TimerEdge, TimerMove, TimerRunner,
};
pub use extract::{extract_timer_controller, Extraction};
pub use play::{adjudicate, run_lasso, run_play, DEFAULT_JOINT_BUDGET};

/// Separator between the Timer and Monitor components of a pair letter.
pub const PAIR_SEP: char = '|';

pub fn pair_letter(t: &str, m: &str) -> String {
    format!("{t}{PAIR_SEP}{m}")
}

pub fn split_pair(l: &str) -> Option<(&str, &str)> {
    l.split_once(PAIR_SEP)
}

/// Every `t|m` letter, Timer-major.
pub fn pair_alphabet<S: AsRef<str>, U: AsRef<str>>(timer: &[S], monitor: &[U]) -> Vec<String> {
    timer
        .iter()
        .flat_map(|t| monitor.iter().map(move |m| pair_letter(t.as_ref(), m.as_ref())))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Player {
    Timer,
    Monitor,
}

impl Player {
    pub fn opponent(self) -> Player {
        match self {
            Player::Timer => Player::Monitor,
            Player::Monitor => Player::Timer,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::Timer => "Timer",
            Player::Monitor => "Monitor",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error("round {round}: monitor controller has {enabled} enabled transitions")]
    Determinism { round: usize, enabled: usize },
    #[error("round {round}: letter {letter:?} is not in the {player} alphabet")]
    IllegalLetter { round: usize, player: Player, letter: String },
    #[error("joint state budget of {0} exhausted")]
    BudgetExhausted(usize),
    #[error("Büchi conditions can only be adjudicated on lasso plays")]
    NeedsLasso,
    #[error("invalid game setup: {0}")]
    Setup(String),
}

#[derive(Debug, Clone)]
pub struct TimedGame {
    pub timer_alphabet: Vec<String>,
    pub monitor_alphabet: Vec<String>,
    pub condition: TimedAutomaton,
    pub owner: Player,
    pub agent: Player,
}

impl TimedGame {
    pub fn new(
        timer_alphabet: Vec<String>,
        monitor_alphabet: Vec<String>,
        condition: TimedAutomaton,
        owner: Player,
        agent: Player,
    ) -> Result<Self, GameError> {
        let expected: BTreeSet<String> = pair_alphabet(&timer_alphabet, &monitor_alphabet).into_iter().collect();
        let actual: BTreeSet<String> = condition.alphabet().iter().cloned().collect();
        if expected != actual {
            return Err(GameError::Setup("condition alphabet must be T × M".into()));
        }
        Ok(TimedGame { timer_alphabet, monitor_alphabet, condition, owner, agent })
    }

    pub fn is_reach(&self) -> bool {
        self.condition.acceptance() == Acceptance::Reach
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Round {
    pub timer: String,
    pub monitor: String,
    pub time: Rat,
}

impl Round {
    pub fn letter(&self) -> String {
        pair_letter(&self.timer, &self.monitor)
    }
}

/// A finite play, or a lasso when `loop_start` is set: rounds from
/// `loop_start` on repeat forever with the same delays.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "camelCase")]
pub struct Play {
    pub rounds: Vec<Round>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loop_start: Option<usize>,
}

impl Play {
    pub fn word(&self) -> Vec<(String, Rat)> {
        self.rounds.iter().map(|r| (r.letter(), r.time.clone())).collect()
    }

    pub fn delays(&self) -> Vec<Rat> {
        let mut last = Rat::zero();
        self.rounds
            .iter()
            .map(|r| {
                let d = r.time.checked_sub(&last).expect("play timestamps are monotone");
                last = r.time.clone();
                d
            })
            .collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.rounds.windows(2).all(|w| w[0].time <= w[1].time)
    }

    pub fn to_lasso(&self) -> Option<LassoWord> {
        let start = self.loop_start?;
        if start >= self.rounds.len() {
            return None;
        }
        let pairs: Vec<(String, Rat)> =
            self.rounds.iter().zip(self.delays()).map(|(r, d)| (r.letter(), d)).collect();
        Some(LassoWord::new(pairs[..start].to_vec(), pairs[start..].to_vec()))
    }

    /// First `n` rounds of the denoted (possibly infinite) play.
    pub fn unroll(&self, n: usize) -> Play {
        let Some(start) = self.loop_start else {
            return Play { rounds: self.rounds.iter().take(n).cloned().collect(), loop_start: None };
        };
        let delays = self.delays();
        let mut rounds = Vec::with_capacity(n);
        let mut t = Rat::zero();
        for i in 0..n {
            let j = if i < self.rounds.len() { i } else { start + (i - start) % (self.rounds.len() - start) };
            t = &t + &delays[j];
            rounds.push(Round { timer: self.rounds[j].timer.clone(), monitor: self.rounds[j].monitor.clone(), time: t.clone() });
        }
        Play { rounds, loop_start: None }
    }
}

impl fmt::Display for Play {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>5}  {:>10}  {:<10}  monitor", "round", "time", "timer")?;
        for (i, r) in self.rounds.iter().enumerate() {
            let mark = if self.loop_start == Some(i) { "  <- loop" } else { "" };
            writeln!(f, "{:>5}  {:>10}  {:<10}  {}{mark}", i + 1, r.time.to_string(), r.timer, r.monitor)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Verdict {
    OwnerWins,
    OpponentWins,
    OpenAtHorizon,
}

impl Verdict {
    pub fn winner(self, owner: Player) -> Option<Player> {
        match self {
            Verdict::OwnerWins => Some(owner),
            Verdict::OpponentWins => Some(owner.opponent()),
            Verdict::OpenAtHorizon => None,
        }
    }
}

/// Timer strategy: Monitor history to the next `(letter, delay)`.
pub trait TimerStrategy {
    fn next_move(&mut self, monitor_history: &[String]) -> TimerMove;
}

/// Monitor strategy: history of `(Timer letter, timestamp)` to an answer.
pub trait MonitorStrategy {
    fn answer(&mut self, timer_history: &[(String, Rat)]) -> Result<String, GameError>;
}

impl<F: FnMut(&[String]) -> TimerMove> TimerStrategy for F {
    fn next_move(&mut self, h: &[String]) -> TimerMove {
        self(h)
    }
}

impl<F: FnMut(&[(String, Rat)]) -> String> MonitorStrategy for F {
    fn answer(&mut self, h: &[(String, Rat)]) -> Result<String, GameError> {
        Ok(self(h))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct GameDoc {
    pub timer_alphabet: Vec<String>,
    pub monitor_alphabet: Vec<String>,
    pub owner: Player,
    pub agent: Player,
    pub condition: AutomatonDoc,
}

impl From<&TimedGame> for GameDoc {
    fn from(g: &TimedGame) -> Self {
        GameDoc {
            timer_alphabet: g.timer_alphabet.clone(),
            monitor_alphabet: g.monitor_alphabet.clone(),
            owner: g.owner,
            agent: g.agent,
            condition: AutomatonDoc::from(&g.condition),
        }
    }
}

impl TryFrom<&GameDoc> for TimedGame {
    type Error = GameError;

    fn try_from(d: &GameDoc) -> Result<Self, GameError> {
        let condition = TimedAutomaton::try_from(&d.condition)?;
        TimedGame::new(d.timer_alphabet.clone(), d.monitor_alphabet.clone(), condition, d.owner, d.agent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_time::r;

    fn round(t: &str, m: &str, time: &str) -> Round {
        Round { timer: t.into(), monitor: m.into(), time: r(time) }
    }

    #[test]
    fn lasso_unroll_repeats_delays() {
        let p = Play { rounds: vec![round("a", "x", "1/2"), round("b", "y", "2")], loop_start: Some(1) };
        let u = p.unroll(4);
        let times: Vec<String> = u.rounds.iter().map(|r| r.time.to_string()).collect();
        assert_eq!(times, ["1/2", "2", "7/2", "5"]);
        let lasso = p.to_lasso().unwrap();
        assert_eq!(lasso.looped, vec![("b|y".to_string(), r("3/2"))]);
    }

    #[test]
    fn pair_letters_split_back() {
        assert_eq!(split_pair(&pair_letter("s0:inc c1->s1", "✓")), Some(("s0:inc c1->s1", "✓")));
        assert_eq!(pair_alphabet(&["a", "b"], &["x"]), ["a|x", "b|x"]);
    }

    #[test]
    fn play_json_roundtrip() {
        let p = Play { rounds: vec![round("a", "x", "1/3")], loop_start: Some(0) };
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"rounds":[{"timer":"a","monitor":"x","time":"1/3"}],"loopStart":0}"#);
        assert_eq!(serde_json::from_str::<Play>(&s).unwrap(), p);
    }
}
