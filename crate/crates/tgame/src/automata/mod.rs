//! Timed automata over exact rational time.
//!
//! Locations, clocks and letters are addressed by index internally and by
//! name in documents. A machine is immutable once built; the builder checks
//! that letters and clocks referenced by transitions exist.

mod compose;
mod dot;
mod json;
mod sim;
mod validate;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact_time::{ClampedValue, Rat};

pub use compose::{intersect_with_checker, remap_alphabet, to_buchi, union, union_all};
pub use dot::to_dot;
pub use json::AutomatonDoc;
pub(crate) use sim::{enabled, initial_configs};
pub use sim::{
    accepts_buchi_lasso, accepts_reach_lasso, accepts_reach_prefix, ends_accepting, successors,
    Config, ConfigSet, LassoWord, ReachStatus, Simulator, TimedWord, DEFAULT_STATE_BUDGET,
};
pub use validate::{validate, ValidationReport};

pub type LocId = usize;
pub type ClockId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("unknown letter {0:?}")]
    UnknownLetter(String),
    #[error("unknown clock {0:?}")]
    UnknownClock(String),
    #[error("unknown location {0:?}")]
    UnknownLocation(String),
    #[error("duplicate name {0:?}")]
    Duplicate(String),
    #[error("automaton has no initial location")]
    NoInitial,
    #[error("timestamps decrease at position {0}")]
    NonMonotone(usize),
    #[error("operation needs {expected} acceptance")]
    WrongAcceptance { expected: &'static str },
    #[error("incompatible machines: {0}")]
    Incompatible(String),
    #[error("state budget of {0} exhausted")]
    BudgetExhausted(usize),
    #[error("lasso loop is empty")]
    EmptyLoop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rel {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Lt => "<",
            Rel::Le => "<=",
            Rel::Eq => "=",
            Rel::Ge => ">=",
            Rel::Gt => ">",
        }
    }

    pub fn parse(s: &str) -> Option<Rel> {
        Some(match s {
            "<" => Rel::Lt,
            "<=" | "≤" => Rel::Le,
            "=" | "==" => Rel::Eq,
            ">=" | "≥" => Rel::Ge,
            ">" => Rel::Gt,
            _ => return None,
        })
    }

    fn holds(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            Rel::Lt => ord == Less,
            Rel::Le => ord != Greater,
            Rel::Eq => ord == Equal,
            Rel::Ge => ord != Less,
            Rel::Gt => ord == Greater,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub clock: ClockId,
    pub rel: Rel,
    pub constant: u64,
}

impl Atom {
    pub fn new(clock: ClockId, rel: Rel, constant: u64) -> Self {
        Atom { clock, rel, constant }
    }

    pub fn holds(&self, v: &ClampedValue) -> bool {
        self.rel.holds(v.cmp_const(self.constant))
    }

    pub fn holds_exact(&self, v: &Rat) -> bool {
        self.rel.holds(v.cmp_int(self.constant))
    }
}

/// Conjunction of atoms; the empty conjunction is ⊤.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Guard(pub Vec<Atom>);

impl Guard {
    pub fn top() -> Self {
        Guard(Vec::new())
    }

    pub fn atom(clock: ClockId, rel: Rel, constant: u64) -> Self {
        Guard(vec![Atom::new(clock, rel, constant)])
    }

    pub fn and(mut self, clock: ClockId, rel: Rel, constant: u64) -> Self {
        self.0.push(Atom::new(clock, rel, constant));
        self
    }

    pub fn is_top(&self) -> bool {
        self.0.is_empty()
    }

    pub fn holds(&self, vals: &[ClampedValue]) -> bool {
        self.0.iter().all(|a| a.holds(&vals[a.clock]))
    }

    pub fn holds_exact(&self, vals: &[Rat]) -> bool {
        self.0.iter().all(|a| a.holds_exact(&vals[a.clock]))
    }

    pub fn max_constant(&self) -> u64 {
        self.0.iter().map(|a| a.constant).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transition {
    pub source: LocId,
    pub letter: String,
    pub guard: Guard,
    pub resets: Vec<ClockId>,
    pub target: LocId,
    pub output: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ResetMode {
    Standard,
    OneResetting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Acceptance {
    Buchi,
    Reach,
}

#[derive(Debug, Clone)]
pub struct TimedAutomaton {
    locations: Vec<String>,
    clocks: Vec<String>,
    alphabet: Vec<String>,
    initial: Vec<LocId>,
    accepting: Vec<bool>,
    transitions: Vec<Transition>,
    reset_mode: ResetMode,
    acceptance: Acceptance,
    max_constant: u64,
    letter_index: HashMap<String, usize>,
    // (location, letter index) -> transition indices
    outgoing: HashMap<(LocId, usize), Vec<usize>>,
}

impl TimedAutomaton {
    pub fn locations(&self) -> &[String] {
        &self.locations
    }

    pub fn clocks(&self) -> &[String] {
        &self.clocks
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn initial(&self) -> &[LocId] {
        &self.initial
    }

    pub fn is_accepting(&self, l: LocId) -> bool {
        self.accepting[l]
    }

    pub fn accepting(&self) -> impl Iterator<Item = LocId> + '_ {
        (0..self.locations.len()).filter(|&l| self.accepting[l])
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn reset_mode(&self) -> ResetMode {
        self.reset_mode
    }

    pub fn acceptance(&self) -> Acceptance {
        self.acceptance
    }

    pub fn max_constant(&self) -> u64 {
        self.max_constant
    }

    pub fn clock_count(&self) -> usize {
        self.clocks.len()
    }

    pub fn has_letter(&self, letter: &str) -> bool {
        self.letter_index.contains_key(letter)
    }

    pub fn location_id(&self, name: &str) -> Option<LocId> {
        self.locations.iter().position(|l| l == name)
    }

    pub fn clock_id(&self, name: &str) -> Option<ClockId> {
        self.clocks.iter().position(|c| c == name)
    }

    pub fn outgoing(&self, loc: LocId, letter: &str) -> impl Iterator<Item = &Transition> + '_ {
        let ids: &[usize] = match self.letter_index.get(letter) {
            Some(&li) => self.outgoing.get(&(loc, li)).map(Vec::as_slice).unwrap_or(&[]),
            None => &[],
        };
        ids.iter().map(move |&i| &self.transitions[i])
    }

    pub fn with_acceptance(&self, acceptance: Acceptance) -> TimedAutomaton {
        let mut a = self.clone();
        a.acceptance = acceptance;
        a
    }

    pub fn to_builder(&self) -> AutomatonBuilder {
        AutomatonBuilder {
            locations: self.locations.clone(),
            clocks: self.clocks.clone(),
            alphabet: self.alphabet.clone(),
            initial: self.initial.clone(),
            accepting: self.accepting.clone(),
            transitions: self.transitions.clone(),
            reset_mode: self.reset_mode,
            acceptance: self.acceptance,
        }
    }
}

/// Incremental construction of a [`TimedAutomaton`].
#[derive(Debug, Clone)]
pub struct AutomatonBuilder {
    locations: Vec<String>,
    clocks: Vec<String>,
    alphabet: Vec<String>,
    initial: Vec<LocId>,
    accepting: Vec<bool>,
    transitions: Vec<Transition>,
    reset_mode: ResetMode,
    acceptance: Acceptance,
}

impl AutomatonBuilder {
    pub fn new<S: AsRef<str>>(alphabet: &[S], reset_mode: ResetMode, acceptance: Acceptance) -> Self {
        AutomatonBuilder {
            locations: Vec::new(),
            clocks: Vec::new(),
            alphabet: alphabet.iter().map(|s| s.as_ref().to_string()).collect(),
            initial: Vec::new(),
            accepting: Vec::new(),
            transitions: Vec::new(),
            reset_mode,
            acceptance,
        }
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn clock(&mut self, name: &str) -> ClockId {
        if let Some(i) = self.clocks.iter().position(|c| c == name) {
            return i;
        }
        self.clocks.push(name.to_string());
        self.clocks.len() - 1
    }

    pub fn location(&mut self, name: impl Into<String>) -> LocId {
        self.locations.push(name.into());
        self.accepting.push(false);
        self.locations.len() - 1
    }

    pub fn initial_location(&mut self, name: impl Into<String>) -> LocId {
        let l = self.location(name);
        self.initial.push(l);
        l
    }

    pub fn accepting_location(&mut self, name: impl Into<String>) -> LocId {
        let l = self.location(name);
        self.accepting[l] = true;
        l
    }

    pub fn set_initial(&mut self, l: LocId) {
        if !self.initial.contains(&l) {
            self.initial.push(l);
        }
    }

    pub fn set_accepting(&mut self, l: LocId, accepting: bool) {
        self.accepting[l] = accepting;
    }

    pub fn edge(&mut self, source: LocId, letter: &str, guard: Guard, resets: &[ClockId], target: LocId) {
        self.transitions.push(Transition {
            source,
            letter: letter.to_string(),
            guard,
            resets: resets.to_vec(),
            target,
            output: None,
        });
    }

    pub fn edge_with_output(
        &mut self,
        source: LocId,
        letter: &str,
        guard: Guard,
        resets: &[ClockId],
        target: LocId,
        output: &str,
    ) {
        self.edge(source, letter, guard, resets, target);
        self.transitions.last_mut().expect("just pushed").output = Some(output.to_string());
    }

    /// One edge per letter in `letters`, sharing guard and resets.
    pub fn edges<S: AsRef<str>>(&mut self, source: LocId, letters: &[S], guard: &Guard, resets: &[ClockId], target: LocId) {
        for l in letters {
            self.edge(source, l.as_ref(), guard.clone(), resets, target);
        }
    }

    pub fn push_transition(&mut self, t: Transition) {
        self.transitions.push(t);
    }

    pub fn build(self) -> Result<TimedAutomaton, AutomatonError> {
        if self.initial.is_empty() {
            return Err(AutomatonError::NoInitial);
        }
        let mut letter_index = HashMap::new();
        for (i, l) in self.alphabet.iter().enumerate() {
            if letter_index.insert(l.clone(), i).is_some() {
                return Err(AutomatonError::Duplicate(l.clone()));
            }
        }
        let mut outgoing: HashMap<(LocId, usize), Vec<usize>> = HashMap::new();
        let mut max_constant = 0;
        for (i, t) in self.transitions.iter().enumerate() {
            let li = *letter_index
                .get(&t.letter)
                .ok_or_else(|| AutomatonError::UnknownLetter(t.letter.clone()))?;
            for &c in t.resets.iter().chain(t.guard.0.iter().map(|a| &a.clock)) {
                if c >= self.clocks.len() {
                    return Err(AutomatonError::UnknownClock(format!("#{c}")));
                }
            }
            if t.source >= self.locations.len() || t.target >= self.locations.len() {
                return Err(AutomatonError::UnknownLocation(format!("#{}", t.source.max(t.target))));
            }
            max_constant = max_constant.max(t.guard.max_constant());
            outgoing.entry((t.source, li)).or_default().push(i);
        }
        Ok(TimedAutomaton {
            locations: self.locations,
            clocks: self.clocks,
            alphabet: self.alphabet,
            initial: self.initial,
            accepting: self.accepting,
            transitions: self.transitions,
            reset_mode: self.reset_mode,
            acceptance: self.acceptance,
            max_constant,
            letter_index,
            outgoing,
        })
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "true");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|a| format!("#{} {} {}", a.clock, a.rel.symbol(), a.constant))
            .collect();
        write!(f, "{}", parts.join(" && "))
    }
}

impl TimedAutomaton {
    /// Guard rendered with clock names.
    pub fn guard_text(&self, g: &Guard) -> String {
        if g.is_top() {
            return "true".to_string();
        }
        g.0.iter()
            .map(|a| format!("{} {} {}", self.clocks[a.clock], a.rel.symbol(), a.constant))
            .collect::<Vec<_>>()
            .join(" && ")
    }
}
