use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{Acceptance, AutomatonError, LocId, ResetMode, TimedAutomaton, Transition};
use crate::exact_time::{ClampedValue, Rat};
use crate::graph;

/// Budget on the total number of configurations stored while deciding a lasso.
pub const DEFAULT_STATE_BUDGET: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Config {
    pub loc: LocId,
    /// In one-resetting mode every entry is an exact value in `[0, 1)`.
    pub vals: Vec<ClampedValue>,
}

pub type ConfigSet = BTreeSet<Config>;

/// Finite word of `(letter, absolute timestamp)` pairs.
pub type TimedWord = Vec<(String, Rat)>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LassoWord {
    /// `(letter, delay)` pairs read once.
    pub prefix: Vec<(String, Rat)>,
    /// `(letter, delay)` pairs repeated forever.
    #[serde(rename = "loop")]
    pub looped: Vec<(String, Rat)>,
}

impl LassoWord {
    pub fn new(prefix: Vec<(String, Rat)>, looped: Vec<(String, Rat)>) -> Self {
        LassoWord { prefix, looped }
    }

    /// `(letter, delay)` at position `i` of the infinite word.
    pub fn at(&self, i: usize) -> &(String, Rat) {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.looped[(i - self.prefix.len()) % self.looped.len()]
        }
    }

    /// First `n` letters with absolute timestamps.
    pub fn unroll(&self, n: usize) -> TimedWord {
        let mut t = Rat::zero();
        (0..n)
            .map(|i| {
                let (l, d) = self.at(i);
                t = &t + d;
                (l.clone(), t.clone())
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReachStatus {
    Won,
    Open,
}

pub(crate) fn initial_configs(a: &TimedAutomaton) -> ConfigSet {
    let vals = vec![ClampedValue::zero(); a.clock_count()];
    a.initial()
        .iter()
        .map(|&loc| Config { loc, vals: vals.clone() })
        .collect()
}

fn elapse(a: &TimedAutomaton, vals: &[ClampedValue], delay: &Rat) -> Vec<ClampedValue> {
    match a.reset_mode() {
        ResetMode::Standard => vals.iter().map(|v| v.elapse(delay, a.max_constant())).collect(),
        ResetMode::OneResetting => vals
            .iter()
            .map(|v| match v {
                ClampedValue::Exact(x) => ClampedValue::Exact((x + delay).frac().into_rat()),
                ClampedValue::Top => unreachable!("one-resetting values are fractional"),
            })
            .collect(),
    }
}

/// Transitions enabled from `c` on `(letter, delay)` with their target configurations.
pub(crate) fn enabled<'a>(
    a: &'a TimedAutomaton,
    c: &Config,
    letter: &'a str,
    delay: &Rat,
) -> impl Iterator<Item = (&'a Transition, Config)> + 'a {
    let moved = elapse(a, &c.vals, delay);
    a.outgoing(c.loc, letter).filter_map(move |t| {
        if !t.guard.holds(&moved) {
            return None;
        }
        let mut vals = moved.clone();
        for &x in &t.resets {
            vals[x] = ClampedValue::zero();
        }
        Some((t, Config { loc: t.target, vals }))
    })
}

pub(crate) fn step_config<'a>(
    a: &'a TimedAutomaton,
    c: &Config,
    letter: &'a str,
    delay: &Rat,
) -> impl Iterator<Item = Config> + 'a {
    enabled(a, c, letter, delay).map(|(_, c)| c)
}

pub fn successors(a: &TimedAutomaton, s: &ConfigSet, letter: &str, delay: &Rat) -> ConfigSet {
    s.iter().flat_map(|c| step_config(a, c, letter, delay)).collect()
}

/// Online subset simulation over absolute timestamps.
#[derive(Debug, Clone)]
pub struct Simulator<'a> {
    a: &'a TimedAutomaton,
    current: ConfigSet,
    last: Rat,
    steps: usize,
    won: bool,
}

impl<'a> Simulator<'a> {
    pub fn new(a: &'a TimedAutomaton) -> Self {
        let current = initial_configs(a);
        let won = current.iter().any(|c| a.is_accepting(c.loc));
        Simulator { a, current, last: Rat::zero(), steps: 0, won }
    }

    pub fn step_delay(&mut self, letter: &str, delay: &Rat) {
        self.current = successors(self.a, &self.current, letter, delay);
        self.last = &self.last + delay;
        self.steps += 1;
        self.won |= self.current.iter().any(|c| self.a.is_accepting(c.loc));
    }

    pub fn step_at(&mut self, letter: &str, t: &Rat) -> Result<(), AutomatonError> {
        let delay = t
            .checked_sub(&self.last)
            .map_err(|_| AutomatonError::NonMonotone(self.steps))?;
        self.step_delay(letter, &delay);
        Ok(())
    }

    pub fn configs(&self) -> &ConfigSet {
        &self.current
    }

    /// Some run of the prefix read so far visited an accepting location.
    pub fn won(&self) -> bool {
        self.won
    }

    /// Some run of the prefix read so far ends in an accepting location.
    pub fn ends_accepting(&self) -> bool {
        self.current.iter().any(|c| self.a.is_accepting(c.loc))
    }

    pub fn is_dead(&self) -> bool {
        self.current.is_empty()
    }

    pub fn now(&self) -> &Rat {
        &self.last
    }
}

fn run_word<'a>(a: &'a TimedAutomaton, w: &[(String, Rat)]) -> Result<Simulator<'a>, AutomatonError> {
    let mut sim = Simulator::new(a);
    for (l, t) in w {
        sim.step_at(l, t)?;
    }
    Ok(sim)
}

/// Finite-word acceptance: some run of `w` ends in an accepting location.
pub fn ends_accepting(a: &TimedAutomaton, w: &[(String, Rat)]) -> Result<bool, AutomatonError> {
    Ok(run_word(a, w)?.ends_accepting())
}

pub fn accepts_reach_prefix(a: &TimedAutomaton, w: &[(String, Rat)]) -> Result<ReachStatus, AutomatonError> {
    if a.acceptance() != Acceptance::Reach {
        return Err(AutomatonError::WrongAcceptance { expected: "reach" });
    }
    Ok(if run_word(a, w)?.won() { ReachStatus::Won } else { ReachStatus::Open })
}

/// Reachability acceptance of an infinite lasso word.
pub fn accepts_reach_lasso(a: &TimedAutomaton, w: &LassoWord, budget: usize) -> Result<bool, AutomatonError> {
    let b = super::to_buchi(a)?;
    accepts_buchi_lasso(&b, w, budget)
}

/// Büchi acceptance of `prefix · loop^ω`.
///
/// Subset states are iterated at loop boundaries until one repeats; the
/// configurations of the repeating segment then form a finite graph whose
/// cycles are exactly the infinite runs, and the word is accepted iff some
/// cycle passes through an accepting location.
pub fn accepts_buchi_lasso(a: &TimedAutomaton, w: &LassoWord, budget: usize) -> Result<bool, AutomatonError> {
    if a.acceptance() != Acceptance::Buchi {
        return Err(AutomatonError::WrongAcceptance { expected: "buchi" });
    }
    if w.looped.is_empty() {
        return Err(AutomatonError::EmptyLoop);
    }
    let mut s = initial_configs(a);
    for (l, d) in &w.prefix {
        s = successors(a, &s, l, d);
    }

    let mut seen: HashMap<ConfigSet, usize> = HashMap::new();
    // history[i][p]: configurations before loop position p of iteration i
    let mut history: Vec<Vec<ConfigSet>> = Vec::new();
    let mut stored = 0usize;
    let start = loop {
        if let Some(&j) = seen.get(&s) {
            break j;
        }
        seen.insert(s.clone(), history.len());
        let mut sets = Vec::with_capacity(w.looped.len());
        for (l, d) in &w.looped {
            let next = successors(a, &s, l, d);
            stored += s.len();
            sets.push(std::mem::replace(&mut s, next));
        }
        if stored > budget {
            return Err(AutomatonError::BudgetExhausted(budget));
        }
        history.push(sets);
    };

    let steps: Vec<&ConfigSet> = history[start..].iter().flatten().collect();
    let n = steps.len();
    let mut ids: Vec<HashMap<&Config, usize>> = Vec::with_capacity(n);
    let mut nodes: Vec<(usize, &Config)> = Vec::new();
    for (g, set) in steps.iter().enumerate() {
        let mut m = HashMap::new();
        for c in set.iter() {
            m.insert(c, nodes.len());
            nodes.push((g, c));
        }
        ids.push(m);
    }
    let lp = w.looped.len();
    let adj: Vec<Vec<usize>> = nodes
        .iter()
        .map(|&(g, c)| {
            let (l, d) = &w.looped[g % lp];
            let next = &ids[(g + 1) % n];
            step_config(a, c, l, d)
                .map(|c2| *next.get(&c2).expect("successor lies in the next subset state"))
                .collect()
        })
        .collect();
    let cyc = graph::on_cycle(&adj);
    Ok(nodes
        .iter()
        .enumerate()
        .any(|(i, &(_, c))| cyc[i] && a.is_accepting(c.loc)))
}
