use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{GameError, MonitorStrategy, TimerStrategy};
use crate::automata::{
    enabled, initial_configs, Acceptance, AutomatonBuilder, AutomatonDoc, Config, Guard, ResetMode,
    TimedAutomaton,
};
use crate::exact_time::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TimerMove {
    pub letter: String,
    pub delay: Rat,
}

impl TimerMove {
    pub fn new(letter: impl Into<String>, delay: Rat) -> Self {
        TimerMove { letter: letter.into(), delay }
    }
}

/// Finite-state Timer: an initial move, then a Mealy machine reading
/// Monitor letters and emitting moves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TimerControllerDoc", into = "TimerControllerDoc")]
pub struct TimerController {
    states: Vec<String>,
    initial: usize,
    initial_move: TimerMove,
    inputs: Vec<String>,
    delta: HashMap<(usize, String), (usize, TimerMove)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct TimerControllerDoc {
    pub states: Vec<String>,
    pub initial: String,
    pub initial_move: TimerMove,
    pub transitions: Vec<TimerEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimerEdge {
    pub from: String,
    pub input: String,
    pub to: String,
    pub letter: String,
    pub delay: Rat,
}

impl TimerController {
    /// `edges` are `(from, Monitor letter, to, move)`; the function must be
    /// total over the Monitor letters it mentions.
    pub fn new(
        states: Vec<String>,
        initial: usize,
        initial_move: TimerMove,
        edges: Vec<(usize, String, usize, TimerMove)>,
    ) -> Result<Self, GameError> {
        let n = states.len();
        if initial >= n {
            return Err(GameError::Setup("initial state out of range".into()));
        }
        let inputs: BTreeSet<String> = edges.iter().map(|e| e.1.clone()).collect();
        let mut delta = HashMap::new();
        for (from, input, to, mv) in edges {
            if from >= n || to >= n {
                return Err(GameError::Setup("timer edge state out of range".into()));
            }
            if delta.insert((from, input.clone()), (to, mv)).is_some() {
                return Err(GameError::Setup(format!("timer state {} reads {input:?} twice", states[from])));
            }
        }
        for s in 0..n {
            for m in &inputs {
                if !delta.contains_key(&(s, m.clone())) {
                    return Err(GameError::Setup(format!("timer state {} lacks input {m:?}", states[s])));
                }
            }
        }
        Ok(TimerController { states, initial, initial_move, inputs: inputs.into_iter().collect(), delta })
    }

    /// One state repeating `mv` whatever Monitor answers.
    pub fn constant<S: AsRef<str>>(mv: TimerMove, monitor_alphabet: &[S]) -> Self {
        let edges = monitor_alphabet.iter().map(|m| (0, m.as_ref().to_string(), 0, mv.clone())).collect();
        TimerController::new(vec!["q0".into()], 0, mv, edges).expect("constant controller is total")
    }

    /// Cycles through `moves` regardless of Monitor's answers.
    pub fn cycle<S: AsRef<str>>(moves: &[TimerMove], monitor_alphabet: &[S]) -> Self {
        let n = moves.len();
        let edges = (0..n)
            .flat_map(|i| {
                monitor_alphabet
                    .iter()
                    .map(move |m| (i, m.as_ref().to_string(), (i + 1) % n, moves[(i + 1) % n].clone()))
            })
            .collect();
        let states = (0..n).map(|i| format!("q{i}")).collect();
        TimerController::new(states, 0, moves[0].clone(), edges).expect("cycle controller is total")
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn initial_state(&self) -> usize {
        self.initial
    }

    pub fn initial_move(&self) -> &TimerMove {
        &self.initial_move
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn step(&self, state: usize, monitor_letter: &str) -> Option<(usize, &TimerMove)> {
        self.delta.get(&(state, monitor_letter.to_string())).map(|(s, mv)| (*s, mv))
    }

    pub fn delays(&self) -> BTreeSet<Rat> {
        std::iter::once(&self.initial_move)
            .chain(self.delta.values().map(|(_, mv)| mv))
            .map(|mv| mv.delay.clone())
            .collect()
    }

    /// State and pending move after reading `history`.
    pub fn replay(&self, history: &[String]) -> Option<(usize, TimerMove)> {
        let mut state = self.initial;
        let mut mv = self.initial_move.clone();
        for m in history {
            let (s, next) = self.step(state, m)?;
            state = s;
            mv = next.clone();
        }
        Some((state, mv))
    }

    pub fn runner(&self) -> TimerRunner<'_> {
        TimerRunner { ctl: self, seen: 0, state: self.initial, pending: self.initial_move.clone() }
    }
}

impl TryFrom<TimerControllerDoc> for TimerController {
    type Error = GameError;

    fn try_from(d: TimerControllerDoc) -> Result<Self, GameError> {
        let idx: HashMap<&str, usize> = d.states.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let find = |s: &str| idx.get(s).copied().ok_or_else(|| GameError::Setup(format!("unknown timer state {s:?}")));
        let initial = find(&d.initial)?;
        let edges = d
            .transitions
            .iter()
            .map(|e| Ok((find(&e.from)?, e.input.clone(), find(&e.to)?, TimerMove::new(e.letter.clone(), e.delay.clone()))))
            .collect::<Result<_, GameError>>()?;
        TimerController::new(d.states.clone(), initial, d.initial_move, edges)
    }
}

impl From<TimerController> for TimerControllerDoc {
    fn from(c: TimerController) -> Self {
        let mut transitions: Vec<TimerEdge> = c
            .delta
            .iter()
            .map(|((from, input), (to, mv))| TimerEdge {
                from: c.states[*from].clone(),
                input: input.clone(),
                to: c.states[*to].clone(),
                letter: mv.letter.clone(),
                delay: mv.delay.clone(),
            })
            .collect();
        let order: HashMap<&String, usize> = c.states.iter().enumerate().map(|(i, s)| (s, i)).collect();
        transitions.sort_by(|a, b| (order[&a.from], &a.input).cmp(&(order[&b.from], &b.input)));
        TimerControllerDoc {
            initial: c.states[c.initial].clone(),
            states: c.states,
            initial_move: c.initial_move,
            transitions,
        }
    }
}

/// A [`TimerController`] driven as a strategy.
#[derive(Debug, Clone)]
pub struct TimerRunner<'a> {
    ctl: &'a TimerController,
    seen: usize,
    state: usize,
    pending: TimerMove,
}

impl TimerStrategy for TimerRunner<'_> {
    fn next_move(&mut self, history: &[String]) -> TimerMove {
        if history.len() == self.seen + 1 {
            let (s, mv) = self
                .ctl
                .step(self.state, &history[self.seen])
                .unwrap_or_else(|| panic!("timer controller has no move on {:?}", history[self.seen]));
            self.state = s;
            self.pending = mv.clone();
            self.seen += 1;
        } else if history.len() != self.seen {
            let (s, mv) = self.ctl.replay(history).expect("timer controller is total on its inputs");
            self.state = s;
            self.pending = mv;
            self.seen = history.len();
        }
        self.pending.clone()
    }
}

/// Deterministic timed machine over Timer letters whose transitions carry
/// Monitor outputs. Any number of clocks; determinism is checked as it runs.
#[derive(Debug, Clone)]
pub struct MonitorController {
    machine: TimedAutomaton,
}

impl MonitorController {
    pub fn new(machine: TimedAutomaton) -> Result<Self, GameError> {
        if machine.initial().len() != 1 {
            return Err(GameError::Setup("monitor controller needs exactly one initial state".into()));
        }
        if let Some(t) = machine.transitions().iter().find(|t| t.output.is_none()) {
            return Err(GameError::Setup(format!("monitor transition on {:?} lacks an output", t.letter)));
        }
        Ok(MonitorController { machine })
    }

    /// One clock-free state answering `out` to everything.
    pub fn constant<S: AsRef<str>>(out: &str, timer_alphabet: &[S]) -> Self {
        let mut b = AutomatonBuilder::new(timer_alphabet, ResetMode::Standard, Acceptance::Reach);
        let q = b.initial_location("q0");
        for t in timer_alphabet {
            b.edge_with_output(q, t.as_ref(), Guard::top(), &[], q, out);
        }
        MonitorController::new(b.build().expect("constant monitor is well formed")).expect("has outputs")
    }

    pub fn machine(&self) -> &TimedAutomaton {
        &self.machine
    }

    pub fn initial_config(&self) -> Config {
        initial_configs(&self.machine).into_iter().next().expect("one initial state")
    }

    /// One step; `Err(n)` when `n ≠ 1` transitions are enabled.
    pub fn step(&self, c: &Config, letter: &str, delay: &Rat) -> Result<(Config, String), usize> {
        let mut it = enabled(&self.machine, c, letter, delay);
        match (it.next(), it.next()) {
            (Some((t, c2)), None) => Ok((c2, t.output.clone().expect("validated outputs"))),
            (None, _) => Err(0),
            (Some(_), Some(_)) => Err(2 + it.count()),
        }
    }

    pub fn runner(&self) -> MonitorRunner<'_> {
        MonitorRunner { ctl: self, config: self.initial_config(), last: Rat::zero(), seen: 0 }
    }

    pub fn to_doc(&self) -> AutomatonDoc {
        AutomatonDoc::from(&self.machine)
    }

    pub fn from_doc(d: &AutomatonDoc) -> Result<Self, GameError> {
        MonitorController::new(TimedAutomaton::try_from(d)?)
    }
}

/// A [`MonitorController`] driven as a strategy over incrementally growing histories.
#[derive(Debug, Clone)]
pub struct MonitorRunner<'a> {
    ctl: &'a MonitorController,
    config: Config,
    last: Rat,
    seen: usize,
}

impl MonitorRunner<'_> {
    pub fn config(&self) -> &Config {
        &self.config
    }
}

impl MonitorStrategy for MonitorRunner<'_> {
    fn answer(&mut self, history: &[(String, Rat)]) -> Result<String, GameError> {
        if history.len() != self.seen + 1 {
            *self = self.ctl.runner();
            for i in 0..history.len().saturating_sub(1) {
                self.answer(&history[..=i])?;
            }
        }
        let (letter, time) = history.last().expect("monitor answers after a timer move");
        let delay = time.checked_sub(&self.last).map_err(|_| GameError::Setup("timestamps decrease".into()))?;
        let round = history.len();
        let (c, out) = self
            .ctl
            .step(&self.config, letter, &delay)
            .map_err(|enabled| GameError::Determinism { round, enabled })?;
        self.config = c;
        self.last = time.clone();
        self.seen = history.len();
        Ok(out)
    }
}
