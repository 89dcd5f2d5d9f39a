//! Three small games in which the agent has a winning strategy but no
//! finite-memory controller, with the strategies and with falsifiers that
//! beat any supplied controller.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;

use crate::automata::{union, Acceptance, AutomatonBuilder, Guard, Rel, ResetMode, Simulator, TimedAutomaton};
use crate::exact_time::Rat;
use crate::game::{
    adjudicate, pair_alphabet, pair_letter, run_lasso, run_play, GameError, MonitorController, MonitorRunner,
    MonitorStrategy, Play, Player, Round, TimedGame, TimerController, TimerMove, TimerStrategy, Verdict,
    DEFAULT_JOINT_BUDGET,
};

/// Timer's only letter in all three games.
pub const TICK: &str = "τ";
/// Monitor's only letter in the Zeno game.
pub const PASS: &str = "·";
pub const A: &str = "a";
pub const B: &str = "b";
pub const OK: &str = "✓";
pub const ERR: &str = "✗";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WitnessKind {
    /// Timer wins by a letter repeated exactly one time unit apart; Monitor
    /// must remember every timestamp to avoid it.
    DistanceOne,
    /// Monitor wins once time exceeds 1 or a timestamp repeats.
    Zeno,
    /// Timer wins with a strictly increasing word below 1, and Monitor
    /// punishes a repeated timestamp.
    StrictZeno,
}

impl WitnessKind {
    pub const ALL: [WitnessKind; 3] = [WitnessKind::DistanceOne, WitnessKind::Zeno, WitnessKind::StrictZeno];

    pub fn owner(self) -> Player {
        match self {
            WitnessKind::DistanceOne | WitnessKind::StrictZeno => Player::Timer,
            WitnessKind::Zeno => Player::Monitor,
        }
    }

    pub fn agent(self) -> Player {
        match self {
            WitnessKind::DistanceOne => Player::Monitor,
            WitnessKind::Zeno | WitnessKind::StrictZeno => Player::Timer,
        }
    }

    pub fn monitor_alphabet(self) -> Vec<String> {
        let m: &[&str] = match self {
            WitnessKind::DistanceOne => &[A, B],
            WitnessKind::Zeno => &[PASS],
            WitnessKind::StrictZeno => &[OK, ERR],
        };
        m.iter().map(|s| s.to_string()).collect()
    }
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WitnessKind::DistanceOne => "distance-one",
            WitnessKind::Zeno => "zeno",
            WitnessKind::StrictZeno => "strict-zeno",
        })
    }
}

impl FromStr for WitnessKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        WitnessKind::ALL
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| format!("unknown witness kind {s:?}; expected distance-one, zeno or strict-zeno"))
    }
}

/// Plays `a` unless the timestamp one unit earlier occurred, in which case
/// it plays the opposite of what it answered there.
#[derive(Debug, Clone, Copy, Default)]
pub struct DistanceOneMonitor;

fn opposite(l: &str) -> &'static str {
    if l == A {
        B
    } else {
        A
    }
}

impl MonitorStrategy for DistanceOneMonitor {
    fn answer(&mut self, h: &[(String, Rat)]) -> Result<String, GameError> {
        let mut answers: Vec<&str> = Vec::with_capacity(h.len());
        for (j, (_, t)) in h.iter().enumerate() {
            let earlier = (0..j).find(|&i| &(&h[i].1 + &Rat::one()) == t);
            answers.push(earlier.map_or(A, |i| opposite(answers[i])));
        }
        Ok(answers.last().expect("monitor answers after a timer move").to_string())
    }
}

/// Timestamps `1 − 2^{-i}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZenoTimer;

impl TimerStrategy for ZenoTimer {
    fn next_move(&mut self, h: &[String]) -> TimerMove {
        let delay = (0..=h.len()).fold(Rat::one(), |d, _| d.div_int(2));
        TimerMove::new(TICK, delay)
    }
}

#[derive(Debug, Clone)]
pub enum CatalogueStrategy {
    Monitor(DistanceOneMonitor),
    Timer(ZenoTimer),
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub kind: WitnessKind,
    pub game: TimedGame,
    pub strategy: CatalogueStrategy,
}

fn pairs(kind: WitnessKind) -> Vec<String> {
    pair_alphabet(&[TICK], &kind.monitor_alphabet())
}

/// Some letter of `M` at `t` and again at `t + 1`.
fn distance_one_condition() -> Result<TimedAutomaton, GameError> {
    let all = pairs(WitnessKind::DistanceOne);
    let mut b = AutomatonBuilder::new(&all, ResetMode::Standard, Acceptance::Reach);
    let x = b.clock("x");
    let q = b.initial_location("wait");
    let hit = b.accepting_location("hit");
    b.edges(q, &all, &Guard::top(), &[], q);
    b.edges(hit, &all, &Guard::top(), &[], hit);
    for m in [A, B] {
        let l = pair_letter(TICK, m);
        let seen = b.location(format!("saw {m}"));
        b.edge(q, &l, Guard::top(), &[x], seen);
        b.edges(seen, &all, &Guard::atom(x, Rel::Le, 1), &[], seen);
        b.edge(seen, &l, Guard::atom(x, Rel::Eq, 1), &[], hit);
    }
    Ok(b.build()?)
}

/// Time exceeds 1, or two consecutive timestamps coincide.
fn zeno_condition() -> Result<TimedAutomaton, GameError> {
    let all = pairs(WitnessKind::Zeno);
    let mut b = AutomatonBuilder::new(&all, ResetMode::Standard, Acceptance::Reach);
    let x = b.clock("x");
    let q = b.initial_location("running");
    let marked = b.location("marked");
    let hit = b.accepting_location("hit");
    b.edges(q, &all, &Guard::atom(x, Rel::Le, 1), &[], q);
    b.edges(q, &all, &Guard::atom(x, Rel::Gt, 1), &[], hit);
    b.edges(q, &all, &Guard::top(), &[x], marked);
    b.edges(marked, &all, &Guard::atom(x, Rel::Eq, 0), &[], hit);
    b.edges(hit, &all, &Guard::top(), &[], hit);
    Ok(b.build()?)
}

/// Only `✓` and every timestamp below 1, or a first `✗` strictly later
/// than the timestamp before it.
fn strict_zeno_condition() -> Result<TimedAutomaton, GameError> {
    let all = pairs(WitnessKind::StrictZeno);
    let ok = pair_letter(TICK, OK);
    let err = pair_letter(TICK, ERR);
    let mut b = AutomatonBuilder::new(&all, ResetMode::Standard, Acceptance::Buchi);
    let x = b.clock("x");
    let below = b.initial_location("below one");
    b.set_accepting(below, true);
    b.edge(below, &ok, Guard::atom(x, Rel::Lt, 1), &[], below);
    let bounded = b.build()?;

    // time 0 counts as an earlier timestamp, so a first ✗ at a positive time wins
    let mut b = AutomatonBuilder::new(&all, ResetMode::Standard, Acceptance::Buchi);
    let x = b.clock("x");
    let passing = b.initial_location("passing");
    let won = b.accepting_location("won");
    b.edge(passing, &ok, Guard::top(), &[x], passing);
    b.edge(passing, &err, Guard::atom(x, Rel::Gt, 0), &[], won);
    b.edges(won, &all, &Guard::top(), &[], won);
    Ok(union(&bounded, &b.build()?)?)
}

/// Reach machine for prefixes after which the agent can no longer win:
/// the condition itself for the first two games; for the strict Zeno game,
/// time reaching 1 under `✓` only, or a first `✗` at the same timestamp
/// as the round before it (time 0 before round 1).
pub fn opponent_condition(kind: WitnessKind) -> Result<TimedAutomaton, GameError> {
    match kind {
        WitnessKind::DistanceOne => distance_one_condition(),
        WitnessKind::Zeno => zeno_condition(),
        WitnessKind::StrictZeno => {
            let all = pairs(kind);
            let ok = pair_letter(TICK, OK);
            let err = pair_letter(TICK, ERR);
            let mut b = AutomatonBuilder::new(&all, ResetMode::Standard, Acceptance::Reach);
            let x = b.clock("x");
            let q = b.initial_location("start");
            let passing = b.location("passing");
            let clock = b.location("clock");
            let hit = b.accepting_location("secured");
            b.edges(hit, &all, &Guard::top(), &[], hit);
            // exceeding 1, tracked on the never-reset clock of this branch
            b.edge(q, &ok, Guard::atom(x, Rel::Lt, 1), &[], clock);
            b.edge(clock, &ok, Guard::atom(x, Rel::Lt, 1), &[], clock);
            b.edge(q, &ok, Guard::atom(x, Rel::Ge, 1), &[], hit);
            b.edge(clock, &ok, Guard::atom(x, Rel::Ge, 1), &[], hit);
            // a first ✗ on a repeated timestamp
            b.edge(q, &err, Guard::atom(x, Rel::Eq, 0), &[], hit);
            b.edge(q, &ok, Guard::top(), &[x], passing);
            b.edge(passing, &ok, Guard::top(), &[x], passing);
            b.edge(passing, &err, Guard::atom(x, Rel::Eq, 0), &[], hit);
            Ok(b.build()?)
        }
    }
}

pub fn build_witness(kind: WitnessKind) -> Result<Witness, GameError> {
    let (condition, strategy) = match kind {
        WitnessKind::DistanceOne => (distance_one_condition()?, CatalogueStrategy::Monitor(DistanceOneMonitor)),
        WitnessKind::Zeno => (zeno_condition()?, CatalogueStrategy::Timer(ZenoTimer)),
        WitnessKind::StrictZeno => (strict_zeno_condition()?, CatalogueStrategy::Timer(ZenoTimer)),
    };
    let game = TimedGame::new(vec![TICK.into()], kind.monitor_alphabet(), condition, kind.owner(), kind.agent())?;
    Ok(Witness { kind, game, strategy })
}

/// Whether some prefix of `p` is in [`opponent_condition`].
pub fn opponent_secured(kind: WitnessKind, p: &Play) -> Result<bool, GameError> {
    let a = opponent_condition(kind)?;
    let mut sim = Simulator::new(&a);
    for (l, t) in p.word() {
        sim.step_at(&l, &t)?;
        if sim.won() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Timer for the distance-one game: four fresh fractions, then each
/// earlier timestamp again one unit later, in order.
pub fn revisiting_timer() -> impl FnMut(&[String]) -> TimerMove + Clone {
    let mut times: Vec<Rat> = Vec::new();
    move |_: &[String]| {
        let n = times.len();
        let next = if n < 4 { Rat::new(n as u64 + 1, 5) } else { &times[n - 4] + &Rat::one() };
        let delay = next.checked_sub(times.last().unwrap_or(&Rat::zero())).expect("timestamps increase");
        times.push(next);
        TimerMove::new(TICK, delay)
    }
}

/// The catalogue strategy against a fixed opponent for `rounds` rounds:
/// [`revisiting_timer`], the silent Monitor, or [`repeat_punisher`].
pub fn survival_run(kind: WitnessKind, rounds: usize) -> Result<Play, GameError> {
    let w = build_witness(kind)?;
    match (kind, w.strategy) {
        (WitnessKind::DistanceOne, CatalogueStrategy::Monitor(mut m)) => run_play(&w.game, &mut revisiting_timer(), &mut m, rounds),
        (WitnessKind::Zeno, CatalogueStrategy::Timer(mut t)) => {
            run_play(&w.game, &mut t, &mut MonitorController::constant(PASS, &[TICK]).runner(), rounds)
        }
        (_, CatalogueStrategy::Timer(mut t)) => run_play(&w.game, &mut t, &mut repeat_punisher().runner(), rounds),
        (_, CatalogueStrategy::Monitor(_)) => unreachable!("only the distance-one agent is Monitor"),
    }
}

/// A controller for the agent of some witness game.
#[derive(Debug, Clone)]
pub enum AgentController {
    Monitor(MonitorController),
    Timer(TimerController),
}

/// Monitor controller answering `✗` exactly to a repeated timestamp.
pub fn repeat_punisher() -> MonitorController {
    let mut b = AutomatonBuilder::new(&[TICK], ResetMode::Standard, Acceptance::Reach);
    let x = b.clock("x");
    let first = b.initial_location("first");
    let rest = b.location("rest");
    b.edge_with_output(first, TICK, Guard::top(), &[x], rest, OK);
    b.edge_with_output(rest, TICK, Guard::atom(x, Rel::Gt, 0), &[x], rest, OK);
    b.edge_with_output(rest, TICK, Guard::atom(x, Rel::Eq, 0), &[x], rest, ERR);
    MonitorController::new(b.build().expect("punisher is well formed")).expect("punisher has outputs")
}

/// Finds a play that `ctrl` loses. Zeno: the play's shortest prefix that
/// exceeds 1 or repeats. Strict Zeno: the lasso against
/// [`repeat_punisher`]. Distance one: fresh fractions in `(0, 1)`, one
/// more than the controller has clocks, then a search over timestamps
/// exactly one unit after earlier ones.
pub fn falsify_witness_controller(kind: WitnessKind, ctrl: &AgentController) -> Result<Option<Play>, GameError> {
    let w = build_witness(kind)?;
    let g = &w.game;
    match (kind, ctrl) {
        (WitnessKind::Zeno, AgentController::Timer(tc)) => {
            let horizon = match tc.delays().into_iter().find(|d| !d.is_zero()) {
                Some(tau) => (Rat::one().as_big() / tau.as_big()).ceil().to_integer().to_usize().unwrap_or(usize::MAX - 2) + 2,
                None => 3,
            };
            let silent = MonitorController::constant(PASS, &[TICK]);
            let play = run_play(g, &mut tc.runner(), &mut silent.runner(), horizon)?;
            for n in 1..=play.rounds.len() {
                let prefix = play.unroll(n);
                if adjudicate(g, &prefix, DEFAULT_JOINT_BUDGET)? == Verdict::OwnerWins {
                    return Ok(Some(prefix));
                }
            }
            Ok(None)
        }
        (WitnessKind::StrictZeno, AgentController::Timer(tc)) => {
            let lasso = run_lasso(g, tc, &repeat_punisher(), DEFAULT_JOINT_BUDGET)?;
            Ok((adjudicate(g, &lasso, DEFAULT_JOINT_BUDGET)? == Verdict::OpponentWins).then_some(lasso))
        }
        (WitnessKind::DistanceOne, AgentController::Monitor(mc)) => Ok(distance_one_attack(mc)),
        _ => Err(GameError::Setup(format!("the {kind} game needs a {} controller", kind.agent()))),
    }
}

struct Attack<'a> {
    times: Vec<Rat>,
    answers: Vec<String>,
    runner: MonitorRunner<'a>,
    nodes: usize,
}

const ATTACK_NODES: usize = 20_000;

impl Attack<'_> {
    fn history(&self) -> Vec<(String, Rat)> {
        self.times.iter().map(|t| (TICK.to_string(), t.clone())).collect()
    }

    fn play(&self) -> Play {
        let rounds = self
            .times
            .iter()
            .zip(&self.answers)
            .map(|(t, a)| Round { timer: TICK.into(), monitor: a.clone(), time: t.clone() })
            .collect();
        Play { rounds, loop_start: None }
    }

    /// Plays `t`; true when the answer repeats the one given at `t − 1`.
    fn push(&mut self, t: Rat) -> Option<bool> {
        self.nodes += 1;
        self.times.push(t.clone());
        let a = self.runner.answer(&self.history()).ok()?;
        let hit = self.times.iter().zip(&self.answers).any(|(s, b)| &(s + &Rat::one()) == &t && *b == a);
        self.answers.push(a);
        Some(hit)
    }

    fn search(&mut self, depth: usize) -> Option<Play> {
        if depth == 0 || self.nodes >= ATTACK_NODES {
            return None;
        }
        let now = self.times.last().cloned().unwrap_or_else(Rat::zero);
        let targets: BTreeSet<Rat> =
            self.times.iter().map(|t| t + &Rat::one()).filter(|t| *t >= now).collect();
        for t in targets {
            let saved = (self.times.len(), self.runner.clone());
            match self.push(t) {
                Some(true) => return Some(self.play()),
                Some(false) => {
                    if let Some(p) = self.search(depth - 1) {
                        return Some(p);
                    }
                }
                None => {}
            }
            self.times.truncate(saved.0);
            self.answers.truncate(saved.0);
            self.runner = saved.1;
        }
        None
    }
}

fn distance_one_attack(mc: &MonitorController) -> Option<Play> {
    let n = mc.machine().clock_count();
    for fresh in n + 1..=n + 3 {
        let mut attack = Attack { times: vec![], answers: vec![], runner: mc.runner(), nodes: 0 };
        for i in 1..=fresh {
            attack.push(Rat::new(i as u64, fresh as u64 + 1))?;
        }
        if let Some(p) = attack.search(2 * fresh) {
            return Some(p);
        }
    }
    None
}
