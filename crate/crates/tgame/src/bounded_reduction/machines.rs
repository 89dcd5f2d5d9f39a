use std::collections::HashMap;

use super::{timer_alphabet, BoundedError, ANSWERS, ERR, OK, POOL};
use crate::automata::{
    intersect_with_checker, remap_alphabet, union_all, Acceptance, AutomatonBuilder, ClockId, Guard, LocId, Rel,
    ResetMode, TimedAutomaton,
};
use crate::game::{pair_alphabet, pair_letter, Player, TimedGame};
use crate::lcm::{Lcm, Op};

/// Reach machines over the Timer alphabet, one clock, one-resetting.
#[derive(Debug, Clone)]
pub struct RuleAutomata {
    pub reg: TimedAutomaton,
    pub err1: TimedAutomaton,
    pub ok1: TimedAutomaton,
    pub err2: TimedAutomaton,
    pub ok2: TimedAutomaton,
}

struct Letters<'a> {
    m: &'a Lcm,
    all: Vec<String>,
}

impl<'a> Letters<'a> {
    fn new(m: &'a Lcm) -> Self {
        Letters { m, all: timer_alphabet(m) }
    }

    fn instrs(&self, p: impl Fn(Op, usize) -> bool) -> Vec<String> {
        let ins = self.m.instructions();
        (0..ins.len()).filter(|&i| p(ins[i].op, ins[i].counter)).map(|i| self.m.letter(i)).collect()
    }

    fn on(&self, c: usize, op: Op) -> Vec<String> {
        self.instrs(|o, d| o == op && d == c)
    }

    /// Pool letter plus instructions not touching `c`.
    fn off(&self, c: usize) -> Vec<String> {
        std::iter::once(POOL.to_string()).chain(self.instrs(|_, d| d != c)).collect()
    }
}

fn builder(l: &Letters) -> AutomatonBuilder {
    AutomatonBuilder::new(&l.all, ResetMode::OneResetting, Acceptance::Reach)
}

fn zero(x: ClockId) -> Guard {
    Guard::atom(x, Rel::Eq, 0)
}

fn positive(x: ClockId) -> Guard {
    Guard::atom(x, Rel::Gt, 0)
}

/// Guesses an increment of `c` and accepts on a later `last` of `c` at the
/// same fractional part with no operation of `c` there in between.
fn still_active(l: &Letters, c: usize, last: Op) -> Result<TimedAutomaton, BoundedError> {
    let mut b = builder(l);
    let x = b.clock("x");
    let wait = b.initial_location("wait");
    let armed = b.location("active");
    let hit = b.accepting_location("hit");
    b.edges(wait, &l.all, &Guard::top(), &[], wait);
    b.edges(wait, &l.on(c, Op::Inc), &Guard::top(), &[x], armed);
    b.edges(armed, &l.off(c), &Guard::top(), &[], armed);
    for op in [Op::Inc, Op::Dec] {
        b.edges(armed, &l.on(c, op), &positive(x), &[], armed);
    }
    b.edges(armed, &l.on(c, last), &zero(x), &[], hit);
    Ok(b.build()?)
}

/// Guesses a pool letter and tracks whether its fractional part is active
/// for `c`; accepts on a `last` of `c` there while inactive.
fn pooled_inactive(l: &Letters, c: usize, last: Op) -> Result<TimedAutomaton, BoundedError> {
    let mut b = builder(l);
    let x = b.clock("x");
    let wait = b.initial_location("wait");
    let idle = b.location("inactive");
    let busy = b.location("active");
    let hit = b.accepting_location("hit");
    let (inc, dec, zt) = (l.on(c, Op::Inc), l.on(c, Op::Dec), l.on(c, Op::Zt));
    b.edges(wait, &l.all, &Guard::top(), &[], wait);
    b.edge(wait, POOL, Guard::top(), &[x], idle);
    for q in [idle, busy] {
        b.edges(q, &l.off(c), &Guard::top(), &[], q);
        b.edges(q, &inc, &positive(x), &[], q);
        b.edges(q, &dec, &positive(x), &[], q);
        b.edges(q, &zt, &Guard::top(), &[], idle);
    }
    b.edges(idle, &dec, &zero(x), &[], idle);
    b.edges(idle, &inc, &zero(x), &[], busy);
    b.edges(busy, &inc, &zero(x), &[], busy);
    b.edges(busy, &dec, &zero(x), &[], idle);
    b.edges(idle, &l.on(c, last), &zero(x), &[], hit);
    Ok(b.build()?)
}

/// Words whose last letter is in `last`.
fn ends_with(l: &Letters, last: &[String]) -> Result<TimedAutomaton, BoundedError> {
    let mut b = builder(l);
    let q = b.initial_location("read");
    let hit = b.accepting_location("hit");
    b.edges(q, &l.all, &Guard::top(), &[], q);
    b.edges(q, last, &Guard::top(), &[], hit);
    Ok(b.build()?)
}

fn reg_checker(l: &Letters) -> Result<TimedAutomaton, BoundedError> {
    let m = l.m;
    let mut b = builder(l);
    let pool = b.initial_location("pool");
    b.set_accepting(pool, true);
    let locs: Vec<LocId> = m.locations().iter().map(|s| b.accepting_location(s.clone())).collect();
    let dead = b.location("dead");
    b.edge(pool, POOL, Guard::top(), &[], pool);
    for &q in &locs {
        b.edge(q, POOL, Guard::top(), &[], dead);
    }
    for (i, ins) in m.instructions().iter().enumerate() {
        let letter = m.letter(i);
        for (src, from) in std::iter::once((pool, m.initial())).chain(locs.iter().copied().zip(0..)) {
            let tgt = if ins.source == from { locs[ins.target] } else { dead };
            b.edge(src, &letter, Guard::top(), &[], tgt);
        }
    }
    b.edges(dead, &l.all, &Guard::top(), &[], dead);
    Ok(b.build()?)
}

fn per_counter(
    m: &Lcm,
    extra: Option<TimedAutomaton>,
    part: impl Fn(usize) -> Result<TimedAutomaton, BoundedError>,
) -> Result<TimedAutomaton, BoundedError> {
    let mut parts = (0..m.counters().len()).map(part).collect::<Result<Vec<_>, _>>()?;
    parts.extend(extra);
    Ok(union_all(&parts.iter().collect::<Vec<_>>())?)
}

pub fn build_rule_automata(m: &Lcm) -> Result<RuleAutomata, BoundedError> {
    let l = Letters::new(m);
    let not = |op: Op| -> Vec<String> {
        std::iter::once(POOL.to_string()).chain(l.instrs(|o, _| o != op)).collect()
    };
    Ok(RuleAutomata {
        reg: reg_checker(&l)?,
        err1: per_counter(m, None, |c| still_active(&l, c, Op::Inc))?,
        ok1: per_counter(m, Some(ends_with(&l, &not(Op::Inc))?), |c| pooled_inactive(&l, c, Op::Inc))?,
        err2: per_counter(m, None, |c| pooled_inactive(&l, c, Op::Dec))?,
        ok2: per_counter(m, Some(ends_with(&l, &not(Op::Dec))?), |c| still_active(&l, c, Op::Dec))?,
    })
}

/// Clock-free checker over pairs: only `✓` so far, accepting after the
/// final letter when it carries `last`.
fn answers_checker(pairs: &[String], t_letters: &[String], last: &str) -> Result<TimedAutomaton, BoundedError> {
    let mut b = AutomatonBuilder::new(pairs, ResetMode::OneResetting, Acceptance::Reach);
    let quiet = b.initial_location("quiet");
    let hit = b.accepting_location(format!("after {last}"));
    for t in t_letters {
        b.edge(quiet, &pair_letter(t, last), Guard::top(), &[], hit);
        if last == OK {
            b.edge(hit, &pair_letter(t, OK), Guard::top(), &[], hit);
        } else {
            b.edge(quiet, &pair_letter(t, OK), Guard::top(), &[], quiet);
        }
    }
    Ok(b.build()?)
}

/// Timer wins once Monitor objects to a correct letter or passes a wrong
/// one, every earlier answer having been `✓`.
pub fn build_win(m: &Lcm) -> Result<TimedAutomaton, BoundedError> {
    let l = Letters::new(m);
    let rules = build_rule_automata(m)?;
    let must_pass = per_counter(m, Some(ends_with(&l, &[&[POOL.to_string()][..], &l.instrs(|o, _| o == Op::Zt)].concat())?), |c| {
        let inc = pooled_inactive(&l, c, Op::Inc)?;
        let dec = still_active(&l, c, Op::Dec)?;
        Ok(union_all(&[&inc, &dec])?)
    })?;
    let must_pass = intersect_with_checker(&must_pass, &rules.reg)?;
    let must_object = intersect_with_checker(&union_all(&[&rules.err1, &rules.err2])?, &rules.reg)?;

    let pairs = pair_alphabet(&l.all, &ANSWERS);
    let mapping: HashMap<String, String> =
        l.all.iter().flat_map(|t| ANSWERS.iter().map(move |a| (pair_letter(t, a), t.clone()))).collect();
    let objected = intersect_with_checker(
        &remap_alphabet(&must_pass, &pairs, &mapping)?,
        &answers_checker(&pairs, &l.all, ERR)?,
    )?;
    let passed = intersect_with_checker(
        &remap_alphabet(&must_object, &pairs, &mapping)?,
        &answers_checker(&pairs, &l.all, OK)?,
    )?;
    Ok(union_all(&[&objected, &passed])?)
}

/// The reachability game in which Timer owns [`build_win`] and Monitor
/// looks for a controller.
pub fn bounded_game(m: &Lcm) -> Result<TimedGame, BoundedError> {
    let answers = ANSWERS.iter().map(|a| a.to_string()).collect();
    Ok(TimedGame::new(timer_alphabet(m), answers, build_win(m)?, Player::Timer, Player::Monitor)?)
}
