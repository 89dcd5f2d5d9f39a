use std::collections::{HashMap, VecDeque};

use super::{check_counters, encoding_alphabet, EncodingError, ERR_A, ERR_B, ERR_C, ERR_REG, OK, VERDICTS};
use crate::automata::{
    intersect_with_checker, remap_alphabet, to_buchi, union_all, Acceptance, AutomatonBuilder, Guard, Rel,
    ResetMode, TimedAutomaton,
};
use crate::game::{pair_alphabet, pair_letter, Player, TimedGame};
use crate::lcm::{Instruction, Lcm, Op};

/// Reach machines over the encoding alphabet; membership of a finite word
/// means some run ends in an accepting location after its last letter.
#[derive(Debug, Clone)]
pub struct LocalAutomata {
    pub reg: TimedAutomaton,
    pub reg_hat: TimedAutomaton,
    pub a: TimedAutomaton,
    pub a_hat: TimedAutomaton,
    pub b: TimedAutomaton,
    pub b_hat: TimedAutomaton,
    pub c_gadgets: TimedAutomaton,
}

struct Letters {
    all: Vec<String>,
    counters: Vec<String>,
    instrs: Vec<String>,
}

impl Letters {
    fn new(m: &Lcm) -> Self {
        Letters { all: encoding_alphabet(m), counters: m.counters().to_vec(), instrs: m.instruction_letters() }
    }

    fn instrs_where(&self, m: &Lcm, p: impl Fn(&Instruction) -> bool) -> Vec<String> {
        m.instructions().iter().zip(&self.instrs).filter(|(i, _)| p(i)).map(|(_, l)| l.clone()).collect()
    }

    fn counters_except(&self, c: usize) -> Vec<String> {
        self.counters.iter().enumerate().filter(|(d, _)| *d != c).map(|(_, l)| l.clone()).collect()
    }

    fn all_except(&self, letter: &str) -> Vec<String> {
        self.all.iter().filter(|l| *l != letter).cloned().collect()
    }
}

fn builder(l: &Letters) -> AutomatonBuilder {
    AutomatonBuilder::new(&l.all, ResetMode::Standard, Acceptance::Reach)
}

/// Complement of a complete deterministic reach machine read on finite words.
fn flip(a: &TimedAutomaton) -> Result<TimedAutomaton, EncodingError> {
    let mut b = a.to_builder();
    for l in 0..a.locations().len() {
        b.set_accepting(l, !a.is_accepting(l));
    }
    Ok(b.build()?)
}

fn reg_checker(m: &Lcm, l: &Letters) -> Result<TimedAutomaton, EncodingError> {
    let mut b = builder(l);
    let dead = b.location("dead");
    let mut ids: HashMap<(usize, u8), usize> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut intern = |b: &mut AutomatonBuilder, key: (usize, u8), queue: &mut VecDeque<(usize, u8)>| {
        *ids.entry(key).or_insert_with(|| {
            let id = b.accepting_location(format!("{}/{:04b}", m.locations()[key.0], key.1));
            queue.push_back(key);
            id
        })
    };
    let start = intern(&mut b, (m.initial(), 0), &mut queue);
    b.set_initial(start);
    while let Some(key @ (loc, seen)) = queue.pop_front() {
        let src = intern(&mut b, key, &mut queue);
        for (c, name) in l.counters.iter().enumerate() {
            let tgt = if seen >> (c + 1) != 0 { dead } else { intern(&mut b, (loc, seen | 1 << c), &mut queue) };
            b.edge(src, name, Guard::top(), &[], tgt);
        }
        for (ins, name) in m.instructions().iter().zip(&l.instrs) {
            let ok = ins.source == loc && !(ins.op == Op::Zt && seen & (1 << ins.counter) != 0);
            let tgt = if ok { intern(&mut b, (ins.target, 0), &mut queue) } else { dead };
            b.edge(src, name, Guard::top(), &[], tgt);
        }
    }
    b.edges(dead, &l.all, &Guard::top(), &[], dead);
    Ok(b.build()?)
}

fn a_checker(l: &Letters) -> Result<TimedAutomaton, EncodingError> {
    let mut b = builder(l);
    let x = b.clock("x");
    let q0 = b.initial_location("start");
    b.set_accepting(q0, true);
    let apart = b.accepting_location("apart");
    let same = b.location("same");
    b.edges(q0, &l.all, &Guard::top(), &[x], apart);
    for src in [apart, same] {
        b.edges(src, &l.all, &Guard::atom(x, Rel::Gt, 0), &[x], apart);
        b.edges(src, &l.all, &Guard::atom(x, Rel::Eq, 0), &[x], same);
    }
    Ok(b.build()?)
}

fn b_checker(l: &Letters) -> Result<TimedAutomaton, EncodingError> {
    let mut b = builder(l);
    let x = b.clock("x");
    let q = b.initial_location("aligned");
    b.set_accepting(q, true);
    let bad = b.location("misaligned");
    let inside = Guard::atom(x, Rel::Gt, 0).and(x, Rel::Lt, 1);
    b.edges(q, &l.counters, &inside, &[], q);
    b.edges(q, &l.counters, &Guard::atom(x, Rel::Eq, 0), &[], bad);
    b.edges(q, &l.counters, &Guard::atom(x, Rel::Ge, 1), &[], bad);
    b.edges(q, &l.instrs, &Guard::atom(x, Rel::Eq, 1), &[x], q);
    b.edges(q, &l.instrs, &Guard::atom(x, Rel::Lt, 1), &[], bad);
    b.edges(q, &l.instrs, &Guard::atom(x, Rel::Gt, 1), &[], bad);
    b.edges(bad, &l.all, &Guard::top(), &[], bad);
    Ok(b.build()?)
}

/// Clock-free tracker accepting right after letter `c` when the latest
/// instruction satisfies `pred`.
fn last_instruction_tracker(
    m: &Lcm,
    l: &Letters,
    c: usize,
    pred: impl Fn(&Instruction) -> bool,
) -> Result<TimedAutomaton, EncodingError> {
    let mut b = builder(l);
    let none = b.initial_location("no instruction");
    let yes = b.location("licensed");
    let no = b.location("unlicensed");
    let hit = b.accepting_location("hit");
    for src in [none, yes, no, hit] {
        for (d, name) in l.counters.iter().enumerate() {
            let tgt = match src {
                s if s == none || s == no => src,
                _ if d == c => hit,
                _ => yes,
            };
            b.edge(src, name, Guard::top(), &[], tgt);
        }
        for (ins, name) in m.instructions().iter().zip(&l.instrs) {
            b.edge(src, name, Guard::top(), &[], if pred(ins) { yes } else { no });
        }
    }
    Ok(b.build()?)
}

/// `Σ* c{x} Σ* c[x = 1]`: the last `c` repeats one earlier `c` exactly one unit later.
fn copy_gadget(l: &Letters, c: usize) -> Result<TimedAutomaton, EncodingError> {
    let mut b = builder(l);
    let x = b.clock("x");
    let s0 = b.initial_location("s0");
    let s1 = b.location("s1");
    let s2 = b.accepting_location("s2");
    let name = &l.counters[c];
    b.edges(s0, &l.all, &Guard::top(), &[], s0);
    b.edge(s0, name, Guard::top(), &[x], s1);
    b.edges(s1, &l.all, &Guard::top(), &[], s1);
    b.edge(s1, name, Guard::atom(x, Rel::Eq, 1), &[], s2);
    Ok(b.build()?)
}

/// Fresh token after an increment, less than one unit after the first
/// token of the segment before the increment.
fn fresh_within_gadget(m: &Lcm, l: &Letters, c: usize) -> Result<TimedAutomaton, EncodingError> {
    let mut b = builder(l);
    let x = b.clock("x");
    let s0 = b.initial_location("s0");
    let s1 = b.initial_location("s1");
    let s2 = b.location("s2");
    let s3 = b.location("s3");
    let s4 = b.accepting_location("s4");
    let name = &l.counters[c];
    b.edges(s0, &l.all, &Guard::top(), &[], s0);
    b.edges(s0, &l.all_except(name), &Guard::top(), &[], s1);
    b.edge(s1, name, Guard::top(), &[x], s2);
    b.edges(s2, &l.counters, &Guard::top(), &[], s2);
    b.edges(s2, &l.instrs_where(m, |i| i.op == Op::Inc && i.counter == c), &Guard::top(), &[], s3);
    b.edges(s3, &l.counters_except(c), &Guard::top(), &[], s3);
    b.edge(s3, name, Guard::atom(x, Rel::Lt, 1), &[], s4);
    Ok(b.build()?)
}

/// Fresh token after an increment of a counter whose previous segment was empty.
fn fresh_from_empty_gadget(m: &Lcm, l: &Letters, c: usize) -> Result<TimedAutomaton, EncodingError> {
    let mut b = builder(l);
    let s0 = b.initial_location("s0");
    let s1 = b.initial_location("s1");
    let s2 = b.location("s2");
    let s3 = b.accepting_location("s3");
    let others = l.counters_except(c);
    b.edges(s0, &l.all, &Guard::top(), &[], s0);
    b.edges(s0, &l.instrs, &Guard::top(), &[], s1);
    b.edges(s1, &others, &Guard::top(), &[], s1);
    b.edges(s1, &l.instrs_where(m, |i| i.op == Op::Inc && i.counter == c), &Guard::top(), &[], s2);
    b.edges(s2, &others, &Guard::top(), &[], s2);
    b.edge(s2, &l.counters[c], Guard::top(), &[], s3);
    Ok(b.build()?)
}

/// After a decrement, a token copies a non-first token of the previous segment.
fn survivor_gadget(m: &Lcm, l: &Letters, c: usize) -> Result<TimedAutomaton, EncodingError> {
    let mut b = builder(l);
    let x = b.clock("x");
    let s0 = b.initial_location("s0");
    let s1 = b.location("s1");
    let s2 = b.location("s2");
    let s3 = b.location("s3");
    let s4 = b.accepting_location("s4");
    let name = &l.counters[c];
    b.edges(s0, &l.all, &Guard::top(), &[], s0);
    b.edge(s0, name, Guard::top(), &[], s1);
    b.edge(s1, name, Guard::top(), &[x], s2);
    b.edges(s2, &l.counters, &Guard::top(), &[], s2);
    b.edges(s2, &l.instrs_where(m, |i| i.op == Op::Dec && i.counter == c), &Guard::top(), &[], s3);
    b.edges(s3, &l.counters, &Guard::top(), &[], s3);
    b.edge(s3, name, Guard::atom(x, Rel::Eq, 1), &[], s4);
    Ok(b.build()?)
}

/// Words ending in an instruction that does not decrement an empty segment.
fn instruction_gadget(m: &Lcm, l: &Letters) -> Result<TimedAutomaton, EncodingError> {
    let mut b = builder(l);
    let s0 = b.initial_location("s0");
    let done = b.accepting_location("done");
    b.edges(s0, &l.all, &Guard::top(), &[], s0);
    b.edges(s0, &l.instrs_where(m, |i| i.op != Op::Dec), &Guard::top(), &[], done);
    for (c, name) in l.counters.iter().enumerate() {
        let seen = b.location(format!("seen {name}"));
        b.edge(s0, name, Guard::top(), &[], seen);
        b.edges(seen, &l.counters, &Guard::top(), &[], seen);
        b.edges(seen, &l.instrs_where(m, |i| i.op == Op::Dec && i.counter == c), &Guard::top(), &[], done);
    }
    Ok(b.build()?)
}

fn c_gadgets(m: &Lcm, l: &Letters) -> Result<TimedAutomaton, EncodingError> {
    let mut parts = vec![instruction_gadget(m, l)?];
    for c in 0..l.counters.len() {
        let untouched = last_instruction_tracker(m, l, c, |i| i.op == Op::Zt || i.counter != c)?;
        parts.push(intersect_with_checker(&copy_gadget(l, c)?, &untouched)?);
        let incremented = last_instruction_tracker(m, l, c, |i| i.op == Op::Inc && i.counter == c)?;
        parts.push(intersect_with_checker(&copy_gadget(l, c)?, &incremented)?);
        parts.push(fresh_within_gadget(m, l, c)?);
        parts.push(fresh_from_empty_gadget(m, l, c)?);
        parts.push(survivor_gadget(m, l, c)?);
    }
    Ok(union_all(&parts.iter().collect::<Vec<_>>())?)
}

pub fn build_local_automata(m: &Lcm) -> Result<LocalAutomata, EncodingError> {
    check_counters(m)?;
    let l = Letters::new(m);
    let reg = reg_checker(m, &l)?;
    let a = a_checker(&l)?;
    let b = b_checker(&l)?;
    Ok(LocalAutomata {
        reg_hat: flip(&reg)?,
        a_hat: flip(&a)?,
        b_hat: flip(&b)?,
        reg,
        a,
        b,
        c_gadgets: c_gadgets(m, &l)?,
    })
}

/// Accepts exactly the Monitor projections `✓* v`.
fn claim_checker(pairs: &[String], t_letters: &[String], verdict: &str) -> Result<TimedAutomaton, EncodingError> {
    let mut b = AutomatonBuilder::new(pairs, ResetMode::Standard, Acceptance::Reach);
    let quiet = b.initial_location("quiet");
    let claimed = b.accepting_location("claimed");
    for t in t_letters {
        b.edge(quiet, &pair_letter(t, OK), Guard::top(), &[], quiet);
        b.edge(quiet, &pair_letter(t, verdict), Guard::top(), &[], claimed);
    }
    Ok(b.build()?)
}

/// Infinitely many instructions into `s` while Monitor only answers `✓`.
fn recurrence_clause(m: &Lcm, pairs: &[String], s: usize) -> Result<TimedAutomaton, EncodingError> {
    let mut b = AutomatonBuilder::new(pairs, ResetMode::Standard, Acceptance::Buchi);
    let q = b.initial_location("elsewhere");
    let f = b.accepting_location(format!("at {}", m.locations()[s]));
    for src in [q, f] {
        for c in m.counters() {
            b.edge(src, &pair_letter(c, OK), Guard::top(), &[], q);
        }
        for (i, ins) in m.instructions().iter().enumerate() {
            b.edge(src, &pair_letter(&m.letter(i), OK), Guard::top(), &[], if ins.target == s { f } else { q });
        }
    }
    Ok(b.build()?)
}

/// Finite plays on which Monitor's first objection names a local check
/// that actually holds (for `✗C`: C holds or another check fails).
pub fn build_v(m: &Lcm) -> Result<TimedAutomaton, EncodingError> {
    let local = build_local_automata(m)?;
    let t_letters = encoding_alphabet(m);
    let pairs = pair_alphabet(&t_letters, &VERDICTS);
    let mapping: HashMap<String, String> = t_letters
        .iter()
        .flat_map(|t| VERDICTS.iter().map(move |v| (pair_letter(t, v), t.clone())))
        .collect();
    let wrong_claim = |lang: &TimedAutomaton, verdict: &str| -> Result<TimedAutomaton, EncodingError> {
        let lifted = remap_alphabet(lang, &pairs, &mapping)?;
        Ok(intersect_with_checker(&lifted, &claim_checker(&pairs, &t_letters, verdict)?)?)
    };
    let c_or_other_error = union_all(&[&local.c_gadgets, &local.reg_hat, &local.a_hat, &local.b_hat])?;
    let parts = [
        wrong_claim(&local.reg, ERR_REG)?,
        wrong_claim(&local.a, ERR_A)?,
        wrong_claim(&local.b, ERR_B)?,
        wrong_claim(&c_or_other_error, ERR_C)?,
    ];
    Ok(union_all(&parts.iter().collect::<Vec<_>>())?)
}

/// Timer's Büchi winning condition: a prefix in [`build_v`], or Monitor
/// never objects and `s` recurs.
pub fn build_w(m: &Lcm, s: usize) -> Result<TimedAutomaton, EncodingError> {
    let pairs = pair_alphabet(&encoding_alphabet(m), &VERDICTS);
    let v = to_buchi(&build_v(m)?)?;
    Ok(union_all(&[&v, &recurrence_clause(m, &pairs, s)?])?)
}

/// The Büchi game on `m` in which Timer owns `build_w(m, s)`.
pub fn recurrence_game(m: &Lcm, s: usize) -> Result<TimedGame, EncodingError> {
    let verdicts = VERDICTS.iter().map(|v| v.to_string()).collect();
    Ok(TimedGame::new(encoding_alphabet(m), verdicts, build_w(m, s)?, Player::Timer, Player::Timer)?)
}
