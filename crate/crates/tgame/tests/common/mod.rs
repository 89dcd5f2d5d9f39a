//! Generators and cross-checks shared by the integration test targets.
#![allow(dead_code)]

pub mod games;
pub mod oracles;

use rand::seq::SliceRandom;
use rand::Rng;
use tgame::automata::{ends_accepting, Acceptance, AutomatonBuilder, Guard, Rel, ResetMode};
use tgame::bounded_reduction::{honest_word_with_order, rule_oracles, RuleAutomata, POOL};
use tgame::buchi_reduction::{local_status, LocalAutomata};
use tgame::exact_time::{frac, Frac, Rat};
use tgame::game::{MonitorController, TimerController, TimerMove};
use tgame::lcm::{fixtures, parse_lcm, Lcm, RunPrefix};

pub const COUNTERS: [&str; 4] = ["c1", "c2", "c3", "c4"];
const OPS: [&str; 3] = ["inc", "dec", "zt"];

/// Small machine with 2 to 5 locations over the four counters, every
/// location having one or two instructions.
pub fn random_lcm(rng: &mut impl Rng) -> Lcm {
    let n = rng.gen_range(2..=5);
    let used = rng.gen_range(1..=4);
    let mut src = format!("counters {}\ninit s0\n", COUNTERS.join(" "));
    for s in 0..n {
        for _ in 0..rng.gen_range(1..=2) {
            let op = if rng.gen_bool(0.5) { "inc" } else { OPS[rng.gen_range(0..3)] };
            src.push_str(&format!("s{s}: {op} {} -> s{}\n", COUNTERS[rng.gen_range(0..used)], rng.gen_range(0..n)));
        }
    }
    parse_lcm(&src).expect("generated machine parses")
}

/// Free-test run choosing uniformly among enabled instructions.
pub fn random_free_test_run(m: &Lcm, len: usize, rng: &mut impl Rng) -> RunPrefix {
    let mut run = RunPrefix::new(m.initial_config());
    for _ in 0..len {
        let cur = run.last().clone();
        let options: Vec<_> =
            m.from_location(cur.loc).filter_map(|(i, _)| m.step_free_test(&cur, i).ok().map(|c| (i, c))).collect();
        let Some(step) = options.choose(rng) else { break };
        run.steps.push(step.clone());
    }
    run
}

pub fn machines_for_words() -> Vec<Lcm> {
    ["m1", "double", "refill", "pair", "relay"].iter().map(|n| fixtures::load(n).unwrap()).collect()
}

fn fresh_time(rng: &mut impl Rng, floor: &Rat) -> Rat {
    let den = rng.gen_range(1..=8u64);
    let num = rng.gen_range(0..=den);
    &Rat::int(floor.floor_u64()) + &Rat::new(num, den)
}

/// Words over counters and instructions that mostly follow the machine and
/// the unit grid, with enough noise to break each local check.
pub fn random_encoding_word(m: &Lcm, len: usize, rng: &mut impl Rng) -> Vec<(String, Rat)> {
    let mut w: Vec<(String, Rat)> = Vec::new();
    let mut now = Rat::zero();
    let mut last_instr = Rat::zero();
    let mut loc = m.initial();
    for _ in 0..len {
        let (letter, mut t) = if rng.gen_bool(0.35) {
            let own: Vec<usize> = m.from_location(loc).map(|(i, _)| i).collect();
            let i = if !own.is_empty() && rng.gen_bool(0.9) {
                *own.choose(rng).unwrap()
            } else {
                rng.gen_range(0..m.instructions().len())
            };
            loc = m.instructions()[i].target;
            let t = if rng.gen_bool(0.85) { &last_instr + &Rat::one() } else { fresh_time(rng, &now) };
            (m.letter(i), t)
        } else {
            let c = rng.gen_range(0..m.counters().len());
            let name = m.counters()[c].clone();
            let copies: Vec<Rat> =
                w.iter().filter(|(l, _)| *l == name).map(|(_, u)| u + &Rat::one()).filter(|u| *u >= now).collect();
            let t = match copies.choose(rng) {
                Some(u) if rng.gen_bool(0.6) => u.clone(),
                _ => fresh_time(rng, &now),
            };
            (name, t)
        };
        if t < now {
            t = now.clone();
        }
        if m.instruction_by_letter(&letter).is_some() {
            last_instr = t.clone();
        }
        now = t.clone();
        w.push((letter, t));
    }
    w
}

/// Describes the first disagreement between the local automata and the
/// oracles on `w`, if any.
pub fn local_disagreement(m: &Lcm, la: &LocalAutomata, w: &[(String, Rat)]) -> Option<String> {
    let s = local_status(m, w).unwrap();
    let acc = |a| ends_accepting(a, w).unwrap();
    let checks = [
        ("reg", acc(&la.reg), s.reg),
        ("reg hat", acc(&la.reg_hat), !s.reg),
        ("a", acc(&la.a), s.a),
        ("a hat", acc(&la.a_hat), !s.a),
        ("b", acc(&la.b), s.b),
        ("b hat", acc(&la.b_hat), !s.b),
    ];
    for (name, got, want) in checks {
        if got != want {
            return Some(format!("{name}: automaton {got}, oracle {want} on {w:?}"));
        }
    }
    match s.c {
        Some(c) if acc(&la.c_gadgets) != c => Some(format!("c: oracle {c} on {w:?}")),
        _ => None,
    }
}

/// Random rational in `[0, hi)` with denominator at most 8.
fn small_time(rng: &mut impl Rng, hi: u64) -> Rat {
    let den = rng.gen_range(1..=8u64);
    Rat::new(rng.gen_range(0..hi * den), den)
}

/// Up to three pool letters, then instructions that mostly chain from the
/// initial location; at most `len` letters on a sorted grid of eighths.
pub fn random_pool_word(m: &Lcm, len: usize, rng: &mut impl Rng) -> Vec<(String, Rat)> {
    let n = rng.gen_range(1..=len);
    let pools = rng.gen_range(0..=3.min(n));
    let mut times: Vec<Rat> = (0..n).map(|_| small_time(rng, 4)).collect();
    times.sort();
    let mut loc = m.initial();
    let letters = (0..n).map(|i| {
        if i < pools || rng.gen_bool(0.1) {
            return POOL.to_string();
        }
        let here: Vec<usize> = m.from_location(loc).map(|(j, _)| j).collect();
        let j = match here.choose(rng) {
            Some(&j) if rng.gen_bool(0.85) => j,
            _ => rng.gen_range(0..m.instructions().len()),
        };
        loc = m.instructions()[j].target;
        m.letter(j)
    });
    letters.zip(times).collect()
}

pub fn rule_disagreement(m: &Lcm, ra: &RuleAutomata, w: &[(String, Rat)]) -> Option<String> {
    let s = rule_oracles(m, w).unwrap();
    let acc = |a| ends_accepting(a, w).unwrap();
    [("reg", &ra.reg, s.reg), ("err1", &ra.err1, s.err1), ("ok1", &ra.ok1, s.ok1), ("err2", &ra.err2, s.err2), ("ok2", &ra.ok2, s.ok2)]
        .into_iter()
        .find(|(_, a, want)| acc(a) != *want)
        .map(|(name, _, want)| format!("{name}: oracle {want} on {w:?}"))
}

/// Honest encoding of a random free-test run with a random pool at least as
/// large as the run's largest value and a random allocation order.
pub fn random_honest_word(m: &Lcm, len: usize, rng: &mut impl Rng) -> Vec<(String, Rat)> {
    let run = random_free_test_run(m, len, rng);
    let size = run.max_value() as usize + rng.gen_range(1..=2);
    let mut fracs: Vec<Frac> = Vec::new();
    while fracs.len() < size {
        let f = frac(&Rat::new(rng.gen_range(1..24), 24));
        if !fracs.contains(&f) {
            fracs.push(f);
        }
    }
    let mut order = fracs.clone();
    order.shuffle(rng);
    fracs.sort();
    let pool: Vec<Rat> = fracs.iter().map(|f| f.value().clone()).collect();
    honest_word_with_order(m, &run, &pool, &order).unwrap()
}

/// Moves one random instruction to a random fractional part (pooled or a
/// twelfth), keeping its integer part.
pub fn perturb(m: &Lcm, w: &mut [(String, Rat)], rng: &mut impl Rng) {
    let instrs: Vec<usize> = (0..w.len()).filter(|&i| m.instruction_by_letter(&w[i].0).is_some()).collect();
    let Some(&i) = instrs.choose(rng) else { return };
    let pooled: Vec<Rat> = w.iter().filter(|(l, _)| l == POOL).map(|(_, t)| frac(t).into_rat()).collect();
    let f = match pooled.choose(rng) {
        Some(f) if rng.gen_bool(0.7) => f.clone(),
        _ => Rat::new(rng.gen_range(0..12), 12),
    };
    w[i].1 = &Rat::int(w[i].1.floor_u64()) + &f;
}

/// Deterministic Monitor controller with 1 to `max_clocks` clocks and up to
/// three states: each (state, letter) splits one clock three ways around a
/// threshold in `0..=2`, with random resets, targets and outputs.
pub fn random_monitor_controller(
    timer_alphabet: &[&str],
    outputs: &[&str],
    max_clocks: usize,
    rng: &mut impl Rng,
) -> MonitorController {
    let mut b = AutomatonBuilder::new(timer_alphabet, ResetMode::Standard, Acceptance::Reach);
    let clocks: Vec<_> = (0..rng.gen_range(1..=max_clocks)).map(|i| b.clock(&format!("x{i}"))).collect();
    let n = rng.gen_range(1..=3);
    for i in 0..n {
        b.location(format!("m{i}"));
    }
    b.set_initial(0);
    for s in 0..n {
        for t in timer_alphabet {
            let x = clocks[rng.gen_range(0..clocks.len())];
            let c = rng.gen_range(0..=2);
            for rel in [Rel::Lt, Rel::Eq, Rel::Gt] {
                let resets: Vec<_> = clocks.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
                b.edge_with_output(s, t, Guard::atom(x, rel, c), &resets, rng.gen_range(0..n), outputs[rng.gen_range(0..outputs.len())]);
            }
        }
    }
    MonitorController::new(b.build().expect("generated monitor builds")).expect("every edge has an output")
}

/// Timer controller with up to three states whose delays lie on a grid of
/// denominator at most `max_den`, never exceeding 2.
pub fn random_timer_controller(letters: &[&str], monitor_alphabet: &[&str], max_den: u64, rng: &mut impl Rng) -> TimerController {
    let den = rng.gen_range(1..=max_den);
    let mv = |rng: &mut dyn rand::RngCore| {
        TimerMove::new(letters[rng.gen_range(0..letters.len())], Rat::new(rng.gen_range(0..=2 * den), den))
    };
    let init = mv(rng);
    let n = rng.gen_range(1..=3usize);
    let mut edges = Vec::new();
    for s in 0..n {
        for m in monitor_alphabet {
            let to = rng.gen_range(0..n);
            edges.push((s, m.to_string(), to, mv(rng)));
        }
    }
    TimerController::new((0..n).map(|i| format!("t{i}")).collect(), 0, init, edges).expect("generated timer is total")
}
