//! Random one-clock automata and explicit-run oracles for the subset and
//! breakpoint checks.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use rand::Rng;
use tgame::automata::{
    successors, Acceptance, AutomatonBuilder, Config, ConfigSet, Guard, LassoWord, Rel, ResetMode, TimedAutomaton,
};
use tgame::exact_time::{ClampedValue, Rat};

pub const LETTERS: [&str; 2] = ["a", "b"];
const RELS: [Rel; 5] = [Rel::Lt, Rel::Le, Rel::Eq, Rel::Ge, Rel::Gt];

/// One clock, at most four locations, constants at most 2 (at most 1 when
/// one-resetting).
pub fn random_automaton(rng: &mut impl Rng, mode: ResetMode, acc: Acceptance) -> TimedAutomaton {
    let mut b = AutomatonBuilder::new(&LETTERS, mode, acc);
    let x = b.clock("x");
    let n = rng.gen_range(1..=4);
    for i in 0..n {
        let l = b.location(format!("q{i}"));
        if rng.gen_bool(0.35) {
            b.set_accepting(l, true);
        }
    }
    b.set_initial(0);
    if n > 1 && rng.gen_bool(0.3) {
        b.set_initial(1);
    }
    let edges = rng.gen_range(n..=3 * n + 1);
    for _ in 0..edges {
        let s = rng.gen_range(0..n);
        let t = rng.gen_range(0..n);
        let letter = LETTERS[rng.gen_range(0..2)];
        let guard = if rng.gen_bool(0.3) {
            Guard::top()
        } else {
            let c = if mode == ResetMode::OneResetting { rng.gen_range(0..=1) } else { rng.gen_range(0..=2) };
            Guard::atom(x, RELS[rng.gen_range(0..5)], c)
        };
        let resets = if rng.gen_bool(0.4) { vec![x] } else { vec![] };
        b.edge(s, letter, guard, &resets, t);
    }
    b.build().unwrap()
}

pub fn random_delay(rng: &mut impl Rng) -> Rat {
    ["0", "1/2", "1", "3/2", "2", "1/3", "5/2"][rng.gen_range(0..7)].parse().unwrap()
}

pub fn random_delay_word(rng: &mut impl Rng, len: usize) -> Vec<(String, Rat)> {
    (0..len).map(|_| (LETTERS[rng.gen_range(0..2)].to_string(), random_delay(rng))).collect()
}

/// Explicit run enumeration with exact, unclamped values: the set of end
/// configurations and whether some run visited an accepting location.
pub fn brute_runs(a: &TimedAutomaton, word: &[(String, Rat)]) -> (BTreeSet<(usize, Rat)>, bool) {
    let mut frontier: Vec<(usize, Rat)> = a.initial().iter().map(|&l| (l, Rat::zero())).collect();
    // a run that visits an accepting location wins even if it dies later
    let mut won = frontier.iter().any(|(l, _)| a.is_accepting(*l));
    for (letter, d) in word {
        let mut next = Vec::new();
        for (l, v) in &frontier {
            let mut moved = v + d;
            if a.reset_mode() == ResetMode::OneResetting {
                moved = moved.frac().into_rat();
            }
            for t in a.transitions().iter().filter(|t| t.source == *l && &t.letter == letter) {
                if t.guard.holds_exact(std::slice::from_ref(&moved)) {
                    let v2 = if t.resets.is_empty() { moved.clone() } else { Rat::zero() };
                    next.push((t.target, v2));
                }
            }
        }
        frontier = next;
        won |= frontier.iter().any(|(l, _)| a.is_accepting(*l));
    }
    (frontier.into_iter().collect(), won)
}

pub fn as_timestamps(delays: &[(String, Rat)]) -> Vec<(String, Rat)> {
    let mut t = Rat::zero();
    delays
        .iter()
        .map(|(l, d)| {
            t = &t + d;
            (l.clone(), t.clone())
        })
        .collect()
}

/// Explicit (configuration, word position) graph with an accepting-cycle search.
pub fn brute_buchi(a: &TimedAutomaton, w: &LassoWord) -> bool {
    let p = w.prefix.len();
    let total = p + w.looped.len();
    let next_pos = |i: usize| if i + 1 < total { i + 1 } else { p };
    let start: Vec<(Config, usize)> =
        a.initial().iter().map(|&loc| (Config { loc, vals: vec![ClampedValue::zero()] }, 0)).collect();
    let succ = |node: &(Config, usize)| -> Vec<(Config, usize)> {
        let (l, d) = w.at(node.1);
        let single: ConfigSet = [node.0.clone()].into();
        successors(a, &single, l, d).into_iter().map(|c| (c, next_pos(node.1))).collect()
    };
    let mut seen: HashSet<(Config, usize)> = start.iter().cloned().collect();
    let mut queue: VecDeque<(Config, usize)> = start.into_iter().collect();
    let mut edges: HashMap<(Config, usize), Vec<(Config, usize)>> = HashMap::new();
    while let Some(n) = queue.pop_front() {
        let out = succ(&n);
        for m in &out {
            if seen.insert(m.clone()) {
                queue.push_back(m.clone());
            }
        }
        edges.insert(n, out);
    }
    seen.iter().filter(|(c, pos)| a.is_accepting(c.loc) && *pos >= p).any(|target| {
        let mut visited = HashSet::new();
        let mut stack: Vec<&(Config, usize)> = edges[target].iter().collect();
        while let Some(n) = stack.pop() {
            if n == target {
                return true;
            }
            if visited.insert(n) {
                stack.extend(edges[n].iter());
            }
        }
        false
    })
}
