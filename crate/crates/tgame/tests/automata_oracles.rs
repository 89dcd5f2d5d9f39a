//! Cross-checks of subset simulation and lasso acceptance against explicit
//! run enumeration on small random machines.

mod common;

use std::collections::HashMap;

use common::oracles::{as_timestamps, brute_buchi, brute_runs, random_automaton, random_delay, LETTERS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tgame::automata::{
    accepts_buchi_lasso, accepts_reach_prefix, intersect_with_checker, remap_alphabet, successors, union,
    Acceptance, AutomatonBuilder, Config, ConfigSet, Guard, LassoWord, ReachStatus, Rel, ResetMode,
    TimedAutomaton, DEFAULT_STATE_BUDGET,
};
use tgame::exact_time::{clamp, r, ClampedValue, Rat};

#[test]
fn subset_simulation_matches_run_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for round in 0..400 {
        let mode = if round % 2 == 0 { ResetMode::Standard } else { ResetMode::OneResetting };
        let a = random_automaton(&mut rng, mode, Acceptance::Reach);
        let len = rng.gen_range(0..=6);
        let word: Vec<(String, Rat)> =
            (0..len).map(|_| (LETTERS[rng.gen_range(0..2)].to_string(), random_delay(&mut rng))).collect();

        let mut s: ConfigSet = a
            .initial()
            .iter()
            .map(|&loc| Config { loc, vals: vec![ClampedValue::zero()] })
            .collect();
        for (l, d) in &word {
            s = successors(&a, &s, l, d);
        }
        let (ends, won) = brute_runs(&a, &word);
        let expected: ConfigSet = ends
            .iter()
            .map(|(loc, v)| {
                let val = match mode {
                    ResetMode::Standard => clamp(v, a.max_constant()),
                    ResetMode::OneResetting => ClampedValue::Exact(v.clone()),
                };
                Config { loc: *loc, vals: vec![val] }
            })
            .collect();
        assert_eq!(s, expected, "round {round}");

        let verdict = accepts_reach_prefix(&a, &as_timestamps(&word)).unwrap();
        assert_eq!(verdict == ReachStatus::Won, won, "round {round}");
    }
}

#[test]
fn lasso_acceptance_matches_product_graph() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut accepted = 0;
    for round in 0..400 {
        let mode = if round % 3 == 0 { ResetMode::OneResetting } else { ResetMode::Standard };
        let a = random_automaton(&mut rng, mode, Acceptance::Buchi);
        let pair = |rng: &mut ChaCha8Rng| (LETTERS[rng.gen_range(0..2)].to_string(), random_delay(rng));
        let prefix = (0..rng.gen_range(0..=3)).map(|_| pair(&mut rng)).collect();
        let looped = (0..rng.gen_range(1..=3)).map(|_| pair(&mut rng)).collect();
        let w = LassoWord::new(prefix, looped);
        let got = accepts_buchi_lasso(&a, &w, DEFAULT_STATE_BUDGET).unwrap();
        assert_eq!(got, brute_buchi(&a, &w), "round {round}: {w:?}");
        accepted += got as usize;
    }
    // both verdicts must be exercised
    assert!(accepted > 20 && accepted < 380, "accepted {accepted}");
}

#[test]
fn single_equality_hit_then_free_loop_is_accepted() {
    let mut b = AutomatonBuilder::new(&["a"], ResetMode::Standard, Acceptance::Buchi);
    let x = b.clock("x");
    let l0 = b.initial_location("l0");
    let l1 = b.accepting_location("l1");
    b.edge(l0, "a", Guard::top(), &[], l0);
    b.edge(l0, "a", Guard::atom(x, Rel::Eq, 1), &[], l1);
    b.edge(l1, "a", Guard::top(), &[], l1);
    let a = b.build().unwrap();
    // x hits 1 exactly once, after which l1 loops: accepted
    let w = LassoWord::new(vec![], vec![("a".into(), r("1/2"))]);
    assert_eq!(accepts_buchi_lasso(&a, &w, DEFAULT_STATE_BUDGET).unwrap(), brute_buchi(&a, &w));
    assert!(accepts_buchi_lasso(&a, &w, DEFAULT_STATE_BUDGET).unwrap());
}

fn random_word(rng: &mut ChaCha8Rng, letters: &[&str]) -> Vec<(String, Rat)> {
    let len = rng.gen_range(0..=6);
    let delays: Vec<(String, Rat)> = (0..len)
        .map(|_| (letters[rng.gen_range(0..letters.len())].to_string(), random_delay(rng)))
        .collect();
    as_timestamps(&delays)
}

fn won(a: &TimedAutomaton, w: &[(String, Rat)]) -> bool {
    accepts_reach_prefix(a, w).unwrap() == ReachStatus::Won
}

#[test]
fn union_with_itself_is_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let a = random_automaton(&mut rng, ResetMode::Standard, Acceptance::Reach);
        let u = union(&a, &a).unwrap();
        for _ in 0..20 {
            let w = random_word(&mut rng, &LETTERS);
            assert_eq!(won(&a, &w), won(&u, &w));
        }
    }
}

#[test]
fn all_accepting_checker_is_identity() {
    let mut c = AutomatonBuilder::new(&LETTERS, ResetMode::Standard, Acceptance::Reach);
    let q = c.initial_location("q");
    c.set_accepting(q, true);
    c.edges(q, &LETTERS, &Guard::top(), &[], q);
    let checker = c.build().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let a = random_automaton(&mut rng, ResetMode::Standard, Acceptance::Reach);
        let p = intersect_with_checker(&a, &checker).unwrap();
        for _ in 0..20 {
            let w = random_word(&mut rng, &LETTERS);
            assert_eq!(won(&a, &w), won(&p, &w));
        }
    }
}

#[test]
fn remap_to_pairs_is_projection_invariant() {
    let pairs = ["a|✓", "a|✗", "b|✓", "b|✗"];
    let map: HashMap<String, String> =
        pairs.iter().map(|p| (p.to_string(), p.split('|').next().unwrap().to_string())).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let a = random_automaton(&mut rng, ResetMode::OneResetting, Acceptance::Reach);
        let m = remap_alphabet(&a, &pairs, &map).unwrap();
        for _ in 0..20 {
            let w = random_word(&mut rng, &pairs);
            let projected: Vec<(String, Rat)> = w.iter().map(|(l, t)| (map[l].clone(), t.clone())).collect();
            assert_eq!(won(&m, &w), won(&a, &projected));
        }
    }
}
