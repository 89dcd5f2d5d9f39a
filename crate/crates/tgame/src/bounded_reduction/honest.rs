use std::collections::BTreeSet;

use super::{classify, BoundedError, Letter, POOL};
use crate::exact_time::{frac, Frac, Rat};
use crate::game::{TimerMove, TimerStrategy};
use crate::lcm::{Lcm, Op, RunPrefix};
use super::semantics::Activity;

/// `n` evenly spaced pool timestamps `i/(n+1)`.
pub fn even_pool(n: usize) -> Vec<Rat> {
    (1..=n).map(|i| Rat::new(i as u64, n as u64 + 1)).collect()
}

/// Honest encoding of a free-test run: the pool letters, then instruction
/// `j` at time `j + f`. Increments take the first inactive part of the pool
/// in pool order, decrements the first active one.
pub fn honest_word(m: &Lcm, run: &RunPrefix, pool: &[Rat]) -> Result<Vec<(String, Rat)>, BoundedError> {
    let order: Vec<Frac> = pool.iter().map(frac).collect();
    honest_word_with_order(m, run, pool, &order)
}

/// As [`honest_word`], allocating fractional parts in `order` (a
/// permutation of the pool).
pub fn honest_word_with_order(
    m: &Lcm,
    run: &RunPrefix,
    pool: &[Rat],
    order: &[Frac],
) -> Result<Vec<(String, Rat)>, BoundedError> {
    if pool.is_empty() {
        return Err(BoundedError::BadPool("empty".into()));
    }
    let mut prev = Rat::zero();
    for t in pool {
        if t <= &prev || t.cmp_int(1) != std::cmp::Ordering::Less {
            return Err(BoundedError::BadPool(t.to_string()));
        }
        prev = t.clone();
    }
    let pooled: BTreeSet<Frac> = pool.iter().map(frac).collect();
    if order.len() != pooled.len() || order.iter().any(|f| !pooled.contains(f)) {
        return Err(BoundedError::BadPool("allocation order is not a permutation of the pool".into()));
    }
    if run.start != m.initial_config() || !run.is_free_test_run(m) {
        return Err(BoundedError::NotARun);
    }
    let mut word: Vec<(String, Rat)> = pool.iter().map(|t| (POOL.to_string(), t.clone())).collect();
    let mut act = Activity::new(m.counters().len());
    for (j, (i, _)) in run.steps.iter().enumerate() {
        let ins = &m.instructions()[*i];
        let c = ins.counter;
        let f = match ins.op {
            Op::Inc => order.iter().find(|f| !act.is_active(c, f)),
            Op::Dec => order.iter().find(|f| act.is_active(c, f)),
            Op::Zt => order.first(),
        }
        .ok_or(BoundedError::PoolExhausted { step: j + 1 })?;
        let t = &Rat::int(j as u64 + 1) + f.value();
        act.push(m, Letter::Instr(*i), &t);
        word.push((m.letter(*i), t));
    }
    Ok(word)
}

/// Replays a fixed timed word regardless of Monitor's answers; past its end
/// it keeps playing the pool letter one time unit apart.
#[derive(Debug, Clone)]
pub struct ScriptedTimer {
    word: Vec<(String, Rat)>,
}

impl ScriptedTimer {
    pub fn new(word: Vec<(String, Rat)>) -> Self {
        ScriptedTimer { word }
    }

    pub fn word(&self) -> &[(String, Rat)] {
        &self.word
    }
}

impl TimerStrategy for ScriptedTimer {
    fn next_move(&mut self, h: &[String]) -> TimerMove {
        let n = h.len();
        let prev = if n == 0 { Rat::zero() } else { self.word.get(n - 1).map_or_else(Rat::zero, |p| p.1.clone()) };
        match self.word.get(n) {
            Some((l, t)) => TimerMove::new(l.clone(), t.checked_sub(&prev).expect("scripted word is monotone")),
            None => TimerMove::new(POOL, Rat::one()),
        }
    }
}

pub fn honest_timer(m: &Lcm, run: &RunPrefix, pool: &[Rat]) -> Result<ScriptedTimer, BoundedError> {
    Ok(ScriptedTimer::new(honest_word(m, run, pool)?))
}

/// A single rule violation planted in an otherwise unchanged word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Move an increment onto a part that is already active.
    DuplicateInc,
    /// Move a decrement onto a pooled part that is inactive.
    DecInactive,
}

/// Moves the instruction at `round` (0-based) to the offending fractional
/// part, keeping its integer part; `None` when the letter there cannot
/// carry the fault.
pub fn inject_fault(m: &Lcm, word: &[(String, Rat)], round: usize, fault: Fault) -> Option<Vec<(String, Rat)>> {
    let (letter, t) = word.get(round)?;
    let Ok(Letter::Instr(i)) = classify(m, letter) else { return None };
    let ins = &m.instructions()[i];
    let act = super::activity(m, &word[..round]).ok()?;
    let f = match (fault, ins.op) {
        (Fault::DuplicateInc, Op::Inc) => act.active(ins.counter).next()?.clone(),
        (Fault::DecInactive, Op::Dec) => act.pool.iter().find(|f| !act.is_active(ins.counter, f))?.clone(),
        _ => return None,
    };
    let mut out = word.to_vec();
    out[round].1 = &Rat::int(t.floor_u64()) + f.value();
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_time::r;
    use crate::lcm::{fixtures, free_test_run};

    #[test]
    fn m1_with_a_single_pooled_part() {
        let m = fixtures::m1();
        let run = free_test_run(&m, 3);
        let w = honest_word(&m, &run, &[r("1/10")]).unwrap();
        let times: Vec<Rat> = w[1..].iter().map(|(_, t)| t.clone()).collect();
        assert_eq!(times, [r("11/10"), r("21/10"), r("31/10")]);
    }

    #[test]
    fn pool_too_small() {
        let m = fixtures::load("double").unwrap();
        let run = free_test_run(&m, 6);
        assert_eq!(run.max_value(), 2);
        assert!(matches!(honest_word(&m, &run, &[r("1/2")]), Err(BoundedError::PoolExhausted { .. })));
        assert!(honest_word(&m, &run, &even_pool(2)).is_ok());
    }

    #[test]
    fn bad_pools_are_rejected() {
        let m = fixtures::m1();
        let run = free_test_run(&m, 2);
        for pool in [vec![], vec![r("1/2"), r("1/3")], vec![r("1")], vec![r("0")]] {
            assert!(matches!(honest_word(&m, &run, &pool), Err(BoundedError::BadPool(_))));
        }
    }

    #[test]
    fn scripted_timer_replays_delays() {
        let mut s = ScriptedTimer::new(vec![("☐".into(), r("1/3")), ("a".into(), r("4/3"))]);
        assert_eq!(s.next_move(&[]).delay, r("1/3"));
        assert_eq!(s.next_move(&["✓".into()]).delay, r("1"));
        assert_eq!(s.next_move(&["✓".into(), "✓".into()]), TimerMove::new(POOL, r("1")));
    }
}
