use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::{timer_alphabet, BoundedError, ERR, OK, POOL};
use crate::automata::{Acceptance, AutomatonBuilder, ClockId, Guard, LocId, Rel, ResetMode};
use crate::game::MonitorController;
use crate::lcm::{Lcm, Op};

/// Which of the `k` clocks of each counter hold an active fractional part.
type Busy = Vec<u32>;

fn state_name(m: &Lcm, s: &Busy) -> String {
    let parts: Vec<String> = s
        .iter()
        .enumerate()
        .filter(|(_, mask)| **mask != 0)
        .map(|(c, mask)| {
            let ids: Vec<String> = (0..32).filter(|i| mask >> i & 1 == 1).map(|i| (i + 1).to_string()).collect();
            format!("{}{{{}}}", m.counters()[c], ids.join(","))
        })
        .collect();
    if parts.is_empty() {
        "idle".into()
    } else {
        parts.join(" ")
    }
}

/// Guards `x_{a_1} > 0 ∧ … ∧ x_{a_{j-1}} > 0 ∧ x_{a_j} = 0` for each active
/// clock in order, then the guard with every active clock positive. The
/// guards are pairwise exclusive and cover every valuation.
fn first_zero_split(active: &[ClockId]) -> (Vec<Guard>, Guard) {
    let mut before = Guard::top();
    let mut hits = Vec::new();
    for &x in active {
        hits.push(before.clone().and(x, Rel::Eq, 0));
        before = before.and(x, Rel::Gt, 0);
    }
    (hits, before)
}

/// Monitor controller for machines bounded by `k`: counter `c` gets clocks
/// `x1_c … xk_c`, one per active fractional part, reset when the part is
/// allocated. After its first objection, or once more than `k` parts would
/// be needed, it answers `✓` forever.
pub fn synthesize_monitor_controller(m: &Lcm, k: usize) -> Result<MonitorController, BoundedError> {
    assert!(k <= 32, "at most 32 clocks per counter");
    let alphabet = timer_alphabet(m);
    let mut b = AutomatonBuilder::new(&alphabet, ResetMode::OneResetting, Acceptance::Reach);
    let clocks: Vec<Vec<ClockId>> = m
        .counters()
        .iter()
        .map(|c| (1..=k).map(|i| b.clock(&format!("x{i}_{c}"))).collect())
        .collect();
    let objected = b.location("objected");
    let overflow = b.location("overflow");
    for q in [objected, overflow] {
        for t in &alphabet {
            b.edge_with_output(q, t, Guard::top(), &[], q, OK);
        }
    }

    let mut ids: HashMap<Busy, LocId> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut intern = |b: &mut AutomatonBuilder, s: Busy, queue: &mut VecDeque<Busy>| {
        *ids.entry(s.clone()).or_insert_with(|| {
            queue.push_back(s.clone());
            b.location(state_name(m, &s))
        })
    };
    let start = intern(&mut b, vec![0; m.counters().len()], &mut queue);
    b.set_initial(start);
    while let Some(s) = queue.pop_front() {
        let src = intern(&mut b, s.clone(), &mut queue);
        b.edge_with_output(src, POOL, Guard::top(), &[], src, OK);
        for (i, ins) in m.instructions().iter().enumerate() {
            let letter = m.letter(i);
            let c = ins.counter;
            let active: Vec<usize> = (0..k).filter(|j| s[c] >> j & 1 == 1).collect();
            let active_clocks: Vec<ClockId> = active.iter().map(|&j| clocks[c][j]).collect();
            let (hits, none) = first_zero_split(&active_clocks);
            match ins.op {
                Op::Inc => {
                    for g in hits {
                        b.edge_with_output(src, &letter, g, &[], objected, ERR);
                    }
                    match (0..k).find(|j| s[c] >> j & 1 == 0) {
                        Some(j) => {
                            let mut s2 = s.clone();
                            s2[c] |= 1 << j;
                            let dst = intern(&mut b, s2, &mut queue);
                            b.edge_with_output(src, &letter, none, &[clocks[c][j]], dst, OK);
                        }
                        None => b.edge_with_output(src, &letter, none, &[], overflow, OK),
                    }
                }
                Op::Dec => {
                    for (g, j) in hits.into_iter().zip(&active) {
                        let mut s2 = s.clone();
                        s2[c] &= !(1 << j);
                        let dst = intern(&mut b, s2, &mut queue);
                        b.edge_with_output(src, &letter, g, &[], dst, OK);
                    }
                    b.edge_with_output(src, &letter, none, &[], objected, ERR);
                }
                Op::Zt => {
                    let mut s2 = s.clone();
                    s2[c] = 0;
                    let dst = intern(&mut b, s2, &mut queue);
                    b.edge_with_output(src, &letter, Guard::top(), &[], dst, OK);
                }
            }
        }
    }
    Ok(MonitorController::new(b.build()?)?)
}

/// Distinct guards of a controller and the largest number of distinct
/// guards on objecting transitions leaving one state on one letter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardSummary {
    pub guards: BTreeSet<Guard>,
    pub k_prime: usize,
}

pub fn summarize_guards(ctrl: &MonitorController) -> GuardSummary {
    let a = ctrl.machine();
    let mut per_choice: BTreeMap<(LocId, &str), BTreeSet<&Guard>> = BTreeMap::new();
    for t in a.transitions() {
        if t.output.as_deref() == Some(ERR) {
            per_choice.entry((t.source, t.letter.as_str())).or_default().insert(&t.guard);
        }
    }
    GuardSummary {
        guards: a.transitions().iter().map(|t| t.guard.clone()).collect(),
        k_prime: per_choice.values().map(BTreeSet::len).max().unwrap_or(0),
    }
}
