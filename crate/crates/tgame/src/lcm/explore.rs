use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;

use super::{Lcm, LcmConfig, Op, RunPrefix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Exploration {
    BoundedWithMax(u64),
    ExceedsCap,
}

/// Deterministic free-test run taking the first enabled instruction at
/// each step; stops early when no instruction is enabled.
pub fn free_test_run(m: &Lcm, max_steps: usize) -> RunPrefix {
    let mut run = RunPrefix::new(m.initial_config());
    for _ in 0..max_steps {
        let cur = run.last().clone();
        let Some(next) = m.from_location(cur.loc).find_map(|(i, _)| m.step_free_test(&cur, i).ok().map(|c| (i, c))) else {
            break;
        };
        run.steps.push(next);
    }
    run
}

/// Breadth-first search of free-test reachable configurations.
pub fn explore_bounded(m: &Lcm, cap: u64) -> Exploration {
    let start = m.initial_config();
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    let mut max = 0;
    while let Some(c) = queue.pop_front() {
        for (i, _) in m.from_location(c.loc) {
            let Ok(next) = m.step_free_test(&c, i) else { continue };
            let top = next.vals.iter().copied().max().unwrap_or(0);
            if top > cap {
                return Exploration::ExceedsCap;
            }
            max = max.max(top);
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    Exploration::BoundedWithMax(max)
}

/// Lossy successors with every counter at most `cap`, largest first.
pub fn lossy_successors(m: &Lcm, c: &LcmConfig, cap: u64) -> Vec<(usize, LcmConfig)> {
    let mut out = Vec::new();
    for (idx, i) in m.from_location(c.loc) {
        let mut bound = c.vals.clone();
        match i.op {
            Op::Inc => bound[i.counter] += 1,
            Op::Dec if bound[i.counter] == 0 => continue,
            Op::Dec => bound[i.counter] -= 1,
            Op::Zt if bound[i.counter] != 0 => continue,
            Op::Zt => {}
        }
        for b in bound.iter_mut() {
            *b = (*b).min(cap);
        }
        // odometer over all vectors below `bound`, counting down
        let mut v = bound.clone();
        loop {
            out.push((idx, LcmConfig { loc: i.target, vals: v.clone() }));
            let mut d = 0;
            while d < v.len() && v[d] == 0 {
                v[d] = bound[d];
                d += 1;
            }
            if d == v.len() {
                break;
            }
            v[d] -= 1;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LcmLasso {
    pub prefix: RunPrefix,
    /// Steps from `prefix.last()` back to itself.
    pub cycle: Vec<(usize, LcmConfig)>,
}

impl LcmLasso {
    pub fn cycle_run(&self) -> RunPrefix {
        RunPrefix { start: self.prefix.last().clone(), steps: self.cycle.clone() }
    }
}

fn path_to(parents: &HashMap<LcmConfig, Option<(LcmConfig, usize)>>, end: &LcmConfig) -> Vec<(usize, LcmConfig)> {
    let mut steps = Vec::new();
    let mut cur = end.clone();
    while let Some(Some((prev, instr))) = parents.get(&cur) {
        steps.push((*instr, cur.clone()));
        cur = prev.clone();
    }
    steps.reverse();
    steps
}

/// A lossy lasso whose cycle starts and ends at a configuration in location `s`.
pub fn find_lasso(m: &Lcm, s: usize, cap: u64) -> Option<LcmLasso> {
    let start = m.initial_config();
    if start.vals.iter().any(|&v| v > cap) {
        return None;
    }
    let mut parents: HashMap<LcmConfig, Option<(LcmConfig, usize)>> = HashMap::from([(start.clone(), None)]);
    let mut order = vec![start.clone()];
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(c) = queue.pop_front() {
        for (i, n) in lossy_successors(m, &c, cap) {
            if !parents.contains_key(&n) {
                parents.insert(n.clone(), Some((c.clone(), i)));
                order.push(n.clone());
                queue.push_back(n);
            }
        }
    }
    for target in order.iter().filter(|c| c.loc == s) {
        let mut back: HashMap<LcmConfig, Option<(LcmConfig, usize)>> = HashMap::from([(target.clone(), None)]);
        let mut queue = VecDeque::from([target.clone()]);
        let mut closing: Option<(LcmConfig, usize)> = None;
        'search: while let Some(c) = queue.pop_front() {
            for (i, n) in lossy_successors(m, &c, cap) {
                if &n == target {
                    closing = Some((c, i));
                    break 'search;
                }
                if !back.contains_key(&n) {
                    back.insert(n.clone(), Some((c.clone(), i)));
                    queue.push_back(n);
                }
            }
        }
        if let Some((last, instr)) = closing {
            let mut cycle = if &last == target { Vec::new() } else { path_to(&back, &last) };
            cycle.push((instr, target.clone()));
            let prefix = RunPrefix { start: start.clone(), steps: path_to(&parents, target) };
            return Some(LcmLasso { prefix, cycle });
        }
    }
    None
}
