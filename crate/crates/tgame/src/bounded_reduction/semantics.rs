use std::collections::{BTreeMap, BTreeSet};

use super::{classify, BoundedError, Letter};
use crate::exact_time::{frac, Frac, Rat};
use crate::lcm::{Lcm, LcmConfig, Op, RunPrefix};

/// Per counter, the latest operation at each fractional part since the
/// counter's last zero test, plus the fractional parts of pool letters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Activity {
    pub pool: BTreeSet<Frac>,
    latest: Vec<BTreeMap<Frac, Op>>,
}

impl Activity {
    pub fn new(counters: usize) -> Self {
        Activity { pool: BTreeSet::new(), latest: vec![BTreeMap::new(); counters] }
    }

    pub fn push(&mut self, m: &Lcm, letter: Letter, t: &Rat) {
        let f = frac(t);
        match letter {
            Letter::Pool => {
                self.pool.insert(f);
            }
            Letter::Instr(i) => {
                let ins = &m.instructions()[i];
                if ins.op == Op::Zt {
                    self.latest[ins.counter].clear();
                } else {
                    self.latest[ins.counter].insert(f, ins.op);
                }
            }
        }
    }

    pub fn is_active(&self, c: usize, f: &Frac) -> bool {
        self.latest[c].get(f) == Some(&Op::Inc)
    }

    pub fn active(&self, c: usize) -> impl Iterator<Item = &Frac> + '_ {
        self.latest[c].iter().filter(|(_, op)| **op == Op::Inc).map(|(f, _)| f)
    }

    pub fn val(&self) -> Vec<u64> {
        (0..self.latest.len()).map(|c| self.active(c).count() as u64).collect()
    }
}

fn letters(m: &Lcm, w: &[(String, Rat)]) -> Result<Vec<Letter>, BoundedError> {
    w.iter().map(|(l, _)| classify(m, l)).collect()
}

pub fn activity(m: &Lcm, w: &[(String, Rat)]) -> Result<Activity, BoundedError> {
    let mut act = Activity::new(m.counters().len());
    for (l, (_, t)) in letters(m, w)?.into_iter().zip(w) {
        act.push(m, l, t);
    }
    Ok(act)
}

/// Pool letters, then instructions chaining from the initial location.
fn is_regular(m: &Lcm, ls: &[Letter]) -> bool {
    let mut loc = m.initial();
    let mut pooling = true;
    for l in ls {
        match *l {
            Letter::Pool if pooling => {}
            Letter::Pool => return false,
            Letter::Instr(i) => {
                let ins = &m.instructions()[i];
                if ins.source != loc {
                    return false;
                }
                loc = ins.target;
                pooling = false;
            }
        }
    }
    true
}

/// The four rule languages and the regular shape, decided directly on a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RuleStatus {
    pub reg: bool,
    /// Last letter increments at an active fractional part.
    pub err1: bool,
    /// Last letter is no increment, or increments at a pooled inactive part.
    pub ok1: bool,
    /// Last letter decrements at a pooled inactive part.
    pub err2: bool,
    /// Last letter is no decrement, or decrements at an active part.
    pub ok2: bool,
}

impl RuleStatus {
    /// Monitor must object.
    pub fn err(&self) -> bool {
        self.reg && (self.err1 || self.err2)
    }

    /// Monitor must not object.
    pub fn ok(&self) -> bool {
        self.reg && self.ok1 && self.ok2
    }
}

/// Some pool letter with fractional part `f` such that, reading only what
/// follows it, `f` is inactive for `c`.
fn pooled_inactive(m: &Lcm, ls: &[Letter], w: &[(String, Rat)], c: usize, f: &Frac) -> bool {
    (0..ls.len()).any(|p| {
        if ls[p] != Letter::Pool || &frac(&w[p].1) != f {
            return false;
        }
        let mut act = Activity::new(m.counters().len());
        for q in p + 1..ls.len() {
            act.push(m, ls[q], &w[q].1);
        }
        !act.is_active(c, f)
    })
}

pub fn rule_oracles(m: &Lcm, w: &[(String, Rat)]) -> Result<RuleStatus, BoundedError> {
    let ls = letters(m, w)?;
    let reg = is_regular(m, &ls);
    let Some((&last, pre)) = ls.split_last() else {
        return Ok(RuleStatus { reg, err1: false, ok1: false, err2: false, ok2: false });
    };
    let pre_w = &w[..pre.len()];
    let Letter::Instr(i) = last else {
        return Ok(RuleStatus { reg, err1: false, ok1: true, err2: false, ok2: true });
    };
    let ins = &m.instructions()[i];
    let f = frac(&w[pre.len()].1);
    let act = activity(m, pre_w)?;
    let active = act.is_active(ins.counter, &f);
    let pooled = || pooled_inactive(m, pre, pre_w, ins.counter, &f);
    Ok(match ins.op {
        Op::Inc => RuleStatus { reg, err1: active, ok1: pooled(), err2: false, ok2: true },
        Op::Dec => RuleStatus { reg, err1: false, ok1: true, err2: pooled(), ok2: active },
        Op::Zt => RuleStatus { reg, err1: false, ok1: true, err2: false, ok2: true },
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValAndRho {
    /// Valuation after the pool and after each instruction.
    pub vals: Vec<Vec<u64>>,
    pub rho: RunPrefix,
    pub is_run: bool,
}

/// Reads the configurations a regular word claims to visit.
pub fn val_and_rho(m: &Lcm, w: &[(String, Rat)]) -> Result<ValAndRho, BoundedError> {
    let ls = letters(m, w)?;
    if !is_regular(m, &ls) {
        return Err(BoundedError::NotRegular);
    }
    let mut act = Activity::new(m.counters().len());
    let mut rho = RunPrefix::new(LcmConfig { loc: m.initial(), vals: act.val() });
    let mut vals = vec![act.val()];
    for (l, (_, t)) in ls.iter().zip(w) {
        act.push(m, *l, t);
        if let Letter::Instr(i) = *l {
            vals.push(act.val());
            rho.steps.push((i, LcmConfig { loc: m.instructions()[i].target, vals: act.val() }));
        }
    }
    let is_run = rho.is_free_test_run(m);
    Ok(ValAndRho { vals, rho, is_run })
}

/// A regular word whose instructions all respect both rules reads as a
/// free-test run.
pub fn claim62_check(m: &Lcm, w: &[(String, Rat)]) -> Result<bool, BoundedError> {
    let ls = letters(m, w)?;
    if !is_regular(m, &ls) {
        return Err(BoundedError::NotRegular);
    }
    let mut act = Activity::new(m.counters().len());
    for (l, (_, t)) in ls.iter().zip(w) {
        if let Letter::Instr(i) = *l {
            let ins = &m.instructions()[i];
            let active = act.is_active(ins.counter, &frac(t));
            let respected = match ins.op {
                Op::Inc => !active,
                Op::Dec => active,
                Op::Zt => true,
            };
            if !respected {
                return Ok(true);
            }
        }
        act.push(m, *l, t);
    }
    Ok(val_and_rho(m, w)?.is_run)
}
