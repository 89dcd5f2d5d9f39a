use serde::Serialize;

use super::{parse_word, EncodingError, Sym};
use crate::exact_time::Rat;
use crate::lcm::{Lcm, Op};

/// Verdicts of the four local checks on a finite prefix. `c` is only
/// meaningful on prefixes that pass the other three.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LocalStatus {
    pub reg: bool,
    pub a: bool,
    pub b: bool,
    pub c: Option<bool>,
}

impl LocalStatus {
    pub fn all_ok(&self) -> bool {
        self.reg && self.a && self.b && self.c == Some(true)
    }
}

pub fn local_status(m: &Lcm, w: &[(String, Rat)]) -> Result<LocalStatus, EncodingError> {
    let w = parse_word(m, w)?;
    let reg = reg_ok(m, &w);
    let a = last_two_differ(&w);
    let b = unit_aligned(&w);
    let c = (reg && a && b).then(|| last_letter_aligned(m, &w));
    Ok(LocalStatus { reg, a, b, c })
}

/// Block order within segments, instruction chaining from the initial
/// location, and no tested counter in the segment before a zero test.
pub(super) fn reg_ok(m: &Lcm, w: &[(Sym, Rat)]) -> bool {
    let mut loc = m.initial();
    let mut seen = 0u8;
    for (s, _) in w {
        match *s {
            Sym::Counter(c) => {
                if seen >> (c + 1) != 0 {
                    return false;
                }
                seen |= 1 << c;
            }
            Sym::Instr(i) => {
                let ins = &m.instructions()[i];
                if ins.source != loc || (ins.op == Op::Zt && seen & (1 << ins.counter) != 0) {
                    return false;
                }
                loc = ins.target;
                seen = 0;
            }
        }
    }
    true
}

pub(super) fn last_two_differ(w: &[(Sym, Rat)]) -> bool {
    match w {
        [.., (_, t1), (_, t2)] => t1 != t2,
        _ => true,
    }
}

/// Instruction `n` at exactly `n`; counter letters strictly inside the
/// unit interval opened by the previous instruction (or by time 0).
pub(super) fn unit_aligned(w: &[(Sym, Rat)]) -> bool {
    let mut last = Rat::zero();
    for (s, t) in w {
        let next = &last + &Rat::one();
        match s {
            Sym::Counter(_) if !(&last < t && t < &next) => return false,
            Sym::Instr(_) if t != &next => return false,
            Sym::Instr(_) => last = next,
            Sym::Counter(_) => {}
        }
    }
    true
}

fn one_before(w: &[(Sym, Rat)], upto: usize, sym: Sym, t: &Rat) -> bool {
    w[..upto].iter().any(|(s, u)| *s == sym && &(u + &Rat::one()) == t)
}

/// Checks the last letter against the copies it needs one unit earlier.
pub(super) fn last_letter_aligned(m: &Lcm, w: &[(Sym, Rat)]) -> bool {
    let Some((last_sym, t)) = w.last() else { return true };
    let n = w.len() - 1;
    let instr_before = |end: usize| (0..end).rev().find(|&j| !w[j].0.is_counter());
    // counters-only stretch ending just before `end`
    let seg_start = |end: usize| instr_before(end).map_or(0, |q| q + 1);

    let a = match *last_sym {
        Sym::Instr(i) => {
            let ins = &m.instructions()[i];
            return ins.op != Op::Dec || w[seg_start(n)..n].iter().any(|(s, _)| *s == Sym::Counter(ins.counter));
        }
        Sym::Counter(a) => a,
    };
    let Some(p) = instr_before(n) else { return false };
    let Sym::Instr(i) = w[p].0 else { unreachable!() };
    let ins = &m.instructions()[i];
    let copy = one_before(w, n, Sym::Counter(a), t);
    if ins.op == Op::Zt || ins.counter != a {
        return copy;
    }
    let seg = seg_start(p)..p;
    let is_a = |j: usize| w[j].0 == Sym::Counter(a);
    match ins.op {
        Op::Inc => {
            let fresh = !(p + 1..n).any(is_a);
            let within = seg
                .clone()
                .any(|j| is_a(j) && (j == 0 || !is_a(j - 1)) && t < &(&w[j].1 + &Rat::one()));
            let absent = !seg.clone().any(is_a);
            copy || (fresh && (within || absent))
        }
        Op::Dec => seg.clone().any(|j| j > seg.start && is_a(j) && is_a(j - 1) && &(&w[j].1 + &Rat::one()) == t),
        Op::Zt => unreachable!(),
    }
}
