use serde::Serialize;

use super::{Atom, Guard, Rel, ResetMode, TimedAutomaton};
use crate::exact_time::{ClampedValue, Rat};

/// Largest clock count for which coverage is checked by enumerating regions.
const COVERAGE_CLOCK_LIMIT: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ValidationReport {
    pub clock_count: usize,
    pub max_constant: u64,
    /// No two same-letter transitions from one location have overlapping guards.
    pub deterministic: bool,
    /// Every location reads every letter at every valuation; `None` when
    /// there are too many clocks to enumerate regions.
    pub complete: Option<bool>,
    pub overlaps: Vec<LetterSite>,
    pub gaps: Vec<LetterSite>,
    pub unsatisfiable: Vec<UnsatisfiableAtom>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LetterSite {
    pub location: String,
    pub letter: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnsatisfiableAtom {
    pub transition: usize,
    pub atom: String,
}

// Bounds of a convex set of values of one clock.
#[derive(Clone, Debug)]
struct Interval {
    lo: Rat,
    lo_strict: bool,
    hi: Option<(Rat, bool)>,
}

impl Interval {
    fn domain(mode: ResetMode) -> Self {
        Interval {
            lo: Rat::zero(),
            lo_strict: false,
            hi: match mode {
                ResetMode::Standard => None,
                ResetMode::OneResetting => Some((Rat::one(), true)),
            },
        }
    }

    fn restrict(&mut self, rel: Rel, c: u64) {
        let c = Rat::int(c);
        let lower = |s: &mut Self, v: Rat, strict: bool| {
            if v > s.lo || (v == s.lo && strict) {
                s.lo = v;
                s.lo_strict = strict;
            }
        };
        let upper = |s: &mut Self, v: Rat, strict: bool| match &s.hi {
            Some((h, hs)) if *h < v || (*h == v && (*hs || !strict)) => {}
            _ => s.hi = Some((v, strict)),
        };
        match rel {
            Rel::Lt => upper(self, c, true),
            Rel::Le => upper(self, c, false),
            Rel::Eq => {
                lower(self, c.clone(), false);
                upper(self, c, false);
            }
            Rel::Ge => lower(self, c, false),
            Rel::Gt => lower(self, c, true),
        }
    }

    fn is_empty(&self) -> bool {
        match &self.hi {
            None => false,
            Some((h, hs)) => *h < self.lo || (*h == self.lo && (*hs || self.lo_strict)),
        }
    }
}

fn satisfiable(atoms: &[&Atom], clocks: usize, mode: ResetMode) -> bool {
    let mut iv = vec![Interval::domain(mode); clocks];
    for a in atoms {
        iv[a.clock].restrict(a.rel, a.constant);
    }
    iv.iter().all(|i| !i.is_empty())
}

fn overlap(g: &Guard, h: &Guard, clocks: usize, mode: ResetMode) -> bool {
    let atoms: Vec<&Atom> = g.0.iter().chain(h.0.iter()).collect();
    satisfiable(&atoms, clocks, mode)
}

// One value per region of a single clock.
fn region_points(k: u64, mode: ResetMode) -> Vec<ClampedValue> {
    match mode {
        ResetMode::OneResetting => vec![ClampedValue::zero(), ClampedValue::Exact(Rat::new(1, 2))],
        ResetMode::Standard => {
            let mut v = Vec::new();
            for i in 0..=k {
                v.push(ClampedValue::Exact(Rat::int(i)));
                v.push(ClampedValue::Exact(&Rat::int(i) + &Rat::new(1, 2)));
            }
            v
        }
    }
}

pub fn validate(a: &TimedAutomaton) -> ValidationReport {
    let n = a.clock_count();
    let mode = a.reset_mode();
    let mut unsatisfiable = Vec::new();
    for (i, t) in a.transitions().iter().enumerate() {
        for atom in &t.guard.0 {
            if !satisfiable(&[atom], n, mode) {
                unsatisfiable.push(UnsatisfiableAtom {
                    transition: i,
                    atom: format!("{} {} {}", a.clocks()[atom.clock], atom.rel.symbol(), atom.constant),
                });
            }
        }
    }

    let mut overlaps = Vec::new();
    let mut gaps = Vec::new();
    let check_coverage = n <= COVERAGE_CLOCK_LIMIT;
    let points = region_points(a.max_constant(), mode);
    for l in 0..a.locations().len() {
        for letter in a.alphabet() {
            let guards: Vec<&Guard> = a.outgoing(l, letter).map(|t| &t.guard).collect();
            let clash = (0..guards.len())
                .any(|i| (i + 1..guards.len()).any(|j| overlap(guards[i], guards[j], n, mode)));
            let site = || LetterSite { location: a.locations()[l].clone(), letter: letter.clone() };
            if clash {
                overlaps.push(site());
            }
            if check_coverage && !covers(&guards, n, &points) {
                gaps.push(site());
            }
        }
    }
    ValidationReport {
        clock_count: n,
        max_constant: a.max_constant(),
        deterministic: overlaps.is_empty(),
        complete: check_coverage.then_some(gaps.is_empty()),
        overlaps,
        gaps,
        unsatisfiable,
    }
}

fn covers(guards: &[&Guard], clocks: usize, points: &[ClampedValue]) -> bool {
    let mut idx = vec![0usize; clocks];
    loop {
        let vals: Vec<ClampedValue> = idx.iter().map(|&i| points[i].clone()).collect();
        if !guards.iter().any(|g| g.holds(&vals)) {
            return false;
        }
        let mut d = 0;
        loop {
            if d == clocks {
                return true;
            }
            idx[d] += 1;
            if idx[d] < points.len() {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}
