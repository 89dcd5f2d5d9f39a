//! Lossy counter machines under lossy and free-test semantics.
//!
//! Text format, one declaration per line, `#` starts a comment:
//!
//! ```text
//! counters c1 c2 c3 c4
//! init s0
//! s0: inc c1 -> s1
//! s1: dec c1 -> s0
//! ```
//!
//! Locations are declared by use. The `counters` and `init` headers must
//! precede the first instruction.

mod explore;
mod parse;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use explore::{explore_bounded, find_lasso, free_test_run, lossy_successors, Exploration, LcmLasso};
pub use parse::parse_lcm;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LcmError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("instruction {0} does not start at the current location")]
    WrongSource(String),
    #[error("instruction {0} is disabled")]
    Disabled(String),
    #[error("run is stuck at location {0}")]
    Stuck(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Op {
    Inc,
    Dec,
    Zt,
}

impl Op {
    pub fn keyword(self) -> &'static str {
        match self {
            Op::Inc => "inc",
            Op::Dec => "dec",
            Op::Zt => "zt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Instruction {
    pub source: usize,
    pub op: Op,
    pub counter: usize,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lcm {
    counters: Vec<String>,
    locations: Vec<String>,
    initial: usize,
    instructions: Vec<Instruction>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LcmConfig {
    pub loc: usize,
    pub vals: Vec<u64>,
}

/// A run from `start`: each step names the instruction taken and the configuration reached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunPrefix {
    pub start: LcmConfig,
    pub steps: Vec<(usize, LcmConfig)>,
}

impl RunPrefix {
    pub fn new(start: LcmConfig) -> Self {
        RunPrefix { start, steps: Vec::new() }
    }

    pub fn last(&self) -> &LcmConfig {
        self.steps.last().map(|(_, c)| c).unwrap_or(&self.start)
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Configuration before step `i`; `config(len())` is the last one.
    pub fn config(&self, i: usize) -> &LcmConfig {
        if i == 0 {
            &self.start
        } else {
            &self.steps[i - 1].1
        }
    }

    pub fn instructions(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps.iter().map(|(i, _)| *i)
    }

    pub fn max_value(&self) -> u64 {
        std::iter::once(&self.start)
            .chain(self.steps.iter().map(|(_, c)| c))
            .flat_map(|c| c.vals.iter().copied())
            .max()
            .unwrap_or(0)
    }

    pub fn is_free_test_run(&self, m: &Lcm) -> bool {
        self.steps
            .iter()
            .enumerate()
            .all(|(i, (instr, c))| m.step_free_test(self.config(i), *instr).as_ref() == Ok(c))
    }

    pub fn is_lossy_run(&self, m: &Lcm) -> bool {
        self.steps
            .iter()
            .enumerate()
            .all(|(i, (instr, c))| m.step_lossy_related(self.config(i), *instr, c))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LcmReport {
    /// At most one instruction leaves every location.
    pub deterministic: bool,
    /// At least one instruction leaves every location.
    pub total: bool,
    pub branching: Vec<String>,
    pub stuck: Vec<String>,
    pub unreachable: Vec<String>,
}

impl Lcm {
    pub fn new(
        counters: Vec<String>,
        locations: Vec<String>,
        initial: usize,
        instructions: Vec<Instruction>,
    ) -> Result<Self, LcmError> {
        let bad = |msg: &str| LcmError::Parse { line: 0, msg: msg.to_string() };
        if initial >= locations.len() {
            return Err(bad("initial location out of range"));
        }
        for i in &instructions {
            if i.source >= locations.len() || i.target >= locations.len() || i.counter >= counters.len() {
                return Err(bad("instruction refers to an undeclared name"));
            }
        }
        Ok(Lcm { counters, locations, initial, instructions })
    }

    pub fn counters(&self) -> &[String] {
        &self.counters
    }

    pub fn locations(&self) -> &[String] {
        &self.locations
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn location_id(&self, name: &str) -> Option<usize> {
        self.locations.iter().position(|l| l == name)
    }

    pub fn counter_id(&self, name: &str) -> Option<usize> {
        self.counters.iter().position(|c| c == name)
    }

    pub fn from_location(&self, loc: usize) -> impl Iterator<Item = (usize, &Instruction)> + '_ {
        self.instructions.iter().enumerate().filter(move |(_, i)| i.source == loc)
    }

    pub fn initial_config(&self) -> LcmConfig {
        LcmConfig { loc: self.initial, vals: vec![0; self.counters.len()] }
    }

    /// Letter naming an instruction, e.g. `s0:inc c1->s1`.
    pub fn letter(&self, idx: usize) -> String {
        let i = &self.instructions[idx];
        format!(
            "{}:{} {}->{}",
            self.locations[i.source],
            i.op.keyword(),
            self.counters[i.counter],
            self.locations[i.target]
        )
    }

    pub fn instruction_letters(&self) -> Vec<String> {
        (0..self.instructions.len()).map(|i| self.letter(i)).collect()
    }

    pub fn instruction_by_letter(&self, letter: &str) -> Option<usize> {
        (0..self.instructions.len()).find(|&i| self.letter(i) == letter)
    }

    pub fn validate(&self) -> LcmReport {
        let n = self.locations.len();
        let mut out = vec![0usize; n];
        for i in &self.instructions {
            out[i.source] += 1;
        }
        let mut reach = vec![false; n];
        let mut stack = vec![self.initial];
        reach[self.initial] = true;
        while let Some(l) = stack.pop() {
            for (_, i) in self.from_location(l) {
                if !reach[i.target] {
                    reach[i.target] = true;
                    stack.push(i.target);
                }
            }
        }
        let names = |p: &dyn Fn(usize) -> bool| (0..n).filter(|&l| p(l)).map(|l| self.locations[l].clone()).collect::<Vec<_>>();
        let branching = names(&|l| out[l] >= 2);
        let stuck = names(&|l| out[l] == 0);
        let unreachable = names(&|l| !reach[l]);
        LcmReport {
            deterministic: branching.is_empty(),
            total: stuck.is_empty(),
            branching,
            stuck,
            unreachable,
        }
    }

    /// Free-test step: exact inc/dec, zero test resets the counter.
    pub fn step_free_test(&self, cfg: &LcmConfig, idx: usize) -> Result<LcmConfig, LcmError> {
        let i = &self.instructions[idx];
        if i.source != cfg.loc {
            return Err(LcmError::WrongSource(self.letter(idx)));
        }
        let mut vals = cfg.vals.clone();
        match i.op {
            Op::Inc => vals[i.counter] += 1,
            Op::Dec => {
                if vals[i.counter] == 0 {
                    return Err(LcmError::Disabled(self.letter(idx)));
                }
                vals[i.counter] -= 1;
            }
            Op::Zt => vals[i.counter] = 0,
        }
        Ok(LcmConfig { loc: i.target, vals })
    }

    /// Lossy step relation: `post` is pointwise below the exact update.
    pub fn step_lossy_related(&self, pre: &LcmConfig, idx: usize, post: &LcmConfig) -> bool {
        let i = &self.instructions[idx];
        if i.source != pre.loc || i.target != post.loc {
            return false;
        }
        let mut bound = pre.vals.clone();
        match i.op {
            Op::Inc => bound[i.counter] += 1,
            Op::Dec => {
                if bound[i.counter] == 0 {
                    return false;
                }
                bound[i.counter] -= 1;
            }
            Op::Zt => {
                if bound[i.counter] != 0 {
                    return false;
                }
            }
        }
        post.vals.iter().zip(&bound).all(|(p, b)| p <= b)
    }
}

impl fmt::Display for Lcm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "counters {}", self.counters.join(" "))?;
        writeln!(f, "init {}", self.locations[self.initial])?;
        for i in &self.instructions {
            writeln!(
                f,
                "{}: {} {} -> {}",
                self.locations[i.source],
                i.op.keyword(),
                self.counters[i.counter],
                self.locations[i.target]
            )?;
        }
        Ok(())
    }
}

impl fmt::Display for LcmConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.vals.iter().map(u64::to_string).collect();
        write!(f, "(#{}, {})", self.loc, v.join(","))
    }
}

/// Machines shipped with the crate.
pub mod fixtures {
    use super::{parse_lcm, Lcm};

    /// `(name, source, free-test bound)`; a bound of `None` means unbounded.
    pub const ALL: &[(&str, &str, Option<u64>)] = &[
        ("m1", include_str!("../../fixtures/m1.lcm"), Some(1)),
        ("m2", include_str!("../../fixtures/m2.lcm"), None),
        ("double", include_str!("../../fixtures/double.lcm"), Some(2)),
        ("refill", include_str!("../../fixtures/refill.lcm"), Some(2)),
        ("pair", include_str!("../../fixtures/pair.lcm"), Some(2)),
        ("stair", include_str!("../../fixtures/stair.lcm"), Some(3)),
        ("relay", include_str!("../../fixtures/relay.lcm"), Some(2)),
        ("three", include_str!("../../fixtures/three.lcm"), Some(3)),
    ];

    pub fn load(name: &str) -> Option<Lcm> {
        ALL.iter()
            .find(|(n, _, _)| *n == name)
            .map(|(_, src, _)| parse_lcm(src).expect("fixture parses"))
    }

    pub fn m1() -> Lcm {
        load("m1").expect("m1 fixture")
    }

    pub fn m2() -> Lcm {
        load("m2").expect("m2 fixture")
    }

    /// Bounded fixtures other than `m1` that increment a nonempty counter
    /// and decrement at least once.
    pub fn bounded_others() -> Vec<(&'static str, Lcm, u64)> {
        ["double", "refill", "pair", "stair", "relay"]
            .iter()
            .map(|n| {
                let bound = ALL.iter().find(|f| f.0 == *n).and_then(|f| f.2).expect("bounded");
                (*n, load(n).expect("fixture"), bound)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m1_is_deterministic_and_total() {
        let r = fixtures::m1().validate();
        assert!(r.deterministic && r.total);
        assert!(r.unreachable.is_empty());
    }

    #[test]
    fn branching_and_stuck_are_flagged() {
        let m = parse_lcm("counters c1\ninit s0\ns0: inc c1 -> s1\ns0: dec c1 -> s0\n").unwrap();
        let r = m.validate();
        assert_eq!(r.branching, ["s0"]);
        assert_eq!(r.stuck, ["s1"]);
        assert!(!r.deterministic);
    }

    #[test]
    fn free_test_steps() {
        let m = parse_lcm("counters c1\ninit s0\ns0: inc c1 -> s1\ns1: zt c1 -> s2\ns2: dec c1 -> s0\n").unwrap();
        let c0 = m.initial_config();
        let c1 = m.step_free_test(&c0, 0).unwrap();
        assert_eq!(c1, LcmConfig { loc: 1, vals: vec![1] });
        let three = LcmConfig { loc: 1, vals: vec![3] };
        assert_eq!(m.step_free_test(&three, 1).unwrap(), LcmConfig { loc: 2, vals: vec![0] });
        let zero = LcmConfig { loc: 2, vals: vec![0] };
        assert_eq!(m.step_free_test(&zero, 2), Err(LcmError::Disabled("s2:dec c1->s0".into())));
    }

    #[test]
    fn lossy_relation() {
        let m = parse_lcm("counters c1\ninit s0\ns0: inc c1 -> s1\ns1: zt c1 -> s0\n").unwrap();
        let at = |loc, v| LcmConfig { loc, vals: vec![v] };
        assert!(m.step_lossy_related(&at(0, 0), 0, &at(1, 0)));
        assert!(m.step_lossy_related(&at(0, 0), 0, &at(1, 1)));
        assert!(!m.step_lossy_related(&at(0, 0), 0, &at(1, 2)));
        for post in 0..3 {
            assert!(!m.step_lossy_related(&at(1, 1), 1, &at(0, post)));
        }
        assert!(m.step_lossy_related(&at(1, 0), 1, &at(0, 0)));
    }

    #[test]
    fn letters_name_instructions() {
        let m = fixtures::m1();
        assert_eq!(m.instruction_letters(), ["s0:inc c1->s1", "s1:dec c1->s0"]);
        assert_eq!(m.instruction_by_letter("s1:dec c1->s0"), Some(1));
    }

    #[test]
    fn fixtures_parse_and_are_total() {
        for (name, src, _) in fixtures::ALL {
            let m = parse_lcm(src).unwrap();
            let r = m.validate();
            assert!(r.deterministic, "{name}");
            assert!(r.unreachable.is_empty(), "{name}");
        }
    }
}
