use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Acceptance, Atom, AutomatonBuilder, AutomatonError, Guard, Rel, ResetMode, TimedAutomaton};

/// Name-based document form of a [`TimedAutomaton`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct AutomatonDoc {
    pub locations: Vec<String>,
    #[serde(default)]
    pub clocks: Vec<String>,
    pub alphabet: Vec<String>,
    pub initial: Vec<String>,
    #[serde(default)]
    pub accepting: Vec<String>,
    pub reset_mode: ResetMode,
    pub acceptance: Acceptance,
    pub transitions: Vec<TransitionDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDoc {
    pub source: String,
    pub letter: String,
    #[serde(default)]
    pub guard: Vec<(String, Rel, u64)>,
    #[serde(default)]
    pub resets: Vec<String>,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl From<&TimedAutomaton> for AutomatonDoc {
    fn from(a: &TimedAutomaton) -> Self {
        let loc = |l: usize| a.locations()[l].clone();
        let clk = |c: usize| a.clocks()[c].clone();
        AutomatonDoc {
            locations: a.locations().to_vec(),
            clocks: a.clocks().to_vec(),
            alphabet: a.alphabet().to_vec(),
            initial: a.initial().iter().map(|&l| loc(l)).collect(),
            accepting: a.accepting().map(loc).collect(),
            reset_mode: a.reset_mode(),
            acceptance: a.acceptance(),
            transitions: a
                .transitions()
                .iter()
                .map(|t| TransitionDoc {
                    source: loc(t.source),
                    letter: t.letter.clone(),
                    guard: t.guard.0.iter().map(|at| (clk(at.clock), at.rel, at.constant)).collect(),
                    resets: t.resets.iter().map(|&c| clk(c)).collect(),
                    target: loc(t.target),
                    output: t.output.clone(),
                })
                .collect(),
        }
    }
}

impl TryFrom<&AutomatonDoc> for TimedAutomaton {
    type Error = AutomatonError;

    fn try_from(d: &AutomatonDoc) -> Result<Self, Self::Error> {
        let mut b = AutomatonBuilder::new(&d.alphabet, d.reset_mode, d.acceptance);
        let mut clocks = HashMap::new();
        for c in &d.clocks {
            if clocks.insert(c.as_str(), b.clock(c)).is_some() {
                return Err(AutomatonError::Duplicate(c.clone()));
            }
        }
        let mut locs = HashMap::new();
        for l in &d.locations {
            if locs.insert(l.as_str(), b.location(l.clone())).is_some() {
                return Err(AutomatonError::Duplicate(l.clone()));
            }
        }
        let loc = |n: &str| locs.get(n).copied().ok_or_else(|| AutomatonError::UnknownLocation(n.to_string()));
        let clk = |n: &str| clocks.get(n).copied().ok_or_else(|| AutomatonError::UnknownClock(n.to_string()));
        for n in &d.initial {
            b.set_initial(loc(n)?);
        }
        for n in &d.accepting {
            b.set_accepting(loc(n)?, true);
        }
        for t in &d.transitions {
            let guard = Guard(
                t.guard
                    .iter()
                    .map(|(c, rel, k)| Ok(Atom::new(clk(c)?, *rel, *k)))
                    .collect::<Result<_, AutomatonError>>()?,
            );
            let resets = t.resets.iter().map(|c| clk(c)).collect::<Result<Vec<_>, _>>()?;
            let (s, g) = (loc(&t.source)?, loc(&t.target)?);
            match &t.output {
                Some(o) => b.edge_with_output(s, &t.letter, guard, &resets, g, o),
                None => b.edge(s, &t.letter, guard, &resets, g),
            }
        }
        b.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"{
        "locations": ["l0", "l1"],
        "clocks": ["x"],
        "alphabet": ["a"],
        "initial": ["l0"],
        "accepting": ["l1"],
        "resetMode": "standard",
        "acceptance": "reach",
        "transitions": [
            {"source": "l0", "letter": "a", "guard": [["x", "<=", 2]], "resets": ["x"], "target": "l1"}
        ]
    }"#;

    #[test]
    fn roundtrip() {
        let d: AutomatonDoc = serde_json::from_str(DOC).unwrap();
        let a = TimedAutomaton::try_from(&d).unwrap();
        assert_eq!(a.max_constant(), 2);
        assert_eq!(AutomatonDoc::from(&a), d);
    }

    #[test]
    fn unknown_clock_is_rejected() {
        let bad = DOC.replace(r#"["x", "<=", 2]"#, r#"["y", "<=", 2]"#);
        let d: AutomatonDoc = serde_json::from_str(&bad).unwrap();
        assert_eq!(TimedAutomaton::try_from(&d).unwrap_err(), AutomatonError::UnknownClock("y".into()));
    }
}
