//! Versioned JSON documents for every artifact the tools exchange, plus the
//! interactive play loop in [`repl`].
//!
//! Every JSON document is an envelope `{"formatVersion": 1, "kind": …,
//! "body": …}`. Machines may also be given in their line-oriented text form,
//! recognised by not starting with `{`.

pub mod repl;

use std::fmt;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{validate, AutomatonDoc, LassoWord, TimedAutomaton};
use crate::exact_time::Rat;
use crate::game::{GameDoc, MonitorController, Play, TimedGame, TimerController, DEFAULT_JOINT_BUDGET};
use crate::lcm::{parse_lcm, Instruction, Lcm, Op};

pub const FORMAT_VERSION: u64 = 1;

/// Overrides the joint-state budget of lasso detection and adjudication.
pub const BUDGET_ENV: &str = "TGAME_STATE_BUDGET";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported formatVersion {0}; this build reads version {FORMAT_VERSION}")]
    Version(u64),
    #[error("expected a {expected} document, found {found}")]
    KindMismatch { expected: DocKind, found: DocKind },
    #[error("invalid {kind} document: {msg}")]
    Invalid { kind: DocKind, msg: String },
    #[error("{BUDGET_ENV} must be a positive integer, got {0:?}")]
    Budget(String),
    #[error("{0}")]
    Game(#[from] crate::game::GameError),
    #[error("terminal: {0}")]
    Terminal(#[from] std::io::Error),
}

/// The budget from [`BUDGET_ENV`], or the library default when unset.
pub fn state_budget() -> Result<usize, IoError> {
    match std::env::var(BUDGET_ENV) {
        Err(_) => Ok(DEFAULT_JOINT_BUDGET),
        Ok(v) => v.trim().parse().ok().filter(|&n: &usize| n > 0).ok_or(IoError::Budget(v)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum DocKind {
    Automaton,
    Lcm,
    Game,
    Play,
    Word,
    Lasso,
    TimerController,
    MonitorController,
}

impl fmt::Display for DocKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("kinds serialize to strings");
        f.write_str(s.as_str().expect("kinds serialize to strings"))
    }
}

/// JSON form of a machine; instructions name their locations and counter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct LcmDoc {
    pub counters: Vec<String>,
    pub initial: String,
    pub instructions: Vec<InstructionDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstructionDoc {
    pub source: String,
    pub op: String,
    pub counter: String,
    pub target: String,
}

impl From<&Lcm> for LcmDoc {
    fn from(m: &Lcm) -> Self {
        LcmDoc {
            counters: m.counters().to_vec(),
            initial: m.locations()[m.initial()].clone(),
            instructions: m
                .instructions()
                .iter()
                .map(|i| InstructionDoc {
                    source: m.locations()[i.source].clone(),
                    op: i.op.keyword().to_string(),
                    counter: m.counters()[i.counter].clone(),
                    target: m.locations()[i.target].clone(),
                })
                .collect(),
        }
    }
}

fn lcm_from_doc(d: &LcmDoc) -> Result<Lcm, String> {
    let mut locations = vec![d.initial.clone()];
    let mut intern = |name: &str| match locations.iter().position(|l| l == name) {
        Some(i) => i,
        None => {
            locations.push(name.to_string());
            locations.len() - 1
        }
    };
    let mut instructions = Vec::new();
    for (n, i) in d.instructions.iter().enumerate() {
        let op = [Op::Inc, Op::Dec, Op::Zt]
            .into_iter()
            .find(|o| o.keyword() == i.op)
            .ok_or_else(|| format!("instructions[{n}].op: unknown operation {:?}", i.op))?;
        let counter = d
            .counters
            .iter()
            .position(|c| *c == i.counter)
            .ok_or_else(|| format!("instructions[{n}].counter: undeclared counter {:?}", i.counter))?;
        let (source, target) = (intern(&i.source), intern(&i.target));
        instructions.push(Instruction { source, op, counter, target });
    }
    Lcm::new(d.counters.clone(), locations, 0, instructions).map_err(|e| e.to_string())
}

/// A lasso word, optionally with the granularity it was sampled at.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LassoDoc {
    pub prefix: Vec<(String, Rat)>,
    #[serde(rename = "loop")]
    pub looped: Vec<(String, Rat)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Rat>,
}

impl LassoDoc {
    pub fn word(&self) -> LassoWord {
        LassoWord::new(self.prefix.clone(), self.looped.clone())
    }
}

#[derive(Debug, Clone)]
pub enum Document {
    Automaton(TimedAutomaton),
    Lcm(Lcm),
    Game(TimedGame),
    Play(Play),
    /// Timestamped letters.
    Word(Vec<(String, Rat)>),
    Lasso(LassoDoc),
    TimerController(TimerController),
    MonitorController(MonitorController),
}

impl Document {
    pub fn kind(&self) -> DocKind {
        match self {
            Document::Automaton(_) => DocKind::Automaton,
            Document::Lcm(_) => DocKind::Lcm,
            Document::Game(_) => DocKind::Game,
            Document::Play(_) => DocKind::Play,
            Document::Word(_) => DocKind::Word,
            Document::Lasso(_) => DocKind::Lasso,
            Document::TimerController(_) => DocKind::TimerController,
            Document::MonitorController(_) => DocKind::MonitorController,
        }
    }
}

/// A parsed document and the non-fatal findings of its validation.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub document: Document,
    pub warnings: Vec<String>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct Header {
    format_version: Option<u64>,
    kind: Option<DocKind>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct Envelope<T> {
    format_version: u64,
    kind: DocKind,
    body: T,
}

fn body<T: DeserializeOwned>(text: &str) -> Result<T, IoError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let env: Envelope<T> = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        IoError::Parse(format!("{} (field {path})", e.into_inner()))
    })?;
    Ok(env.body)
}

fn is_monotone(w: &[(String, Rat)]) -> bool {
    w.windows(2).all(|p| p[0].1 <= p[1].1)
}

fn automaton_warnings(a: &TimedAutomaton) -> Vec<String> {
    let r = validate(a);
    let mut v: Vec<String> = r.unsatisfiable.iter().map(|u| format!("transition {} has unsatisfiable atom {}", u.transition, u.atom)).collect();
    v.extend(r.overlaps.iter().map(|s| format!("overlapping guards at {} on {:?}", s.location, s.letter)));
    v
}

fn lcm_warnings(m: &Lcm) -> Vec<String> {
    let r = m.validate();
    let mut v: Vec<String> = r.branching.iter().map(|l| format!("location {l} has several instructions")).collect();
    v.extend(r.stuck.iter().map(|l| format!("location {l} has no instruction")));
    v.extend(r.unreachable.iter().map(|l| format!("location {l} is unreachable")));
    v
}

/// Parses and validates a document; `expected` rejects other kinds.
pub fn parse_document(text: &str, expected: Option<DocKind>) -> Result<Loaded, IoError> {
    let check = |found: DocKind| match expected {
        Some(e) if e != found => Err(IoError::KindMismatch { expected: e, found }),
        _ => Ok(()),
    };
    if !text.trim_start().starts_with('{') {
        check(DocKind::Lcm)?;
        let m = parse_lcm(text).map_err(|e| IoError::Parse(e.to_string()))?;
        return Ok(Loaded { warnings: lcm_warnings(&m), document: Document::Lcm(m) });
    }
    let header: Header = serde_json::from_str(text).map_err(|e| IoError::Parse(e.to_string()))?;
    let version = header.format_version.ok_or_else(|| IoError::Parse("missing formatVersion".into()))?;
    if version != FORMAT_VERSION {
        return Err(IoError::Version(version));
    }
    let kind = header.kind.ok_or_else(|| IoError::Parse("missing kind".into()))?;
    check(kind)?;
    let invalid = |msg: String| IoError::Invalid { kind, msg };
    let (warnings, document) = match kind {
        DocKind::Automaton => {
            let a = TimedAutomaton::try_from(&body::<AutomatonDoc>(text)?).map_err(|e| invalid(e.to_string()))?;
            (automaton_warnings(&a), Document::Automaton(a))
        }
        DocKind::Lcm => {
            let m = lcm_from_doc(&body(text)?).map_err(invalid)?;
            (lcm_warnings(&m), Document::Lcm(m))
        }
        DocKind::Game => {
            let g = TimedGame::try_from(&body::<GameDoc>(text)?).map_err(|e| invalid(e.to_string()))?;
            (automaton_warnings(&g.condition), Document::Game(g))
        }
        DocKind::Play => {
            let p: Play = body(text)?;
            if !p.is_monotone() {
                return Err(invalid("timestamps decrease".into()));
            }
            if p.loop_start.is_some_and(|s| s >= p.rounds.len()) {
                return Err(invalid("loopStart is past the last round".into()));
            }
            (Vec::new(), Document::Play(p))
        }
        DocKind::Word => {
            let w: Vec<(String, Rat)> = body(text)?;
            if !is_monotone(&w) {
                return Err(invalid("timestamps decrease".into()));
            }
            (Vec::new(), Document::Word(w))
        }
        DocKind::Lasso => {
            let l: LassoDoc = body(text)?;
            if l.looped.is_empty() {
                return Err(invalid("the loop is empty".into()));
            }
            (Vec::new(), Document::Lasso(l))
        }
        DocKind::TimerController => {
            let t: TimerController = body(text)?;
            (Vec::new(), Document::TimerController(t))
        }
        DocKind::MonitorController => {
            let c = MonitorController::from_doc(&body(text)?).map_err(|e| invalid(e.to_string()))?;
            if !validate(c.machine()).deterministic {
                return Err(invalid("a controller must be deterministic".into()));
            }
            (automaton_warnings(c.machine()), Document::MonitorController(c))
        }
    };
    Ok(Loaded { document, warnings })
}

pub fn load_document(path: impl AsRef<Path>, expected: Option<DocKind>) -> Result<Loaded, IoError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read { path: path.display().to_string(), source })?;
    parse_document(&text, expected).map_err(|e| match e {
        IoError::Parse(msg) => IoError::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

fn envelope<T: Serialize>(kind: DocKind, body: T) -> String {
    let env = Envelope { format_version: FORMAT_VERSION, kind, body };
    serde_json::to_string_pretty(&env).expect("documents serialize") + "\n"
}

/// Normalized JSON text of a document.
pub fn render_document(d: &Document) -> String {
    match d {
        Document::Automaton(a) => envelope(d.kind(), AutomatonDoc::from(a)),
        Document::Lcm(m) => envelope(d.kind(), LcmDoc::from(m)),
        Document::Game(g) => envelope(d.kind(), GameDoc::from(g)),
        Document::Play(p) => envelope(d.kind(), p),
        Document::Word(w) => envelope(d.kind(), w),
        Document::Lasso(l) => envelope(d.kind(), l),
        Document::TimerController(t) => envelope(d.kind(), t),
        Document::MonitorController(c) => envelope(d.kind(), c.to_doc()),
    }
}
