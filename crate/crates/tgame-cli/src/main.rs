use std::io;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use tgame::automata::{accepts_buchi_lasso, accepts_reach_lasso, to_dot, validate, Acceptance, Simulator, TimedAutomaton};
use tgame::bounded_reduction::{
    activity, bounded_game, build_win, even_pool, falsify_controller, honest_timer, rule_oracles, summarize_guards,
    synthesize_monitor_controller,
};
use tgame::buchi_reduction::{build_w, enc_timed_midpoint, local_status, recurrence_game, timer_lasso_controller, MonitorOracle};
use tgame::exact_time::Rat;
use tgame::game::{MonitorController, Play, TimedGame, TimerController};
use tgame::io::repl::{repl_play, Diagnostics, MachineAgent};
use tgame::io::{load_document, render_document, state_budget, DocKind, Document, LassoDoc};
use tgame::lcm::{find_lasso, free_test_run, Lcm};
use tgame::universality::search_nonmember_lasso;
use tgame::witness::{falsify_witness_controller, survival_run, AgentController, WitnessKind};

/// Timed games between Timer and Monitor: build, check, synthesize, falsify and play.
#[derive(Parser)]
#[command(name = "tgame", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Load and validate any document; print its findings.
    Validate {
        file: PathBuf,
        /// Print the automaton (or game condition, or controller) as DOT instead.
        #[arg(long)]
        dot: bool,
    },
    /// Run an automaton over a word document, or decide a lasso document.
    Simulate { automaton: PathBuf, input: PathBuf },
    /// The recurrence condition of a machine for location LOC, as an automaton document.
    BuildW {
        lcm: PathBuf,
        loc: String,
        #[arg(long)]
        dot: bool,
        /// Emit the whole game document instead of the condition.
        #[arg(long)]
        game: bool,
    },
    /// The boundedness winning condition of a machine.
    BuildWin {
        lcm: PathBuf,
        #[arg(long)]
        dot: bool,
        #[arg(long)]
        game: bool,
    },
    /// Monitor controller for a machine bounded by K.
    SynthMonitor {
        lcm: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Search for a play the Monitor controller loses on the boundedness game.
    Falsify {
        controller: PathBuf,
        lcm: PathBuf,
        #[arg(long)]
        target: u64,
        #[arg(long, default_value_t = 200)]
        max_steps: usize,
    },
    /// Timed encoding of a run: a lasso Timer controller, or a word for a free-test prefix.
    EncodeRun {
        lcm: PathBuf,
        /// Emit Timer's controller for a lasso through LOC.
        #[arg(long)]
        lasso: bool,
        #[arg(long, default_value_t = 1)]
        k: u64,
        /// Recurring location (defaults to the initial one).
        #[arg(long)]
        loc: Option<String>,
        /// Counter cap of the lasso search.
        #[arg(long, default_value_t = 4)]
        cap: u64,
        /// Length of the free-test prefix when no lasso is asked for.
        #[arg(long, default_value_t = 8)]
        steps: usize,
    },
    /// Local-check verdicts on every prefix of a word.
    CheckLocal {
        word: PathBuf,
        #[arg(long)]
        lcm: PathBuf,
    },
    /// Search for a sampled lasso outside an automaton's language.
    UniversalitySearch {
        automaton: PathBuf,
        #[arg(long)]
        delta: Rat,
        #[arg(long, default_value_t = 2)]
        max_prefix: usize,
        #[arg(long, default_value_t = 2)]
        max_loop: usize,
    },
    /// Games whose agent wins only with infinite memory.
    Witness {
        kind: WitnessKind,
        /// Print the winning strategy's run against a fixed opponent.
        #[arg(long)]
        demo: bool,
        /// Defeat this controller of the agent.
        #[arg(long)]
        controller: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        rounds: usize,
    },
    /// Play a game interactively against a controller or a built-in agent.
    Play {
        /// A game document, or a machine for a reduction game.
        source: PathBuf,
        #[arg(long, value_enum, default_value_t = Side::Timer)]
        human: Side,
        /// Reduction to build when SOURCE is a machine.
        #[arg(long, value_enum, default_value_t = Reduction::Bounded)]
        reduction: Reduction,
        /// Recurring location of the recurrence game.
        #[arg(long)]
        loc: Option<String>,
        /// Controller for the machine side; built-in agents are used otherwise.
        #[arg(long)]
        controller: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        k: u64,
        #[arg(long)]
        rounds: Option<usize>,
        /// Write the transcript as a play document.
        #[arg(long)]
        save: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    Timer,
    Monitor,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Reduction {
    Bounded,
    Recurrence,
}

fn load(path: &Path, kind: Option<DocKind>) -> Result<Document> {
    let loaded = load_document(path, kind)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    Ok(loaded.document)
}

fn load_lcm(path: &Path) -> Result<Lcm> {
    match load(path, Some(DocKind::Lcm))? {
        Document::Lcm(m) => Ok(m),
        _ => unreachable!("kind checked by the loader"),
    }
}

fn load_automaton(path: &Path) -> Result<TimedAutomaton> {
    match load(path, Some(DocKind::Automaton))? {
        Document::Automaton(a) => Ok(a),
        _ => unreachable!("kind checked by the loader"),
    }
}

fn location(m: &Lcm, name: Option<&str>) -> Result<usize> {
    match name {
        None => Ok(m.initial()),
        Some(n) => m.location_id(n).ok_or_else(|| anyhow!("machine has no location {n:?}")),
    }
}

fn emit_automaton(a: &TimedAutomaton, dot: bool) {
    if dot {
        print!("{}", to_dot(a));
    } else {
        print!("{}", render_document(&Document::Automaton(a.clone())));
    }
}

fn emit_condition(g: TimedGame, dot: bool, game: bool) {
    if game && !dot {
        print!("{}", render_document(&Document::Game(g)));
    } else {
        emit_automaton(&g.condition, dot);
    }
}

fn describe(d: &Document) -> Result<()> {
    match d {
        Document::Automaton(a) => println!("{}", serde_json::to_string_pretty(&validate(a))?),
        Document::Game(g) => {
            println!("game: owner {}, agent {}, {} Timer and {} Monitor letters", g.owner, g.agent, g.timer_alphabet.len(), g.monitor_alphabet.len());
            println!("{}", serde_json::to_string_pretty(&validate(&g.condition))?);
        }
        Document::MonitorController(c) => println!("{}", serde_json::to_string_pretty(&validate(c.machine()))?),
        Document::Lcm(m) => println!("{}", serde_json::to_string_pretty(&m.validate())?),
        Document::Play(p) => print!("{p}"),
        Document::Word(w) => println!("word of {} letters", w.len()),
        Document::Lasso(l) => println!("lasso: prefix {}, loop {}", l.prefix.len(), l.looped.len()),
        Document::TimerController(t) => println!("timer controller with {} states", t.states().len()),
    }
    Ok(())
}

fn run(cmd: Cmd) -> Result<()> {
    let budget = state_budget()?;
    match cmd {
        Cmd::Validate { file, dot } => {
            let d = load(&file, None)?;
            if dot {
                match &d {
                    Document::Automaton(a) => print!("{}", to_dot(a)),
                    Document::Game(g) => print!("{}", to_dot(&g.condition)),
                    Document::MonitorController(c) => print!("{}", to_dot(c.machine())),
                    other => bail!("no DOT form for a {} document", other.kind()),
                }
            } else {
                println!("ok: {} document", d.kind());
                describe(&d)?;
            }
        }
        Cmd::Simulate { automaton, input } => {
            let a = load_automaton(&automaton)?;
            match load(&input, None)? {
                Document::Word(w) => {
                    let mut sim = Simulator::new(&a);
                    for (i, (l, t)) in w.iter().enumerate() {
                        sim.step_at(l, t)?;
                        println!("{:>4}  {t:>8}  {l}  configs={} won={}", i + 1, sim.configs().len(), sim.won());
                    }
                    println!("endsAccepting={} won={}", sim.ends_accepting(), sim.won());
                }
                Document::Lasso(l) => {
                    let accepted = match a.acceptance() {
                        Acceptance::Buchi => accepts_buchi_lasso(&a, &l.word(), budget)?,
                        Acceptance::Reach => accepts_reach_lasso(&a, &l.word(), budget)?,
                    };
                    println!("accepted={accepted}");
                }
                other => bail!("simulate reads a word or lasso document, not a {}", other.kind()),
            }
        }
        Cmd::BuildW { lcm, loc, dot, game } => {
            let m = load_lcm(&lcm)?;
            let s = location(&m, Some(&loc))?;
            if game {
                emit_condition(recurrence_game(&m, s)?, dot, true);
            } else {
                emit_automaton(&build_w(&m, s)?, dot);
            }
        }
        Cmd::BuildWin { lcm, dot, game } => {
            let m = load_lcm(&lcm)?;
            if game {
                emit_condition(bounded_game(&m)?, dot, true);
            } else {
                emit_automaton(&build_win(&m)?, dot);
            }
        }
        Cmd::SynthMonitor { lcm, k } => {
            let m = load_lcm(&lcm)?;
            print!("{}", render_document(&Document::MonitorController(synthesize_monitor_controller(&m, k)?)));
        }
        Cmd::Falsify { controller, lcm, target, max_steps } => {
            let Document::MonitorController(c) = load(&controller, Some(DocKind::MonitorController))? else { unreachable!() };
            let m = load_lcm(&lcm)?;
            match falsify_controller(&c, &summarize_guards(&c), &m, target, max_steps)? {
                Some(p) => print!("{}", render_document(&Document::Play(p))),
                None => println!("none"),
            }
        }
        Cmd::EncodeRun { lcm, lasso, k, loc, cap, steps } => {
            let m = load_lcm(&lcm)?;
            if lasso {
                let s = location(&m, loc.as_deref())?;
                match find_lasso(&m, s, cap) {
                    Some(l) => print!("{}", render_document(&Document::TimerController(timer_lasso_controller(&m, &l, k)?))),
                    None => println!("none"),
                }
            } else {
                let w = enc_timed_midpoint(&m, &free_test_run(&m, steps))?;
                print!("{}", render_document(&Document::Word(w)));
            }
        }
        Cmd::CheckLocal { word, lcm } => {
            let m = load_lcm(&lcm)?;
            let Document::Word(w) = load(&word, Some(DocKind::Word))? else { unreachable!() };
            println!("{:>4}  {:>8}  {:<24} reg   a     b     c", "n", "time", "letter");
            for n in 1..=w.len() {
                let s = local_status(&m, &w[..n])?;
                let c = s.c.map_or("-".to_string(), |c| c.to_string());
                println!("{n:>4}  {:>8}  {:<24} {:<5} {:<5} {:<5} {c}", w[n - 1].1.to_string(), w[n - 1].0, s.reg, s.a, s.b);
            }
        }
        Cmd::UniversalitySearch { automaton, delta, max_prefix, max_loop } => {
            let a = load_automaton(&automaton)?;
            if delta <= Rat::zero() {
                bail!("--delta must be positive");
            }
            match search_nonmember_lasso(&a, &delta, max_prefix, max_loop, budget)? {
                Some(w) => print!(
                    "{}",
                    render_document(&Document::Lasso(LassoDoc { prefix: w.word.prefix, looped: w.word.looped, delta: Some(w.delta) }))
                ),
                None => println!("none"),
            }
        }
        Cmd::Witness { kind, demo, controller, rounds } => {
            if !demo && controller.is_none() {
                bail!("give --demo, --controller <file>, or both");
            }
            if demo {
                println!("{kind}: agent {} against a fixed opponent", kind.agent());
                print!("{}", survival_run(kind, rounds)?);
            }
            if let Some(path) = controller {
                let ctrl = match load(&path, None)? {
                    Document::MonitorController(c) => AgentController::Monitor(c),
                    Document::TimerController(t) => AgentController::Timer(t),
                    other => bail!("expected a controller document, found {}", other.kind()),
                };
                match falsify_witness_controller(kind, &ctrl)? {
                    Some(p) => {
                        println!("defeating play:");
                        print!("{p}");
                    }
                    None => println!("none"),
                }
            }
        }
        Cmd::Play { source, human, reduction, loc, controller, k, rounds, save } => {
            let transcript = play(&source, human, reduction, loc.as_deref(), controller.as_deref(), k, rounds)?;
            if let Some(path) = save {
                std::fs::write(&path, render_document(&Document::Play(transcript)))
                    .with_context(|| format!("writing {}", path.display()))?;
            }
        }
    }
    Ok(())
}

fn load_timer(path: &Path) -> Result<TimerController> {
    match load(path, Some(DocKind::TimerController))? {
        Document::TimerController(t) => Ok(t),
        _ => unreachable!("kind checked by the loader"),
    }
}

fn load_monitor(path: &Path) -> Result<MonitorController> {
    match load(path, Some(DocKind::MonitorController))? {
        Document::MonitorController(c) => Ok(c),
        _ => unreachable!("kind checked by the loader"),
    }
}

fn interact(g: &TimedGame, machine: MachineAgent<'_>, diagnostics: Option<Diagnostics<'_>>, rounds: Option<usize>) -> Result<Play> {
    let stdin = io::stdin();
    let mut input = stdin.lock();
    let mut out = io::stdout().lock();
    Ok(repl_play(g, machine, diagnostics, rounds, &mut input, &mut out)?)
}

fn play(
    source: &Path,
    human: Side,
    reduction: Reduction,
    loc: Option<&str>,
    controller: Option<&Path>,
    k: u64,
    rounds: Option<usize>,
) -> Result<Play> {
    let (timer_ctrl, monitor_ctrl) = match (human, controller) {
        (Side::Timer, Some(p)) => (None, Some(load_monitor(p)?)),
        (Side::Monitor, Some(p)) => (Some(load_timer(p)?), None),
        _ => (None, None),
    };
    let doc = load(source, None)?;
    let m = match doc {
        Document::Game(g) => {
            let machine = match (&timer_ctrl, &monitor_ctrl) {
                (Some(t), _) => MachineAgent::Timer(Box::new(t.runner())),
                (_, Some(c)) => MachineAgent::Monitor(Box::new(c.runner())),
                _ => bail!("a game document needs --controller for the machine side"),
            };
            return interact(&g, machine, None, rounds);
        }
        Document::Lcm(m) => m,
        other => bail!("play reads a game or a machine, not a {}", other.kind()),
    };
    match reduction {
        Reduction::Bounded => {
            let g = bounded_game(&m)?;
            let synthesized;
            let honest;
            let machine = match (human, &timer_ctrl, &monitor_ctrl) {
                (Side::Monitor, Some(t), _) => MachineAgent::Timer(Box::new(t.runner())),
                (Side::Monitor, None, _) => {
                    let pool = even_pool(k as usize + 1);
                    honest = honest_timer(&m, &free_test_run(&m, 500), &pool)?;
                    MachineAgent::Timer(Box::new(honest))
                }
                (Side::Timer, _, Some(c)) => MachineAgent::Monitor(Box::new(c.runner())),
                (Side::Timer, _, None) => {
                    synthesized = synthesize_monitor_controller(&m, k as usize)?;
                    MachineAgent::Monitor(Box::new(synthesized.runner()))
                }
            };
            let m2 = m.clone();
            let diag: Diagnostics<'_> = Box::new(move |w: &[(String, Rat)]| bounded_diagnostics(&m2, w));
            interact(&g, machine, Some(diag), rounds)
        }
        Reduction::Recurrence => {
            let s = location(&m, loc)?;
            let g = recurrence_game(&m, s)?;
            let lasso_ctrl;
            let machine = match (human, &timer_ctrl, &monitor_ctrl) {
                (Side::Monitor, Some(t), _) => MachineAgent::Timer(Box::new(t.runner())),
                (Side::Monitor, None, _) => {
                    let l = find_lasso(&m, s, k.max(1)).ok_or_else(|| anyhow!("no lasso through the location within cap {k}"))?;
                    lasso_ctrl = timer_lasso_controller(&m, &l, k)?;
                    MachineAgent::Timer(Box::new(lasso_ctrl.runner()))
                }
                (Side::Timer, _, Some(c)) => MachineAgent::Monitor(Box::new(c.runner())),
                (Side::Timer, _, None) => MachineAgent::Monitor(Box::new(MonitorOracle::new(&m))),
            };
            let diag: Diagnostics<'_> = Box::new(|w: &[(String, Rat)]| match local_status(&m, w) {
                Ok(s) => vec![format!("local checks: reg={} a={} b={} c={}", s.reg, s.a, s.b, s.c.map_or("-".into(), |c| c.to_string()))],
                Err(e) => vec![format!("local checks unavailable: {e}")],
            });
            interact(&g, machine, Some(diag), rounds)
        }
    }
}

fn bounded_diagnostics(m: &Lcm, w: &[(String, Rat)]) -> Vec<String> {
    let mut lines = Vec::new();
    match rule_oracles(m, w) {
        Ok(s) => lines.push(format!(
            "rules: reg={} err1={} ok1={} err2={} ok2={}  (error={} ok={})",
            s.reg, s.err1, s.ok1, s.err2, s.ok2, s.err(), s.ok()
        )),
        Err(e) => lines.push(format!("rules unavailable: {e}")),
    }
    if let Ok(act) = activity(m, w) {
        let pool: Vec<String> = act.pool.iter().map(ToString::to_string).collect();
        lines.push(format!("pool: {{{}}}", pool.join(", ")));
        for (c, name) in m.counters().iter().enumerate() {
            let active: Vec<String> = act.active(c).map(ToString::to_string).collect();
            lines.push(format!("active {name}: {{{}}}", active.join(", ")));
        }
    }
    lines
}

fn main() -> ExitCode {
    match run(Cli::parse().cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
