//! Round-by-round play between a person at a terminal and a machine agent.

use std::io::{BufRead, Write};

use super::IoError;
use crate::automata::{Acceptance, Simulator};
use crate::exact_time::Rat;
use crate::game::{pair_letter, MonitorStrategy, Play, Player, Round, TimedGame, TimerStrategy};

/// The side the machine plays; the person plays the other one.
pub enum MachineAgent<'a> {
    Timer(Box<dyn TimerStrategy + 'a>),
    Monitor(Box<dyn MonitorStrategy + 'a>),
}

impl MachineAgent<'_> {
    pub fn side(&self) -> Player {
        match self {
            MachineAgent::Timer(_) => Player::Timer,
            MachineAgent::Monitor(_) => Player::Monitor,
        }
    }
}

/// Extra lines shown after each round, computed from Timer's timed word.
pub type Diagnostics<'a> = Box<dyn Fn(&[(String, Rat)]) -> Vec<String> + 'a>;

/// Resolves a letter typed by name or by its 1-based index in `alphabet`.
fn pick<'a>(alphabet: &'a [String], typed: &str) -> Option<&'a String> {
    alphabet
        .iter()
        .find(|l| *l == typed)
        .or_else(|| typed.parse::<usize>().ok().and_then(|i| i.checked_sub(1)).and_then(|i| alphabet.get(i)))
}

fn list(out: &mut impl Write, who: &str, alphabet: &[String]) -> std::io::Result<()> {
    writeln!(out, "{who} letters:")?;
    for (i, l) in alphabet.iter().enumerate() {
        writeln!(out, "  {:>2}  {l}", i + 1)?;
    }
    Ok(())
}

/// Reads a non-empty line; `None` on end of input or `quit`.
fn read_command(input: &mut impl BufRead, out: &mut impl Write, prompt: &str) -> Result<Option<String>, IoError> {
    loop {
        write!(out, "{prompt}")?;
        out.flush()?;
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            return Ok(None);
        }
        match line.trim() {
            "" => continue,
            "quit" | "q" => return Ok(None),
            s => return Ok(Some(s.to_string())),
        }
    }
}

/// Plays until the person quits or `max_rounds` is reached and returns the
/// transcript. Malformed input is re-prompted; a quit in the middle of a
/// round drops that round.
pub fn repl_play(
    g: &TimedGame,
    mut machine: MachineAgent<'_>,
    diagnostics: Option<Diagnostics<'_>>,
    max_rounds: Option<usize>,
    input: &mut impl BufRead,
    out: &mut impl Write,
) -> Result<Play, IoError> {
    let human = machine.side().opponent();
    writeln!(out, "You play {human}; {} owns the condition. Type quit to stop.", g.owner)?;
    match human {
        Player::Timer => list(out, "Timer", &g.timer_alphabet)?,
        Player::Monitor => list(out, "Monitor", &g.monitor_alphabet)?,
    }
    let mut sim = Simulator::new(&g.condition);
    let mut play = Play::default();
    let mut timer_word: Vec<(String, Rat)> = Vec::new();
    let mut monitor_word: Vec<String> = Vec::new();
    let mut now = Rat::zero();
    while max_rounds.map_or(true, |n| play.rounds.len() < n) {
        let round = play.rounds.len() + 1;
        let (t, m, time) = match &mut machine {
            MachineAgent::Monitor(strategy) => {
                let prompt = format!("round {round} timer (letter delay)> ");
                let Some((letter, time)) = read_timer_move(g, input, out, &prompt, &now)? else { break };
                timer_word.push((letter.clone(), time.clone()));
                let answer = strategy.answer(&timer_word)?;
                writeln!(out, "  Monitor answers {answer}")?;
                (letter, answer, time)
            }
            MachineAgent::Timer(strategy) => {
                let mv = strategy.next_move(&monitor_word);
                let time = &now + &mv.delay;
                writeln!(out, "round {round}: Timer plays {} at time {time}", mv.letter)?;
                let prompt = format!("round {round} monitor> ");
                let Some(answer) = read_monitor_letter(g, input, out, &prompt)? else { break };
                timer_word.push((mv.letter.clone(), time.clone()));
                (mv.letter, answer, time)
            }
        };
        now = time.clone();
        sim.step_at(&pair_letter(&t, &m), &time).map_err(crate::game::GameError::from)?;
        monitor_word.push(m.clone());
        play.rounds.push(Round { timer: t, monitor: m, time });
        match g.condition.acceptance() {
            Acceptance::Reach if sim.won() => writeln!(out, "  prefix in the winning condition: {} wins", g.owner)?,
            Acceptance::Reach => writeln!(out, "  condition open")?,
            Acceptance::Buchi if sim.ends_accepting() => writeln!(out, "  condition automaton may be accepting here")?,
            Acceptance::Buchi => writeln!(out, "  no accepting location reached on this round")?,
        }
        if let Some(d) = &diagnostics {
            for line in d(&timer_word) {
                writeln!(out, "  {line}")?;
            }
        }
    }
    writeln!(out, "transcript: {} rounds", play.rounds.len())?;
    Ok(play)
}

fn read_timer_move(
    g: &TimedGame,
    input: &mut impl BufRead,
    out: &mut impl Write,
    prompt: &str,
    now: &Rat,
) -> Result<Option<(String, Rat)>, IoError> {
    loop {
        let Some(line) = read_command(input, out, prompt)? else { return Ok(None) };
        // letters may contain spaces, so the delay is the last word
        let Some((typed, delay)) = line.rsplit_once(char::is_whitespace) else {
            writeln!(out, "  ? enter a letter and a delay such as 1/2")?;
            continue;
        };
        let Some(letter) = pick(&g.timer_alphabet, typed.trim()) else {
            writeln!(out, "  ? unknown Timer letter {:?}", typed.trim())?;
            continue;
        };
        match delay.parse::<Rat>() {
            Ok(d) => return Ok(Some((letter.clone(), now + &d))),
            Err(e) => writeln!(out, "  ? bad delay: {e}")?,
        }
    }
}

fn read_monitor_letter(
    g: &TimedGame,
    input: &mut impl BufRead,
    out: &mut impl Write,
    prompt: &str,
) -> Result<Option<String>, IoError> {
    loop {
        let Some(line) = read_command(input, out, prompt)? else { return Ok(None) };
        match pick(&g.monitor_alphabet, &line) {
            Some(l) => return Ok(Some(l.clone())),
            None => writeln!(out, "  ? unknown Monitor letter {line:?}")?,
        }
    }
}
