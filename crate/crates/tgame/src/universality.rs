//! Universality of a timed language as a game Monitor wins by saying
//! nothing, and a bounded search for lasso words outside the language.

use std::collections::HashMap;

use crate::automata::{accepts_buchi_lasso, accepts_reach_lasso, remap_alphabet, Acceptance, AutomatonError, LassoWord, TimedAutomaton};
use crate::exact_time::Rat;
use crate::game::{pair_alphabet, pair_letter, GameError, MonitorController, Player, TimedGame, TimerController, TimerMove};

/// Monitor's only letter.
pub const SILENT: &str = "☐";

/// A lasso whose delays are all multiples of `delta`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledWord {
    pub word: LassoWord,
    pub delta: Rat,
}

impl SampledWord {
    pub fn new(word: LassoWord, delta: Rat) -> Option<Self> {
        let sampled = word.prefix.iter().chain(&word.looped).all(|(_, d)| is_multiple(d, &delta));
        (delta > Rat::zero() && sampled).then_some(SampledWord { word, delta })
    }
}

pub fn is_multiple(t: &Rat, delta: &Rat) -> bool {
    (t.as_big() / delta.as_big()).is_integer()
}

#[derive(Debug, Clone)]
pub struct UniversalityGame {
    pub game: TimedGame,
    /// Answers `☐` to everything; it wins iff the language is universal.
    pub trivial_monitor: MonitorController,
}

/// Monitor owns the input language read through the Timer letters.
pub fn build_universality_game(a: &TimedAutomaton) -> Result<UniversalityGame, GameError> {
    let pairs = pair_alphabet(a.alphabet(), &[SILENT]);
    let mapping: HashMap<String, String> = a.alphabet().iter().map(|t| (pair_letter(t, SILENT), t.clone())).collect();
    let condition = remap_alphabet(a, &pairs, &mapping)?;
    let game = TimedGame::new(a.alphabet().to_vec(), vec![SILENT.into()], condition, Player::Monitor, Player::Monitor)?;
    Ok(UniversalityGame { game, trivial_monitor: MonitorController::constant(SILENT, a.alphabet()) })
}

fn accepts(a: &TimedAutomaton, w: &LassoWord, budget: usize) -> Result<bool, AutomatonError> {
    match a.acceptance() {
        Acceptance::Buchi => accepts_buchi_lasso(a, w, budget),
        Acceptance::Reach => accepts_reach_lasso(a, w, budget),
    }
}

/// Every vector of length `n` over `0..base`, in lexicographic order.
fn vectors(n: usize, base: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = base.checked_pow(n as u32).expect("enumeration size fits in usize");
    (0..total).map(move |mut code| {
        let mut v = vec![0; n];
        for slot in v.iter_mut().rev() {
            *slot = code % base;
            code /= base;
        }
        v
    })
}

/// First lasso rejected by `a` with delays in `{0, δ, …}` up to one step
/// past the largest constant, by loop length, then prefix length, then
/// delay vector, then letters. Loops must let time pass.
pub fn search_nonmember_lasso(
    a: &TimedAutomaton,
    delta: &Rat,
    max_prefix: usize,
    max_loop: usize,
    budget: usize,
) -> Result<Option<SampledWord>, AutomatonError> {
    assert!(delta > &Rat::zero(), "granularity must be positive");
    let horizon = Rat::int(a.max_constant() + 1);
    let mut delays = vec![Rat::zero()];
    while delays.last().expect("nonempty") < &horizon {
        let next = delays.last().expect("nonempty") + delta;
        delays.push(next);
    }
    let letters = a.alphabet();
    for l in 1..=max_loop {
        for p in 0..=max_prefix {
            let n = p + l;
            for dv in vectors(n, delays.len()) {
                if dv[p..].iter().all(|&d| d == 0) {
                    continue;
                }
                for lv in vectors(n, letters.len()) {
                    let pairs: Vec<(String, Rat)> =
                        (0..n).map(|i| (letters[lv[i]].clone(), delays[dv[i]].clone())).collect();
                    let w = LassoWord::new(pairs[..p].to_vec(), pairs[p..].to_vec());
                    if !accepts(a, &w, budget)? {
                        return Ok(Some(SampledWord { word: w, delta: delta.clone() }));
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Plays the lasso's letters and delays whatever Monitor answers.
pub fn timer_controller_from_lasso<S: AsRef<str>>(w: &SampledWord, monitor_alphabet: &[S]) -> TimerController {
    let moves: Vec<TimerMove> =
        w.word.prefix.iter().chain(&w.word.looped).map(|(l, d)| TimerMove::new(l.clone(), d.clone())).collect();
    let p = w.word.prefix.len();
    let next = |i: usize| if i + 1 < moves.len() { i + 1 } else { p };
    let edges = (0..moves.len())
        .flat_map(|i| monitor_alphabet.iter().map(move |m| (i, m.as_ref().to_string())))
        .map(|(i, m)| (i, m, next(i), moves[next(i)].clone()))
        .collect();
    let states = (0..moves.len()).map(|i| format!("q{i}")).collect();
    TimerController::new(states, 0, moves[0].clone(), edges).expect("lasso controller is total")
}
