use std::collections::HashMap;

use super::{GameError, MonitorController, MonitorStrategy, Play, Player, Round, TimedGame, TimerController, TimerStrategy, Verdict};
use crate::automata::{accepts_buchi_lasso, accepts_reach_lasso, Acceptance, Config, Simulator};
use crate::exact_time::Rat;

/// Default bound on distinct joint states explored by [`run_lasso`].
pub const DEFAULT_JOINT_BUDGET: usize = 1_000_000;

fn check_letter(g: &TimedGame, round: usize, player: Player, letter: &str) -> Result<(), GameError> {
    let alphabet = match player {
        Player::Timer => &g.timer_alphabet,
        Player::Monitor => &g.monitor_alphabet,
    };
    if alphabet.iter().any(|l| l == letter) {
        Ok(())
    } else {
        Err(GameError::IllegalLetter { round, player, letter: letter.to_string() })
    }
}

pub fn run_play(
    g: &TimedGame,
    timer: &mut dyn TimerStrategy,
    monitor: &mut dyn MonitorStrategy,
    horizon: usize,
) -> Result<Play, GameError> {
    let mut monitor_history: Vec<String> = Vec::with_capacity(horizon);
    let mut timer_history: Vec<(String, Rat)> = Vec::with_capacity(horizon);
    let mut rounds = Vec::with_capacity(horizon);
    let mut now = Rat::zero();
    for round in 1..=horizon {
        let mv = timer.next_move(&monitor_history);
        check_letter(g, round, Player::Timer, &mv.letter)?;
        now = &now + &mv.delay;
        timer_history.push((mv.letter.clone(), now.clone()));
        let m = monitor.answer(&timer_history)?;
        check_letter(g, round, Player::Monitor, &m)?;
        monitor_history.push(m.clone());
        rounds.push(Round { timer: mv.letter, monitor: m, time: now.clone() });
    }
    Ok(Play { rounds, loop_start: None })
}

/// Plays two finite-state agents until their joint state repeats.
pub fn run_lasso(
    g: &TimedGame,
    timer: &TimerController,
    monitor: &MonitorController,
    budget: usize,
) -> Result<Play, GameError> {
    let mut seen: HashMap<(usize, super::TimerMove, Config), usize> = HashMap::new();
    let mut state = timer.initial_state();
    let mut mv = timer.initial_move().clone();
    let mut config = monitor.initial_config();
    let mut rounds = Vec::new();
    let mut now = Rat::zero();
    loop {
        let key = (state, mv.clone(), config.clone());
        if let Some(&start) = seen.get(&key) {
            return Ok(Play { rounds, loop_start: Some(start) });
        }
        if seen.len() >= budget {
            return Err(GameError::BudgetExhausted(budget));
        }
        let round = rounds.len() + 1;
        seen.insert(key, rounds.len());
        check_letter(g, round, Player::Timer, &mv.letter)?;
        let (c2, out) = monitor
            .step(&config, &mv.letter, &mv.delay)
            .map_err(|enabled| GameError::Determinism { round, enabled })?;
        check_letter(g, round, Player::Monitor, &out)?;
        now = &now + &mv.delay;
        rounds.push(Round { timer: mv.letter.clone(), monitor: out.clone(), time: now.clone() });
        let (s2, next) = timer
            .step(state, &out)
            .ok_or_else(|| GameError::Setup(format!("timer controller has no move on {out:?}")))?;
        state = s2;
        mv = next.clone();
        config = c2;
    }
}

/// Owner wins iff the play belongs to the winning condition's language.
pub fn adjudicate(g: &TimedGame, p: &Play, budget: usize) -> Result<Verdict, GameError> {
    let accepted = match (g.condition.acceptance(), p.to_lasso()) {
        (Acceptance::Reach, None) => {
            let mut sim = Simulator::new(&g.condition);
            for (l, t) in p.word() {
                sim.step_at(&l, &t)?;
                if sim.won() {
                    return Ok(Verdict::OwnerWins);
                }
            }
            return Ok(if sim.won() { Verdict::OwnerWins } else { Verdict::OpenAtHorizon });
        }
        (Acceptance::Reach, Some(w)) => accepts_reach_lasso(&g.condition, &w, budget)?,
        (Acceptance::Buchi, Some(w)) => accepts_buchi_lasso(&g.condition, &w, budget)?,
        (Acceptance::Buchi, None) => return Err(GameError::NeedsLasso),
    };
    Ok(if accepted { Verdict::OwnerWins } else { Verdict::OpponentWins })
}
