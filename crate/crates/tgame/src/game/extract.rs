use std::collections::VecDeque;

use super::{pair_letter, GameError, Player, TimedGame, TimerController, TimerMove, TimerStrategy};
use crate::automata::Simulator;
use crate::exact_time::Rat;

#[derive(Debug, Clone)]
pub enum Extraction {
    /// Every branch was won within `depth` rounds.
    Controller { controller: TimerController, depth: usize },
    Inconclusive { open_branches: usize },
}

/// Folds the tree of plays conforming to `sigma`, branching over every
/// Monitor letter, into a controller whose states are the open histories.
/// Once a prefix is won the controller returns to its initial state and
/// plays a fixed default move.
pub fn extract_timer_controller(
    g: &TimedGame,
    sigma: &mut dyn TimerStrategy,
    depth_limit: usize,
) -> Result<Extraction, GameError> {
    if g.owner != Player::Timer || g.agent != Player::Timer {
        return Err(GameError::Setup("extraction needs a game owned and played by Timer".into()));
    }
    if !g.is_reach() {
        return Err(GameError::Setup("extraction needs a reach condition".into()));
    }
    let default = TimerMove::new(g.timer_alphabet[0].clone(), Rat::one());
    let root = Simulator::new(&g.condition);
    if root.won() {
        let c = TimerController::constant(default, &g.monitor_alphabet);
        return Ok(Extraction::Controller { controller: c, depth: 0 });
    }

    // open nodes: (Monitor history, move played there, simulator before that move)
    let mut nodes: Vec<(Vec<String>, TimerMove)> = Vec::new();
    let mut children: Vec<Vec<Option<usize>>> = Vec::new();
    let mut queue = VecDeque::new();
    queue.push_back((Vec::<String>::new(), root));
    let mut depth = 0;
    let mut open_leaves = 0;
    while let Some((h, sim)) = queue.pop_front() {
        let id = nodes.len();
        let mv = sigma.next_move(&h);
        if !g.timer_alphabet.contains(&mv.letter) {
            return Err(GameError::IllegalLetter { round: h.len() + 1, player: Player::Timer, letter: mv.letter });
        }
        let mut kids = Vec::with_capacity(g.monitor_alphabet.len());
        for m in &g.monitor_alphabet {
            let mut s = sim.clone();
            s.step_delay(&pair_letter(&mv.letter, m), &mv.delay);
            if s.won() {
                depth = depth.max(h.len() + 1);
                kids.push(None);
            } else if h.len() + 1 >= depth_limit {
                open_leaves += 1;
                kids.push(None);
            } else {
                let mut h2 = h.clone();
                h2.push(m.clone());
                // children get ids in queue order after all current nodes
                kids.push(Some(id + queue.len() + 1));
                queue.push_back((h2, s));
            }
        }
        nodes.push((h, mv));
        children.push(kids);
    }
    if open_leaves > 0 {
        return Ok(Extraction::Inconclusive { open_branches: open_leaves });
    }

    let name = |h: &[String]| if h.is_empty() { "ε".to_string() } else { h.join("·") };
    let states = nodes.iter().map(|(h, _)| name(h)).collect();
    let mut edges = Vec::new();
    for (i, kids) in children.iter().enumerate() {
        for (m, kid) in g.monitor_alphabet.iter().zip(kids) {
            match kid {
                Some(j) => edges.push((i, m.clone(), *j, nodes[*j].1.clone())),
                None => edges.push((i, m.clone(), 0, default.clone())),
            }
        }
    }
    let controller = TimerController::new(states, 0, nodes[0].1.clone(), edges)?;
    Ok(Extraction::Controller { controller, depth })
}
