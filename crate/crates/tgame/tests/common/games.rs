//! Two small reach games owned by Timer and an exhaustive branch checker.

use tgame::automata::{Acceptance, AutomatonBuilder, Guard, Rel, ResetMode};
use tgame::exact_time::Rat;
use tgame::game::{adjudicate, pair_alphabet, pair_letter, run_play, Player, TimedGame, TimerController, Verdict, DEFAULT_JOINT_BUDGET};

pub const T: [&str; 2] = ["a", "b"];
pub const M: [&str; 2] = ["x", "y"];

pub fn strings(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

/// Timer wins iff the first round happens at time 1 or later.
pub fn first_time_at_least_one() -> TimedGame {
    let letters = pair_alphabet(&T, &M);
    let mut b = AutomatonBuilder::new(&letters, ResetMode::Standard, Acceptance::Reach);
    let c = b.clock("c");
    let q = b.initial_location("q");
    let f = b.accepting_location("f");
    let dead = b.location("dead");
    b.edges(q, &letters, &Guard::atom(c, Rel::Ge, 1), &[], f);
    b.edges(q, &letters, &Guard::atom(c, Rel::Lt, 1), &[], dead);
    TimedGame::new(strings(&T), strings(&M), b.build().unwrap(), Player::Timer, Player::Timer).unwrap()
}

/// Timer wins once some Timer letter recurs exactly one time unit later.
pub fn repeat_one_apart() -> TimedGame {
    let letters = pair_alphabet(&T, &M);
    let mut b = AutomatonBuilder::new(&letters, ResetMode::Standard, Acceptance::Reach);
    let c = b.clock("c");
    let q = b.initial_location("q");
    let f = b.accepting_location("f");
    b.edges(q, &letters, &Guard::top(), &[], q);
    for t in T {
        let mark = b.location(format!("saw {t}"));
        let same: Vec<String> = M.iter().map(|m| pair_letter(t, m)).collect();
        b.edges(q, &same, &Guard::top(), &[c], mark);
        // other letters may share the hit time, so the wait includes c = 1
        b.edges(mark, &letters, &Guard::atom(c, Rel::Le, 1), &[], mark);
        b.edges(mark, &same, &Guard::atom(c, Rel::Eq, 1), &[], f);
    }
    TimedGame::new(strings(&T), strings(&M), b.build().unwrap(), Player::Timer, Player::Timer).unwrap()
}

/// Every Monitor sequence over `M` of length `depth`.
pub fn monitor_sequences(depth: usize) -> Vec<Vec<String>> {
    let mut seqs: Vec<Vec<String>> = vec![vec![]];
    for _ in 0..depth {
        seqs = seqs.into_iter().flat_map(|s| M.iter().map(move |m| [s.clone(), vec![m.to_string()]].concat())).collect();
    }
    seqs
}

/// Exhaustive play of a Timer controller against every Monitor sequence of length `depth`.
pub fn wins_every_branch(g: &TimedGame, ctl: &TimerController, depth: usize) -> bool {
    monitor_sequences(depth).iter().all(|answers| {
        let mut i = 0;
        let mut monitor = |_: &[(String, Rat)]| {
            i += 1;
            answers[i - 1].clone()
        };
        let p = run_play(g, &mut ctl.runner(), &mut monitor, depth).unwrap();
        adjudicate(g, &p, DEFAULT_JOINT_BUDGET).unwrap() == Verdict::OwnerWins
    })
}
