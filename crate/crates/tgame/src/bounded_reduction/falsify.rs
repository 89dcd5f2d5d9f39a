use super::{honest_word_with_order, rule_oracles, BoundedError, GuardSummary, ERR, OK};
use crate::exact_time::{frac, Frac, Rat};
use crate::game::{MonitorController, MonitorStrategy, Play, Round};
use crate::lcm::{free_test_run, Lcm, RunPrefix};

/// Fractional parts for a counter holding `m` units: `f_i = i/(2m+1)` for
/// `i = 1..=m`, followed by the midpoints between consecutive ones. Every
/// gap between two `f_i` contains a pooled midpoint.
pub fn probe_fracs(m: u64) -> (Vec<Frac>, Vec<Frac>) {
    let den = 2 * m + 1;
    let f = |num: u64, den: u64| frac(&Rat::new(num, den));
    let main = (1..=m).map(|i| f(i, den)).collect();
    let mids = (1..m).map(|i| f(2 * i + 1, 2 * den)).collect();
    (main, mids)
}

/// Does answering `a` to the last letter of `w` hand Timer the game?
fn contradicts(m: &Lcm, w: &[(String, Rat)], a: &str) -> Result<Option<bool>, BoundedError> {
    let s = rule_oracles(m, w)?;
    Ok(match a {
        ERR if s.ok() => Some(true),
        OK if s.err() => Some(true),
        ERR => None,
        _ => Some(false),
    })
}

fn play_of(w: &[(String, Rat)], answers: &[String]) -> Play {
    let rounds = w
        .iter()
        .zip(answers)
        .map(|((l, t), a)| Round { timer: l.clone(), monitor: a.clone(), time: t.clone() })
        .collect();
    Play { rounds, loop_start: None }
}

/// Searches for a finite play that `ctrl` loses: the free-test run of `m`
/// up to the step where some counter first reaches `target`, encoded
/// honestly so that counter's active parts interleave with pooled
/// inactive ones, then the critical increment probed at every pooled part.
///
/// `target` must exceed the objecting-guard width by at least two.
pub fn falsify_controller(
    ctrl: &MonitorController,
    summary: &GuardSummary,
    m: &Lcm,
    target: u64,
    max_steps: usize,
) -> Result<Option<Play>, BoundedError> {
    let needed = summary.k_prime as u64 + 2;
    if target < needed {
        return Err(BoundedError::TargetTooSmall { target, needed });
    }
    let full = free_test_run(m, max_steps);
    let critical = full
        .steps
        .iter()
        .position(|(_, c)| c.vals.iter().any(|&v| v >= target))
        .ok_or(BoundedError::TargetUnreached { target, steps: max_steps })?;
    let run = RunPrefix { start: full.start.clone(), steps: full.steps[..critical].to_vec() };
    let instr = full.steps[critical].0;

    let (main, mids) = probe_fracs(target - 1);
    let mut pool: Vec<Frac> = main.iter().chain(&mids).cloned().collect();
    let order = pool.clone();
    pool.sort();
    let pool_times: Vec<Rat> = pool.iter().map(|f| f.value().clone()).collect();
    let word = honest_word_with_order(m, &run, &pool_times, &order)?;

    let mut runner = ctrl.runner();
    let mut answers = Vec::with_capacity(word.len() + 1);
    for n in 1..=word.len() {
        let a = runner.answer(&word[..n])?;
        answers.push(a.clone());
        match contradicts(m, &word[..n], &a)? {
            Some(true) => return Ok(Some(play_of(&word[..n], &answers))),
            Some(false) => {}
            None => return Ok(None),
        }
    }
    let base = Rat::int(critical as u64 + 1);
    for f in &pool {
        let mut probe = runner.clone();
        let mut w = word.clone();
        w.push((m.letter(instr), &base + f.value()));
        let a = probe.answer(&w)?;
        if contradicts(m, &w, &a)? == Some(true) {
            let mut ans = answers.clone();
            ans.push(a);
            return Ok(Some(play_of(&w, &ans)));
        }
    }
    Ok(None)
}
