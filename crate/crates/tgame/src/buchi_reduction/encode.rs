use super::{check_counters, zero_start, EncodingError, VERDICTS};
use crate::exact_time::Rat;
use crate::game::{TimerController, TimerMove};
use crate::lcm::{Lcm, LcmLasso, Op, RunPrefix};

/// Fractional offset of the height-`h` token of counter `c` (0-based) when
/// values stay at most `k`: `c/4 + (k+1-h)·δ` with `δ = 1/(4(k+1))`.
pub fn slot_offset(c: usize, h: u64, k: u64) -> Rat {
    debug_assert!((1..=k).contains(&h));
    &Rat::new(c as u64, 4) + &Rat::new(k + 1 - h, 4 * (k + 1))
}

fn slot_block(m: &Lcm, n: u64, vals: &[u64], k: u64) -> Vec<(String, Rat)> {
    let base = Rat::int(n);
    vals.iter()
        .enumerate()
        .flat_map(|(c, &v)| (1..=v).rev().map(move |h| (c, h)))
        .map(|(c, h)| (m.counters()[c].clone(), &base + &slot_offset(c, h, k)))
        .collect()
}

/// Timer moves encoding a lossy lasso with fixed slots, and the index of the
/// first move of the repeated part.
pub fn lasso_moves(m: &Lcm, lasso: &LcmLasso, k: u64) -> Result<(Vec<TimerMove>, usize), EncodingError> {
    check_counters(m)?;
    zero_start(&lasso.prefix)?;
    let cycle = lasso.cycle_run();
    if !lasso.prefix.is_lossy_run(m) || !cycle.is_lossy_run(m) || cycle.last() != cycle.config(0) {
        return Err(EncodingError::NotARun);
    }
    let value = lasso.prefix.max_value().max(cycle.max_value());
    if value > k {
        return Err(EncodingError::ExceedsBound { value, k });
    }
    let mut timed = Vec::new();
    let mut loop_start = 0;
    for (j, (instr, cfg)) in lasso.prefix.steps.iter().chain(&lasso.cycle).enumerate() {
        if j == lasso.prefix.len() {
            loop_start = timed.len();
        }
        let n = j as u64 + 1;
        timed.push((m.letter(*instr), Rat::int(n)));
        timed.extend(slot_block(m, n, &cfg.vals, k));
    }
    let mut last = Rat::zero();
    let moves = timed
        .into_iter()
        .map(|(l, t)| {
            let d = t.checked_sub(&last).expect("slots are increasing");
            last = t;
            TimerMove::new(l, d)
        })
        .collect();
    Ok((moves, loop_start))
}

/// Mealy machine replaying [`lasso_moves`] whatever Monitor answers.
pub fn timer_lasso_controller(m: &Lcm, lasso: &LcmLasso, k: u64) -> Result<TimerController, EncodingError> {
    let (moves, loop_start) = lasso_moves(m, lasso, k)?;
    let n = moves.len();
    let next = |i: usize| if i + 1 == n { loop_start } else { i + 1 };
    let edges = (0..n)
        .flat_map(|i| VERDICTS.iter().map(move |v| (i, v.to_string())))
        .map(|(i, v)| (i, v, next(i), moves[next(i)].clone()))
        .collect();
    let states = (0..n).map(|i| format!("q{i}")).collect();
    Ok(TimerController::new(states, 0, moves[0].clone(), edges)?)
}

/// Rewrites free-test zero tests of a positive counter as a loss on the
/// step before, which yields a lossy run with the same instructions.
pub fn normalize_free_test(m: &Lcm, run: &RunPrefix) -> RunPrefix {
    let mut out = run.clone();
    for j in 0..out.steps.len() {
        let ins = &m.instructions()[out.steps[j].0];
        if ins.op != Op::Zt {
            continue;
        }
        let before = if j == 0 { &mut out.start } else { &mut out.steps[j - 1].1 };
        before.vals[ins.counter] = 0;
    }
    out
}

/// Timed encoding in which surviving tokens move exactly one unit later and
/// an incremented counter gains a token halfway between the start of its
/// quarter and its previous first token.
pub fn enc_timed_midpoint(m: &Lcm, run: &RunPrefix) -> Result<Vec<(String, Rat)>, EncodingError> {
    check_counters(m)?;
    zero_start(run)?;
    let run = if run.is_lossy_run(m) { run.clone() } else { normalize_free_test(m, run) };
    if !run.is_lossy_run(m) {
        return Err(EncodingError::NotARun);
    }
    let mut tokens: Vec<Vec<Rat>> = vec![Vec::new(); m.counters().len()];
    let mut out = Vec::new();
    for (j, (instr, cfg)) in run.steps.iter().enumerate() {
        let n = j as u64 + 1;
        let ins = &m.instructions()[*instr];
        for (c, seg) in tokens.iter_mut().enumerate() {
            let v = cfg.vals[c] as usize;
            *seg = match ins.op {
                Op::Inc if ins.counter == c && v == seg.len() + 1 => {
                    let floor = Rat::new(c as u64, 4);
                    let first = seg.first().cloned().unwrap_or_else(|| Rat::new(c as u64 + 1, 4));
                    let fresh = (&floor + &first).div_int(2);
                    std::iter::once(fresh).chain(seg.drain(..)).collect()
                }
                Op::Dec if ins.counter == c => seg[1..=v].to_vec(),
                _ => seg[..v].to_vec(),
            };
        }
        out.push((m.letter(*instr), Rat::int(n)));
        let base = Rat::int(n);
        for (c, seg) in tokens.iter().enumerate() {
            out.extend(seg.iter().map(|off| (m.counters()[c].clone(), &base + off)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::buchi_reduction::{enc_run, local_status};
    use crate::exact_time::r;
    use crate::lcm::{find_lasso, fixtures, free_test_run};

    #[test]
    fn m1_moves_with_one_slot() {
        let m = fixtures::m1();
        let lasso = find_lasso(&m, 0, 1).unwrap();
        let (moves, start) = lasso_moves(&m, &lasso, 1).unwrap();
        assert_eq!(start, 0);
        let got: Vec<(String, String)> = moves.iter().map(|mv| (mv.letter.clone(), mv.delay.to_string())).collect();
        let want = [("s0:inc c1->s1", "1"), ("c1", "1/8"), ("s1:dec c1->s0", "7/8")];
        assert_eq!(got, want.map(|(a, b)| (a.to_string(), b.to_string())));
        assert_eq!(slot_offset(0, 1, 1), r("1/8"));
    }

    #[test]
    fn zero_lasso_only_emits_instructions() {
        let m = crate::lcm::parse_lcm("counters c1\ninit s0\ns0: zt c1 -> s0\n").unwrap();
        let lasso = find_lasso(&m, 0, 1).unwrap();
        let (moves, _) = lasso_moves(&m, &lasso, 1).unwrap();
        assert!(moves.iter().all(|mv| mv.delay == Rat::one()));
    }

    #[test]
    fn bound_is_enforced() {
        let m = fixtures::load("double").unwrap();
        let lasso = find_lasso(&m, 0, 2).unwrap();
        assert_eq!(lasso_moves(&m, &lasso, 1).unwrap_err(), EncodingError::ExceedsBound { value: 2, k: 1 });
        assert!(lasso_moves(&m, &lasso, 2).is_ok());
    }

    #[test]
    fn midpoint_examples() {
        let m = fixtures::m1();
        let run = free_test_run(&m, 2);
        let w = enc_timed_midpoint(&m, &run).unwrap();
        assert_eq!(w[1], ("c1".to_string(), r("9/8")));
        assert_eq!(w.len(), 3);
        assert_eq!(w[2].0, "s1:dec c1->s0");
    }

    #[test]
    fn midpoint_encoding_passes_local_checks() {
        for (name, src, _) in fixtures::ALL {
            let m = crate::lcm::parse_lcm(src).unwrap();
            let run = free_test_run(&m, 12);
            let w = enc_timed_midpoint(&m, &run).unwrap();
            let untimed: Vec<String> = w.iter().map(|(l, _)| l.clone()).collect();
            assert_eq!(untimed, enc_run(&m, &normalize_free_test(&m, &run)), "{name}");
            for n in 1..=w.len() {
                assert!(local_status(&m, &w[..n]).unwrap().all_ok(), "{name} prefix {n}");
            }
        }
    }
}
