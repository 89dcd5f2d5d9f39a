//! The acceptance suite: twelve exact, oracle-backed criteria, one status
//! line each. Run with `cargo test -p tgame --test acceptance -- --nocapture`
//! to see the lines.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::games::{first_time_at_least_one, monitor_sequences, repeat_one_apart, wins_every_branch};
use common::oracles::{as_timestamps, brute_buchi, brute_runs, random_automaton, random_delay_word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tgame::automata::{
    accepts_buchi_lasso, accepts_reach_prefix, Acceptance, LassoWord, ReachStatus, ResetMode, DEFAULT_STATE_BUDGET,
};
use tgame::bounded_reduction::{
    bounded_game, build_rule_automata, claim62_check, even_pool, falsify_controller, honest_timer, inject_fault,
    rule_oracles, summarize_guards, synthesize_monitor_controller, val_and_rho, Fault, ScriptedTimer, ERR,
};
use tgame::buchi_reduction::{
    build_local_automata, build_w, enc_run, enc_timed_midpoint, local_status, normalize_free_test, recurrence_game,
    timer_lasso_controller, MonitorOracle,
};
use tgame::exact_time::{r, Rat};
use tgame::game::{
    adjudicate, extract_timer_controller, run_lasso, run_play, Extraction, MonitorController, MonitorStrategy,
    TimedGame, TimerMove, TimerStrategy, Verdict, DEFAULT_JOINT_BUDGET,
};
use tgame::lcm::{find_lasso, fixtures, free_test_run, Lcm};
use tgame::witness::{
    build_witness, falsify_witness_controller, opponent_secured, repeat_punisher, revisiting_timer, AgentController,
    CatalogueStrategy, WitnessKind, A, B, ERR as W_ERR, OK as W_OK, PASS, TICK,
};

/// `Ok` carries a short summary of what was checked.
type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn bounded_fixtures() -> Vec<(&'static str, Lcm, u64)> {
    let mut v = vec![("m1", fixtures::m1(), 1)];
    v.extend(fixtures::bounded_others());
    v
}

fn midpoint_encodings_are_sound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut prefixes = 0;
    for _ in 0..20 {
        let m = common::random_lcm(&mut rng);
        let run = common::random_free_test_run(&m, rng.gen_range(0..=12), &mut rng);
        let w = enc_timed_midpoint(&m, &run).map_err(|e| e.to_string())?;
        let untimed: Vec<String> = w.iter().map(|(l, _)| l.clone()).collect();
        ensure!(untimed == enc_run(&m, &normalize_free_test(&m, &run)), "untiming differs for\n{m}");
        for n in 1..=w.len() {
            ensure!(local_status(&m, &w[..n]).unwrap().all_ok(), "prefix {n} of {w:?} fails a local check\n{m}");
            prefixes += 1;
        }
    }
    Ok(format!("20 machines, {prefixes} prefixes"))
}

fn local_gadgets_match_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1002);
    let machines = common::machines_for_words();
    let automata: Vec<_> = machines.iter().map(|m| build_local_automata(m).unwrap()).collect();
    for _ in 0..1000 {
        let k = rng.gen_range(0..machines.len());
        let w = common::random_encoding_word(&machines[k], rng.gen_range(1..=8), &mut rng);
        if let Some(d) = common::local_disagreement(&machines[k], &automata[k], &w) {
            return Err(d);
        }
    }
    Ok("1000 words, 0 disagreements".into())
}

fn rule_gadgets_match_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1003);
    let machines = common::machines_for_words();
    let rules: Vec<_> = machines.iter().map(|m| build_rule_automata(m).unwrap()).collect();
    for _ in 0..1000 {
        let i = rng.gen_range(0..machines.len());
        let w = common::random_pool_word(&machines[i], 8, &mut rng);
        if let Some(d) = common::rule_disagreement(&machines[i], &rules[i], &w) {
            return Err(d);
        }
    }
    Ok("1000 words, 0 disagreements".into())
}

fn rule_respecting_words_are_runs() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    for _ in 0..500 {
        let m = common::random_lcm(&mut rng);
        let w = common::random_honest_word(&m, 12, &mut rng);
        // the check is vacuous on words that break a rule, so rule that out first
        ensure!(rule_oracles(&m, &w).unwrap().reg, "generated word is not regular: {w:?}");
        for n in 1..=w.len() {
            ensure!(!rule_oracles(&m, &w[..n]).unwrap().err(), "generated word breaks a rule at {n}: {w:?}");
        }
        ensure!(claim62_check(&m, &w).unwrap(), "{m}\n{w:?}");
    }
    Ok("500 words".into())
}

fn error_and_ok_implications() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1005);
    let (mut faulty, mut breaks) = (0, 0);
    for _ in 0..500 {
        let m = common::random_lcm(&mut rng);
        let mut w = common::random_honest_word(&m, 10, &mut rng);
        if rng.gen_bool(0.5) {
            common::perturb(&m, &mut w, &mut rng);
            faulty += 1;
        }
        let runs: Vec<bool> = (0..=w.len()).map(|n| val_and_rho(&m, &w[..n]).unwrap().is_run).collect();
        for n in 1..=w.len() {
            let s = rule_oracles(&m, &w[..n]).unwrap();
            if runs[n] {
                ensure!(!s.err(), "error reported on a run prefix {:?}", &w[..n]);
            } else if runs[n - 1] {
                breaks += 1;
                ensure!(!s.ok(), "first breaking prefix accepted {:?}", &w[..n]);
            }
        }
    }
    ensure!(breaks > 0, "no play ever broke");
    Ok(format!("500 plays, {faulty} perturbed, {breaks} first breaks"))
}

fn synthesized_controllers_are_exact() -> Outcome {
    let mut skipped = Vec::new();
    let mut faults = 0;
    for (name, m, k) in bounded_fixtures() {
        let k = k as usize;
        let g = bounded_game(&m).unwrap();
        let ctrl = synthesize_monitor_controller(&m, k).unwrap();
        let pool = even_pool(k + 1);
        let run = free_test_run(&m, 200 - pool.len());
        let play = run_play(&g, &mut honest_timer(&m, &run, &pool).unwrap(), &mut ctrl.runner(), 200).unwrap();
        ensure!(play.rounds.len() == 200, "{name}: play stopped early");
        ensure!(play.rounds.iter().all(|r| r.monitor != ERR), "{name}: objection on honest play\n{play}");

        let honest = honest_timer(&m, &free_test_run(&m, 60), &pool).unwrap().word().to_vec();
        for fault in [Fault::DuplicateInc, Fault::DecInactive] {
            let Some((at, w)) = (0..honest.len()).find_map(|i| inject_fault(&m, &honest, i, fault).map(|w| (i, w))) else {
                skipped.push(format!("{name}/{fault:?}"));
                continue;
            };
            let mut runner = ctrl.runner();
            let answers: Vec<String> = (1..=w.len()).map(|n| runner.answer(&w[..n]).unwrap()).collect();
            let first = answers.iter().position(|a| a == ERR);
            ensure!(first == Some(at), "{name} {fault:?}: injected at round {}, first objection {first:?}", at + 1);
            faults += 1;
        }
    }
    // M1 never holds two active parts, so a duplicate increment has no site
    ensure!(skipped == ["m1/DuplicateInc"], "faults without an injection site: {skipped:?}");
    Ok(format!("6 machines, 200 honest rounds each, {faults} faults caught (m1 duplicate increment inapplicable)"))
}

fn falsifier_beats_narrow_controller() -> Outcome {
    let m = fixtures::load("three").unwrap();
    let ctrl = synthesize_monitor_controller(&m, 1).unwrap();
    let play = falsify_controller(&ctrl, &summarize_guards(&ctrl), &m, 3, 100)
        .map_err(|e| e.to_string())?
        .ok_or("no defeating play found")?;
    let word: Vec<(String, Rat)> = play.rounds.iter().map(|r| (r.timer.clone(), r.time.clone())).collect();
    let g = bounded_game(&m).unwrap();
    let replay = run_play(&g, &mut ScriptedTimer::new(word.clone()), &mut ctrl.runner(), word.len()).unwrap();
    ensure!(replay == play, "replay differs:\n{replay}\nvs\n{play}");
    let last = play.rounds.last().unwrap();
    let s = rule_oracles(&m, &word).unwrap();
    let contradiction = if last.monitor == ERR { s.ok() } else { s.err() };
    ensure!(contradiction, "last answer {} agrees with the rule oracles", last.monitor);
    Ok(format!("defeated in {} rounds", play.rounds.len()))
}

fn lasso_controller_meets_the_oracle() -> Outcome {
    let m = fixtures::m1();
    let lasso = find_lasso(&m, 0, 1).ok_or("m1 has no lasso")?;
    let tc = timer_lasso_controller(&m, &lasso, 1).unwrap();
    let g = recurrence_game(&m, 0).unwrap();
    let play = run_play(&g, &mut tc.runner(), &mut MonitorOracle::new(&m), 200).unwrap();
    ensure!(play.rounds.len() == 200, "play stopped early");
    ensure!(play.rounds.iter().all(|r| r.monitor == tgame::buchi_reduction::OK), "oracle objected\n{play}");
    let quiet = MonitorController::constant(tgame::buchi_reduction::OK, &g.timer_alphabet);
    let induced = run_lasso(&g, &tc, &quiet, DEFAULT_JOINT_BUDGET).unwrap();
    ensure!(induced.unroll(200) == play, "induced lasso differs from the oracle play");
    let start = induced.loop_start.unwrap();
    ensure!(induced.rounds[start..].iter().any(|r| r.timer.ends_with("->s0")), "s0 is not on the period");
    let w = build_w(&m, 0).unwrap();
    ensure!(accepts_buchi_lasso(&w, &induced.to_lasso().unwrap(), DEFAULT_STATE_BUDGET).unwrap(), "lasso rejected");
    Ok(format!("200 rounds, period {}", induced.rounds.len() - start))
}

fn buchi_lasso_matches_brute_force() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1009);
    let mut accepted = 0;
    for case in 0..300 {
        let mode = if case % 3 == 0 { ResetMode::OneResetting } else { ResetMode::Standard };
        let a = random_automaton(&mut rng, mode, Acceptance::Buchi);
        let (p, l) = (rng.gen_range(0..=4), rng.gen_range(1..=4));
        let w = LassoWord::new(random_delay_word(&mut rng, p), random_delay_word(&mut rng, l));
        let got = accepts_buchi_lasso(&a, &w, DEFAULT_STATE_BUDGET).map_err(|e| e.to_string())?;
        ensure!(got == brute_buchi(&a, &w), "case {case}: {w:?}");
        accepted += usize::from(got);
    }
    Ok(format!("300 cases, {accepted} accepted"))
}

fn clamping_preserves_reach() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    let mut won = 0;
    for case in 0..500 {
        let mode = if case % 2 == 0 { ResetMode::Standard } else { ResetMode::OneResetting };
        let a = random_automaton(&mut rng, mode, Acceptance::Reach);
        let len = rng.gen_range(0..=8);
        let word = random_delay_word(&mut rng, len);
        let clamped = accepts_reach_prefix(&a, &as_timestamps(&word)).unwrap() == ReachStatus::Won;
        let (_, exact) = brute_runs(&a, &word);
        ensure!(clamped == exact, "case {case}: clamped {clamped}, exact {exact} on {word:?}");
        won += usize::from(exact);
    }
    Ok(format!("500 cases, {won} won"))
}

fn witnesses_survive_and_fall() -> Outcome {
    const H: usize = 50;
    let mut rng = ChaCha8Rng::seed_from_u64(1011);
    let mut opponents = 0;
    let mut defeated = 0;
    for kind in WitnessKind::ALL {
        let w = build_witness(kind).unwrap();
        let mut plays = Vec::new();
        match &w.strategy {
            CatalogueStrategy::Monitor(monitor) => {
                plays.push(run_play(&w.game, &mut revisiting_timer(), &mut monitor.clone(), H).unwrap());
                for _ in 0..40 {
                    let tc = common::random_timer_controller(&[TICK], &[A, B], 16, &mut rng);
                    plays.push(run_play(&w.game, &mut tc.runner(), &mut monitor.clone(), H).unwrap());
                }
            }
            CatalogueStrategy::Timer(timer) => {
                let outputs: Vec<&str> = if kind == WitnessKind::Zeno { vec![PASS] } else { vec![W_OK, W_ERR] };
                let mut monitors = if kind == WitnessKind::StrictZeno { vec![repeat_punisher()] } else { vec![] };
                monitors.extend((0..40).map(|_| common::random_monitor_controller(&[TICK], &outputs, 3, &mut rng)));
                for mc in &monitors {
                    plays.push(run_play(&w.game, &mut timer.clone(), &mut mc.runner(), H).unwrap());
                }
            }
        }
        for p in &plays {
            ensure!(p.rounds.len() == H, "{kind}: play stopped early");
            ensure!(!opponent_secured(kind, p).unwrap(), "{kind}: opponent secured the play\n{p}");
            // a finite prefix of a Büchi play has no verdict; the secured check above covers it
            if w.game.is_reach() {
                let verdict = adjudicate(&w.game, p, DEFAULT_JOINT_BUDGET).unwrap();
                ensure!(verdict != expected_defeat(kind), "{kind}: lost\n{p}");
            }
        }
        opponents += plays.len();

        for _ in 0..60 {
            let ctrl = match kind {
                WitnessKind::DistanceOne => {
                    AgentController::Monitor(common::random_monitor_controller(&[TICK], &[A, B], 3, &mut rng))
                }
                WitnessKind::Zeno => AgentController::Timer(common::random_timer_controller(&[TICK], &[PASS], 16, &mut rng)),
                WitnessKind::StrictZeno => {
                    AgentController::Timer(common::random_timer_controller(&[TICK], &[W_OK, W_ERR], 16, &mut rng))
                }
            };
            let p = falsify_witness_controller(kind, &ctrl).unwrap().ok_or_else(|| format!("{kind}: survived\n{ctrl:?}"))?;
            let verdict = adjudicate(&w.game, &p, DEFAULT_JOINT_BUDGET).unwrap();
            ensure!(verdict == expected_defeat(kind), "{kind}: falsifier play adjudicated {verdict:?}\n{p}");
            defeated += 1;
        }
    }
    Ok(format!("{opponents} opponents survived for {H} rounds, {defeated}/180 controllers defeated"))
}

/// The verdict that means the agent lost.
fn expected_defeat(kind: WitnessKind) -> Verdict {
    if kind.owner() == kind.agent() {
        Verdict::OpponentWins
    } else {
        Verdict::OwnerWins
    }
}

fn extraction_matches_source() -> Outcome {
    let fixtures: [(&str, TimedGame, Box<dyn Fn(&[String]) -> TimerMove>); 2] = [
        ("first time at least one", first_time_at_least_one(), Box::new(|_: &[String]| TimerMove::new("a", r("1")))),
        (
            "repeat one apart",
            repeat_one_apart(),
            Box::new(|h: &[String]| {
                let letter = if h.first().is_some_and(|m| m == "y") { "b" } else { "a" };
                TimerMove::new(letter, if h.is_empty() { r("0") } else { r("1") })
            }),
        ),
    ];
    let mut summary = Vec::new();
    for (name, g, sigma) in fixtures {
        let mut source = |h: &[String]| sigma(h);
        let Extraction::Controller { controller, depth } =
            extract_timer_controller(&g, &mut source, 6).map_err(|e| e.to_string())?
        else {
            return Err(format!("{name}: extraction inconclusive"));
        };
        let mut branches = 0;
        for len in 0..depth {
            for h in monitor_sequences(len) {
                let (_, mv) = controller.replay(&h).ok_or_else(|| format!("{name}: no move after {h:?}"))?;
                ensure!(mv == sigma(&h), "{name}: after {h:?} controller plays {mv:?}, source {:?}", sigma(&h));
                branches += 1;
            }
        }
        let mut runner = controller.runner();
        ensure!(runner.next_move(&[]) == sigma(&[]), "{name}: runner disagrees on the first move");
        ensure!(wins_every_branch(&g, &controller, depth), "{name}: some branch is not won by depth {depth}");
        summary.push(format!("{name}: depth {depth}, {branches} histories"));
    }
    Ok(summary.join("; "))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("midpoint encodings pass every local check", midpoint_encodings_are_sound),
        ("local gadgets agree with their oracles", local_gadgets_match_oracles),
        ("rule machines agree with their oracles", rule_gadgets_match_oracles),
        ("rule-respecting words read as runs", rule_respecting_words_are_runs),
        ("run prefixes carry no error, first breaks are not ok", error_and_ok_implications),
        ("synthesized controllers pass honest play and flag single faults", synthesized_controllers_are_exact),
        ("falsifier defeats the width-1 controller", falsifier_beats_narrow_controller),
        ("lasso controller survives the monitor oracle", lasso_controller_meets_the_oracle),
        ("Buchi lasso acceptance matches brute force", buchi_lasso_matches_brute_force),
        ("clamped and exact reach membership agree", clamping_preserves_reach),
        ("witness strategies survive, generated controllers fall", witnesses_survive_and_fall),
        ("extracted controllers follow their source strategy", extraction_matches_source),
    ];
    let start = Instant::now();
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2}: PASS  {name} ({detail}) [{secs:.1}s]", i + 1),
            Err(why) => {
                println!("criterion {:>2}: FAIL  {name}: {why} [{secs:.1}s]", i + 1);
                failed.push(i + 1);
            }
        }
    }
    let total = start.elapsed().as_secs_f64();
    println!("acceptance: {} of 12 passed in {total:.1}s", 12 - failed.len());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
