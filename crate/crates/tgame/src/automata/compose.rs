use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use super::{Acceptance, AutomatonBuilder, AutomatonError, Guard, LocId, TimedAutomaton, Transition};

fn same_letters(a: &TimedAutomaton, b: &TimedAutomaton) -> bool {
    let x: BTreeSet<&String> = a.alphabet().iter().collect();
    let y: BTreeSet<&String> = b.alphabet().iter().collect();
    x == y
}

fn unique_name(taken: &mut HashSet<String>, name: &str) -> String {
    let mut cand = name.to_string();
    let mut k = 1;
    while !taken.insert(cand.clone()) {
        k += 1;
        cand = format!("{name}#{k}");
    }
    cand
}

/// Disjoint union. Clocks are shared positionally: every run stays inside
/// one operand, so the clock count is the larger of the two.
pub fn union(a: &TimedAutomaton, b: &TimedAutomaton) -> Result<TimedAutomaton, AutomatonError> {
    union_all(&[a, b])
}

pub fn union_all(parts: &[&TimedAutomaton]) -> Result<TimedAutomaton, AutomatonError> {
    let first = parts
        .first()
        .ok_or_else(|| AutomatonError::Incompatible("empty union".into()))?;
    for p in &parts[1..] {
        if !same_letters(first, p) {
            return Err(AutomatonError::Incompatible("union operands differ in alphabet".into()));
        }
        if p.acceptance() != first.acceptance() || p.reset_mode() != first.reset_mode() {
            return Err(AutomatonError::Incompatible("union operands differ in mode".into()));
        }
    }
    let mut b = AutomatonBuilder::new(first.alphabet(), first.reset_mode(), first.acceptance());
    let widest = parts.iter().max_by_key(|p| p.clock_count()).expect("nonempty");
    for c in widest.clocks() {
        b.clock(c);
    }
    let mut taken = HashSet::new();
    for p in parts {
        let base = b.locations.len();
        for (l, name) in p.locations().iter().enumerate() {
            let id = b.location(unique_name(&mut taken, name));
            b.set_accepting(id, p.is_accepting(l));
        }
        for &l in p.initial() {
            b.set_initial(base + l);
        }
        for t in p.transitions() {
            b.push_transition(Transition { source: base + t.source, target: base + t.target, ..t.clone() });
        }
    }
    b.build()
}

/// Product with a clock-free deterministic checker.
///
/// Reach machines intersect finite-prefix languages: a product run is
/// accepting where both components are. Büchi machines use the two-phase
/// flag so both acceptance sets recur.
pub fn intersect_with_checker(a: &TimedAutomaton, checker: &TimedAutomaton) -> Result<TimedAutomaton, AutomatonError> {
    if checker.clock_count() != 0 {
        return Err(AutomatonError::Incompatible("checker has clocks".into()));
    }
    if checker.initial().len() != 1 || !super::validate(checker).deterministic {
        return Err(AutomatonError::Incompatible("checker is not deterministic".into()));
    }
    if a.acceptance() != checker.acceptance() {
        return Err(AutomatonError::Incompatible("acceptance differs".into()));
    }
    let buchi = a.acceptance() == Acceptance::Buchi;
    let c0 = checker.initial()[0];
    let step_checker = |lc: LocId, letter: &str| checker.outgoing(lc, letter).next().map(|t| t.target);

    let mut b = AutomatonBuilder::new(a.alphabet(), a.reset_mode(), a.acceptance());
    for c in a.clocks() {
        b.clock(c);
    }
    // product node: (a location, checker location, phase)
    let mut ids: HashMap<(LocId, LocId, u8), LocId> = HashMap::new();
    let mut queue = VecDeque::new();
    let accepting_node = |la: LocId, lc: LocId, f: u8| {
        if buchi {
            f == 1 && checker.is_accepting(lc)
        } else {
            a.is_accepting(la) && checker.is_accepting(lc)
        }
    };
    let next_phase = |la: LocId, lc: LocId, f: u8| {
        if !buchi {
            0
        } else if f == 0 && a.is_accepting(la) {
            1
        } else if f == 1 && checker.is_accepting(lc) {
            0
        } else {
            f
        }
    };
    let mut intern = |b: &mut AutomatonBuilder, key: (LocId, LocId, u8), queue: &mut VecDeque<(LocId, LocId, u8)>| {
        *ids.entry(key).or_insert_with(|| {
            let (la, lc, f) = key;
            let name = if buchi {
                format!("{}×{}·{f}", a.locations()[la], checker.locations()[lc])
            } else {
                format!("{}×{}", a.locations()[la], checker.locations()[lc])
            };
            let id = b.location(name);
            b.set_accepting(id, accepting_node(la, lc, f));
            queue.push_back(key);
            id
        })
    };
    for &la in a.initial() {
        let id = intern(&mut b, (la, c0, 0), &mut queue);
        b.set_initial(id);
    }
    while let Some(key @ (la, lc, f)) = queue.pop_front() {
        let src = intern(&mut b, key, &mut queue);
        let f2 = next_phase(la, lc, f);
        for t in a.transitions().iter().filter(|t| t.source == la) {
            if let Some(lc2) = step_checker(lc, &t.letter) {
                let dst = intern(&mut b, (t.target, lc2, f2), &mut queue);
                b.push_transition(Transition { source: src, target: dst, ..t.clone() });
            }
        }
    }
    b.build()
}

/// Inverse image: a new letter behaves as the old letter it maps to.
pub fn remap_alphabet<S: AsRef<str>>(
    a: &TimedAutomaton,
    new_alphabet: &[S],
    mapping: &HashMap<String, String>,
) -> Result<TimedAutomaton, AutomatonError> {
    let mut b = a.to_builder();
    b.alphabet = new_alphabet.iter().map(|s| s.as_ref().to_string()).collect();
    let mut by_old: HashMap<&str, Vec<&str>> = HashMap::new();
    for n in new_alphabet {
        let old = mapping
            .get(n.as_ref())
            .ok_or_else(|| AutomatonError::UnknownLetter(n.as_ref().to_string()))?;
        by_old.entry(old.as_str()).or_default().push(n.as_ref());
    }
    b.transitions = a
        .transitions()
        .iter()
        .flat_map(|t| {
            by_old
                .get(t.letter.as_str())
                .into_iter()
                .flatten()
                .map(move |n| Transition { letter: n.to_string(), ..t.clone() })
        })
        .collect();
    b.build()
}

/// Büchi machine accepting the infinite words with a won prefix.
pub fn to_buchi(a: &TimedAutomaton) -> Result<TimedAutomaton, AutomatonError> {
    if a.acceptance() == Acceptance::Buchi {
        return Ok(a.clone());
    }
    let mut b = a.to_builder();
    b.acceptance = Acceptance::Buchi;
    let mut taken: HashSet<String> = a.locations().iter().cloned().collect();
    let sink = b.location(unique_name(&mut taken, "⊤"));
    let letters = a.alphabet().to_vec();
    for l in a.accepting().collect::<Vec<_>>() {
        b.set_accepting(l, false);
        b.edges(l, &letters, &Guard::top(), &[], sink);
    }
    b.set_accepting(sink, true);
    b.edges(sink, &letters, &Guard::top(), &[], sink);
    b.build()
}
