use std::fmt::Write;

use super::TimedAutomaton;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Graphviz rendering, one edge per transition.
pub fn to_dot(a: &TimedAutomaton) -> String {
    let mut out = String::from("digraph automaton {\n  rankdir=LR;\n");
    for (i, name) in a.locations().iter().enumerate() {
        let shape = if a.is_accepting(i) { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  n{i} [label={}, shape={shape}];", quote(name));
        if a.initial().contains(&i) {
            let _ = writeln!(out, "  start{i} [shape=point];\n  start{i} -> n{i};");
        }
    }
    for t in a.transitions() {
        let mut label = t.letter.clone();
        if !t.guard.is_top() {
            label.push_str(&format!(", {}", a.guard_text(&t.guard)));
        }
        if !t.resets.is_empty() {
            let names: Vec<&str> = t.resets.iter().map(|&c| a.clocks()[c].as_str()).collect();
            label.push_str(&format!(", {{{}}} := 0", names.join(",")));
        }
        if let Some(o) = &t.output {
            label.push_str(&format!(" / {o}"));
        }
        let _ = writeln!(out, "  n{} -> n{} [label={}];", t.source, t.target, quote(&label));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{Acceptance, AutomatonBuilder, Guard, Rel, ResetMode};

    #[test]
    fn edge_labels_carry_guard_and_reset() {
        let mut b = AutomatonBuilder::new(&["a"], ResetMode::Standard, Acceptance::Reach);
        let x = b.clock("x");
        let l0 = b.initial_location("l0");
        let l1 = b.accepting_location("l1");
        b.edge(l0, "a", Guard::atom(x, Rel::Eq, 1), &[x], l1);
        let dot = to_dot(&b.build().unwrap());
        assert!(dot.contains("n0 -> n1 [label=\"a, x = 1, {x} := 0\"]"));
        assert!(dot.contains("shape=doublecircle"));
    }
}
