//! Graphviz output. Every bundle becomes a point node with one edge from its source,
//! labeled by the letter, and one dashed edge per child direction to the terminals.

use std::fmt::Write;

use treeshift::{Automaton, FiniteTreeAutomaton};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn automaton_dot(a: &Automaton) -> String {
    render(a, |_| String::new())
}

pub fn fta_dot(f: &FiniteTreeAutomaton) -> String {
    render(f.base(), |s| {
        let mut attrs = String::new();
        if f.initial().contains(&s) {
            attrs.push_str(", peripheries=2");
        }
        if f.final_state() == s {
            attrs.push_str(", shape=box");
        }
        attrs
    })
}

fn render(a: &Automaton, extra: impl Fn(usize) -> String) -> String {
    let mut out = String::from("digraph automaton {\n");
    if a.num_states() > 0 {
        out.push_str("  node [shape=circle];\n");
    }
    for (i, name) in a.states().iter().enumerate() {
        writeln!(out, "  s{i} [label={}{}];", quote(name), extra(i)).unwrap();
    }
    for (j, b) in a.bundles().iter().enumerate() {
        writeln!(out, "  b{j} [shape=point, label=\"\"];").unwrap();
        writeln!(
            out,
            "  s{} -> b{j} [label={}];",
            b.source,
            quote(a.alphabet().symbol(b.label))
        )
        .unwrap();
        for (d, t) in b.terminals.iter().enumerate() {
            writeln!(out, "  b{j} -> s{t} [label=\"{d}\", style=dashed];").unwrap();
        }
    }
    out.push_str("}\n");
    out
}
