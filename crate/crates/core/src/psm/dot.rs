use std::fmt::Write;

use super::machine::{Psm, Role};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn shape(role: Role) -> &'static str {
    match role {
        Role::Start => "circle",
        Role::End => "doublecircle",
        Role::Client => "box",
        Role::Server => "ellipse",
    }
}

/// Graphviz rendering: one node line per state, one edge line per
/// transition labeled `format:<label> p=<p>`.
pub fn to_dot(psm: &Psm, name: &str) -> String {
    let mut out = String::new();
    writeln!(out, "digraph {} {{", quote(name)).unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    for s in &psm.states {
        writeln!(out, "  {} [shape={}];", quote(&s.id), shape(s.role)).unwrap();
    }
    for t in &psm.transitions {
        let label = match &t.label {
            Some(l) => format!("format:{l} p={:.2}", t.p),
            None => format!("p={:.2}", t.p),
        };
        writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(&t.from),
            quote(&t.to),
            quote(&label)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}
