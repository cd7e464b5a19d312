//! Graphviz export.

use std::fmt::Write;

use crate::automaton::Automaton;
use crate::ida::{Ida, IdaContext, Side};

fn esc(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// S-nodes are ovals, E-nodes boxes. Dead S-nodes are red, critical
/// E-nodes green, flagged nodes dashed orange.
pub fn ida_to_dot(ctx: &IdaContext, ida: &Ida, flags: Option<&[bool]>, name: &str) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", esc(name)).unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    if let Some(i) = ida.initial() {
        writeln!(out, "  init [shape=point];").unwrap();
        writeln!(out, "  init -> n{i};").unwrap();
    }
    for (i, n) in ida.nodes().iter().enumerate() {
        let mut attrs = vec![
            format!("label=\"{}\"", esc(&ctx.node_label(n))),
            format!("shape={}", if n.side == Side::S { "ellipse" } else { "box" }),
        ];
        if ctx.is_dead_s(n) {
            attrs.push("style=filled".into());
            attrs.push("fillcolor=\"#f4a6a6\"".into());
            attrs.push("color=red".into());
        } else if ctx.is_critical_e(n) {
            attrs.push("style=filled".into());
            attrs.push("fillcolor=\"#b7e4b0\"".into());
            attrs.push("color=darkgreen".into());
        }
        if flags.is_some_and(|f| f.get(i).copied().unwrap_or(false)) {
            attrs.push("style=dashed".into());
            attrs.push("color=orange".into());
            attrs.push("penwidth=2".into());
        }
        writeln!(out, "  n{i} [{}];", attrs.join(", ")).unwrap();
    }
    for i in 0..ida.num_nodes() {
        for (l, d) in ida.edges(i) {
            writeln!(out, "  n{i} -> n{d} [label=\"{}\"];", esc(&ctx.label_name(l))).unwrap();
        }
    }
    out.push_str("}\n");
    out
}

pub fn automaton_to_dot(a: &Automaton) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", esc(a.name())).unwrap();
    writeln!(out, "  rankdir=LR;").unwrap();
    writeln!(out, "  init [shape=point];").unwrap();
    writeln!(out, "  init -> s{};", a.initial()).unwrap();
    for (i, n) in a.state_names().iter().enumerate() {
        writeln!(out, "  s{i} [label=\"{}\", shape=circle];", esc(n)).unwrap();
    }
    for (s, e, d) in a.transitions() {
        let decl = a.alphabet().get(e);
        let style = if decl.observable { "solid" } else { "dotted" };
        writeln!(
            out,
            "  s{s} -> s{d} [label=\"{}\", style={style}];",
            esc(&decl.name)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}
