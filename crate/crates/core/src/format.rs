//! Line-oriented text format for automata.
//!
//! ```text
//! automaton plant
//! event a obs unctrl
//! state 0 initial
//! state 1
//! trans 0 a 1
//! ```
//! `#` starts a comment. Declarations may appear in any order.

use std::fmt::Write;

use crate::automaton::{Automaton, AutomatonBuilder, EventDecl};
use crate::error::ModelError;

fn perr(line: usize, msg: impl Into<String>) -> ModelError {
    ModelError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Non-empty lines with comments stripped, paired with 1-based line numbers.
pub fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        let toks: Vec<&str> = l.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

pub fn parse_automaton(text: &str) -> Result<Automaton, ModelError> {
    let mut name = None;
    let mut events = Vec::new();
    let mut states = Vec::new();
    let mut trans = Vec::new();
    for (ln, toks) in content_lines(text) {
        match toks[0] {
            "automaton" => {
                if toks.len() != 2 {
                    return Err(perr(ln, "expected `automaton <name>`"));
                }
                if name.is_some() {
                    return Err(perr(ln, "second `automaton` header"));
                }
                name = Some(toks[1].to_string());
            }
            "event" => {
                if toks.len() != 4 {
                    return Err(perr(ln, "expected `event <name> <obs|unobs> <ctrl|unctrl>`"));
                }
                let obs = match toks[2] {
                    "obs" => true,
                    "unobs" => false,
                    t => return Err(perr(ln, format!("bad observability `{t}`"))),
                };
                let ctrl = match toks[3] {
                    "ctrl" => true,
                    "unctrl" => false,
                    t => return Err(perr(ln, format!("bad controllability `{t}`"))),
                };
                events.push((ln, EventDecl::new(toks[1], obs, ctrl)));
            }
            "state" => {
                let initial = match toks.len() {
                    2 => false,
                    3 if toks[2] == "initial" => true,
                    _ => return Err(perr(ln, "expected `state <id> [initial]`")),
                };
                states.push((ln, toks[1], initial));
            }
            "trans" => {
                if toks.len() != 4 {
                    return Err(perr(ln, "expected `trans <src> <event> <dst>`"));
                }
                trans.push((ln, toks[1], toks[2], toks[3]));
            }
            t => return Err(perr(ln, format!("unknown keyword `{t}`"))),
        }
    }
    let name = name.ok_or_else(|| perr(1, "missing `automaton <name>` header"))?;
    let mut b = AutomatonBuilder::new(&name);
    for (ln, d) in events {
        b.add_event(d).map_err(|e| perr(ln, e.to_string()))?;
    }
    for (ln, s, init) in states {
        b.add_state(s, init).map_err(|e| perr(ln, e.to_string()))?;
    }
    for (ln, s, e, d) in trans {
        b.add_transition_by_name(s, e, d)
            .map_err(|err| perr(ln, err.to_string()))?;
    }
    b.build()
}

/// Canonical text: events and states in declaration order, transitions
/// sorted by (source, event).
pub fn write_automaton(a: &Automaton) -> String {
    let mut out = String::new();
    writeln!(out, "automaton {}", a.name()).unwrap();
    for d in a.alphabet().decls() {
        writeln!(
            out,
            "event {} {} {}",
            d.name,
            if d.observable { "obs" } else { "unobs" },
            if d.controllable { "ctrl" } else { "unctrl" }
        )
        .unwrap();
    }
    for (x, n) in a.state_names().iter().enumerate() {
        if x == a.initial() {
            writeln!(out, "state {n} initial").unwrap();
        } else {
            writeln!(out, "state {n}").unwrap();
        }
    }
    for (s, e, d) in a.transitions() {
        writeln!(
            out,
            "trans {} {} {}",
            a.state_name(s),
            a.alphabet().name(e),
            a.state_name(d)
        )
        .unwrap();
    }
    out
}
