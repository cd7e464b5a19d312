//! Construction of the all-insertion-deletion attack structure (AIDA), the
//! insertion counter automaton and the bounded structure (BAIDA).

use std::collections::{HashMap, VecDeque};

use crate::alphabet::EditSym;
use crate::automaton::{Automaton, AutomatonBuilder, EventDecl};
use crate::error::ModelError;
use crate::ida::{Counter, Ida, IdaContext, Label, Node, Side};

fn candidate_syms(ctx: &IdaContext) -> Vec<EditSym> {
    let mut out = Vec::new();
    for e in ctx.g.alphabet().observable().iter() {
        out.push(EditSym::Genuine(e));
        if ctx.ea.is_compromised(e) {
            out.push(EditSym::Delete(e));
            out.push(EditSym::Insert(e));
        }
    }
    out
}

/// Breadth-first expansion from y0. Expansion stops at S-nodes whose
/// supervisor state is `dead` and at E-nodes whose plant estimate lies in
/// the critical set.
pub fn construct_aida(ctx: &IdaContext) -> Ida {
    let syms = candidate_syms(ctx);
    let mut ida = Ida::new();
    let (y0, _) = ida.add_node(ctx.initial_node());
    ida.set_initial(y0);
    let mut queue = VecDeque::from([y0]);
    while let Some(n) = queue.pop_front() {
        let node = ida.node(n).clone();
        let mut succ = Vec::new();
        match node.side {
            Side::S => {
                if ctx.is_dead_s(&node) {
                    continue;
                }
                succ.push(ctx.h_se(&node));
            }
            Side::E => {
                if ctx.is_critical_e(&node) {
                    continue;
                }
                for s in &syms {
                    if let Some(y) = ctx.h_es(&node, *s) {
                        succ.push((Label::Sym(*s), y));
                    }
                }
            }
        }
        for (l, m) in succ {
            let (id, fresh) = ida.add_node(m);
            ida.add_edge(n, l, id).expect("transition functions are deterministic");
            if fresh {
                queue.push_back(id);
            }
        }
    }
    ida
}

/// Checks that `ida` is the largest IDA: every defined transition of every
/// non-terminal node is present, nothing else is, and all nodes are reachable.
pub fn verify_aida_maximality(ctx: &IdaContext, ida: &Ida) -> Result<(), String> {
    let Some(init) = ida.initial() else {
        return Err("empty structure".into());
    };
    if *ida.node(init) != ctx.initial_node() {
        return Err("initial node is not y0".into());
    }
    if !ida.all_reachable() {
        return Err("unreachable nodes".into());
    }
    let syms = candidate_syms(ctx);
    for n in 0..ida.num_nodes() {
        let node = ida.node(n);
        let mut expected: Vec<(Label, Node)> = Vec::new();
        match node.side {
            Side::S if !ctx.is_dead_s(node) => expected.push(ctx.h_se(node)),
            Side::E if !ctx.is_critical_e(node) => {
                for s in &syms {
                    if let Some(y) = ctx.h_es(node, *s) {
                        expected.push((Label::Sym(*s), y));
                    }
                }
            }
            _ => {}
        }
        let edges = ida.edges(n);
        if edges.len() != expected.len() {
            return Err(format!(
                "{} has {} edges, expected {}",
                ctx.node_label(node),
                edges.len(),
                expected.len()
            ));
        }
        for (l, m) in expected {
            match ida.succ(n, &l) {
                Some(d) if *ida.node(d) == m => {}
                _ => {
                    return Err(format!(
                        "{} lacks `{}`",
                        ctx.node_label(node),
                        ctx.label_name(&l)
                    ))
                }
            }
        }
    }
    Ok(())
}

/// Labels of `ida` in order of first occurrence.
fn labels_in_order(ida: &Ida) -> Vec<Label> {
    let mut seen = HashMap::new();
    let mut out = Vec::new();
    for n in 0..ida.num_nodes() {
        for (l, _) in ida.edges(n) {
            if !seen.contains_key(l) {
                seen.insert(l.clone(), ());
                out.push(l.clone());
            }
        }
    }
    out
}

/// Label `i` becomes event `l<i>`; both product operands share the list.
fn label_alphabet_builder(labels: &[Label], name: &str) -> AutomatonBuilder {
    let mut b = AutomatonBuilder::new(name);
    for i in 0..labels.len() {
        b.add_event(EventDecl::new(&format!("l{i}"), true, false))
            .expect("label names are distinct");
    }
    b
}

fn counter_state_name(c: Counter) -> String {
    match c {
        Counter::Warmup => "w".into(),
        Counter::Count(k) => k.to_string(),
    }
}

/// Insertion counter over the given labels. Genuine and deleted events set
/// the counter to 1, insertions increment it and are disabled at `n_a`,
/// decisions leave it unchanged. With `warmup`, insertions before the
/// first genuine or deleted event are not counted.
pub fn build_g_bound(
    labels: &[Label],
    n_a: u32,
    warmup: bool,
) -> Result<(Automaton, Vec<Counter>), ModelError> {
    if n_a == 0 {
        return Err(ModelError::InvalidScenario("N_A must be positive".into()));
    }
    let mut b = label_alphabet_builder(labels, "bound");
    let mut counters = Vec::new();
    if warmup {
        counters.push(Counter::Warmup);
    }
    counters.extend((0..=n_a).map(Counter::Count));
    for (i, c) in counters.iter().enumerate() {
        b.add_state(&counter_state_name(*c), i == 0)?;
    }
    let idx = |c: Counter| counters.iter().position(|d| *d == c).unwrap();
    for (ev, l) in labels.iter().enumerate() {
        for (i, c) in counters.iter().enumerate() {
            let next = match (l, c) {
                (Label::Decision(_), _) => Some(i),
                (Label::Sym(EditSym::Insert(_)), Counter::Warmup) => Some(i),
                (Label::Sym(EditSym::Insert(_)), Counter::Count(k)) if *k < n_a => {
                    Some(idx(Counter::Count(k + 1)))
                }
                (Label::Sym(EditSym::Insert(_)), _) => None,
                (Label::Sym(_), _) => Some(idx(Counter::Count(1))),
            };
            if let Some(d) = next {
                b.add_transition(i, ev, d)?;
            }
        }
    }
    Ok((b.build()?, counters))
}

/// BAIDA = AIDA || G_bound, computed with the generic synchronous product.
pub fn construct_baida(
    aida: &Ida,
    n_a: u32,
    warmup: bool,
) -> Result<Ida, ModelError> {
    let Some(init) = aida.initial() else {
        return Ok(Ida::new());
    };
    let labels = labels_in_order(aida);
    let mut b = label_alphabet_builder(&labels, "aida");
    for n in 0..aida.num_nodes() {
        b.add_state(&format!("n{n}"), n == init)?;
    }
    for n in 0..aida.num_nodes() {
        for (l, d) in aida.edges(n) {
            let ev = labels.iter().position(|m| m == l).unwrap();
            b.add_transition(n, ev, *d)?;
        }
    }
    let a = b.build()?;
    let (gb, counters) = build_g_bound(&labels, n_a, warmup)?;
    let p = a.parallel(&gb)?;
    let mut out = Ida::new();
    for (n, c) in &p.pairs {
        let mut node = aida.node(*n).clone();
        node.counter = Some(counters[*c]);
        out.add_node(node);
    }
    for (s, e, d) in p.automaton.transitions() {
        out.add_edge(s, labels[e].clone(), d)?;
    }
    out.set_initial(p.automaton.initial());
    Ok(out)
}
