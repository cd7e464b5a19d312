use std::path::PathBuf;

use idasynth_core::builders::verify_aida_maximality;
use idasynth_core::pruning::{prune_isda, prune_usda, PruneOptions};
use idasynth_core::synthesis::{feasibility, shortest_path, synthesize};
use idasynth_core::{AttackMode, EditSym, Preference, Scenario, Setup, Side, Strength};

fn setup() -> Setup {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/example1/scenario.txt");
    Setup::new(Scenario::load(&path).unwrap()).unwrap()
}

fn sorted_edges(setup: &Setup, ida: &idasynth_core::Ida, n: usize) -> Vec<String> {
    let ctx = setup.ctx();
    let mut v: Vec<String> = ida
        .edges(n)
        .iter()
        .map(|(l, d)| format!("{} -> {}", ctx.label_name(l), ctx.node_label(ida.node(*d))))
        .collect();
    v.sort();
    v
}

#[test]
fn rtilde_has_dead_completion() {
    let s = setup();
    let names: Vec<&str> = s.rt.automaton.state_names().iter().map(String::as_str).collect();
    assert_eq!(names, vec!["A", "B", "C", "dead"]);
    let a = s.scenario.plant.alphabet().id("a").unwrap();
    let b_state = s.rt.automaton.state_id("B").unwrap();
    assert_eq!(s.rt.delta(b_state, a), Some(s.rt.dead));
    assert_eq!(s.rt.delta(s.rt.dead, a), Some(s.rt.dead));
    s.rt.check().unwrap();
}

#[test]
fn aida_matches_hand_expansion() {
    let s = setup();
    let ctx = s.ctx();
    let aida = s.aida();
    verify_aida_maximality(&ctx, &aida).unwrap();
    let s_nodes = aida.nodes().iter().filter(|n| n.side == Side::S).count();
    let e_nodes = aida.nodes().iter().filter(|n| n.side == Side::E).count();
    assert_eq!((s_nodes, e_nodes), (7, 6));

    let e1b = ctx.find(&aida, Side::E, &["1"], "B").unwrap();
    assert_eq!(
        sorted_edges(&s, &aida, e1b),
        vec!["b -> S({3},C)", "b.del -> S({3},B)", "b.ins -> S({1},C)"]
    );
    let e3b = ctx.find(&aida, Side::E, &["3"], "B").unwrap();
    assert_eq!(sorted_edges(&s, &aida, e3b), vec!["a -> S({0},dead)", "b.ins -> S({3},C)"]);
    let dead = ctx.find(&aida, Side::S, &["0"], "dead").unwrap();
    assert!(aida.edges(dead).is_empty());
    let e2a = ctx.find(&aida, Side::E, &["2"], "A").unwrap();
    assert!(aida.edges(e2a).is_empty());
}

#[test]
fn pruned_structures() {
    let s = setup();
    let ctx = s.ctx();
    let aida = s.aida();
    let isda = prune_isda(&ctx, &aida, PruneOptions::default());
    let e1b = ctx.find(&isda, Side::E, &["1"], "B").unwrap();
    assert!(!isda.has_sym(e1b, EditSym::Delete(1)));
    assert!(isda.has_sym(e1b, EditSym::Insert(1)));

    let usda = prune_usda(&ctx, &aida, PruneOptions::default());
    assert_eq!(usda.ida.num_nodes(), aida.num_nodes() - 1);
    assert_eq!(usda.ida.num_edges(), aida.num_edges() - 1);
    let u1b = ctx.find(&usda.ida, Side::E, &["1"], "B").unwrap();
    assert!(usda.ida.has_sym(u1b, EditSym::Delete(1)));
    let u3b = ctx.find(&usda.ida, Side::E, &["3"], "B").unwrap();
    assert!(usda.ida.has_sym(u3b, EditSym::Insert(1)));
    assert!(usda.is_flagged(u3b));
}

#[test]
fn strong_attack_path_and_function() {
    let s = setup();
    let ctx = s.ctx();
    let an = s.analyse(AttackMode::Interruptible).unwrap();
    let target = feasibility(&ctx, &an.pruned.ida, Strength::Strong).unwrap();
    let path = shortest_path(&an.pruned.ida, target).unwrap();
    let visited: Vec<String> = path
        .iter()
        .filter(|(a, _, _)| an.pruned.ida.node(*a).is_e())
        .map(|(a, _, _)| ctx.node_label(an.pruned.ida.node(*a)))
        .collect();
    assert_eq!(visited, vec!["E({0},A)", "E({1},B)", "E({1},C)"]);

    let syn = synthesize(&ctx, &an.pruned, AttackMode::Interruptible, Strength::Strong, Preference::LetThrough).unwrap();
    let f = &syn.function;
    let (a, b, c) = (0, 1, 2);
    let words = |r: Option<Vec<Vec<EditSym>>>| {
        let mut v: Vec<String> = r.unwrap().iter().map(|w| ctx.ea.format_word(w)).collect();
        v.sort();
        v
    };
    let g = EditSym::Genuine;
    assert_eq!(words(f.evaluate(&[], Some(a))), vec!["a", "a b.ins"]);
    assert_eq!(words(f.evaluate(&[g(a)], Some(b))), vec!["b"]);
    assert_eq!(words(f.evaluate(&[g(a), g(b)], Some(a))), vec!["a"]);
    assert_eq!(words(f.evaluate(&[g(a), g(b)], Some(c))), vec!["c"]);
}
