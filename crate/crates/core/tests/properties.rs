use std::collections::{BTreeMap, BTreeSet, VecDeque};

use idasynth_core::builders::verify_aida_maximality;
use idasynth_core::pruning::{prune_from, PruneClass};
use idasynth_core::random::{random_scenario, RandomConfig};
use idasynth_core::{
    AttackMode, Counter, EditSym, Ida, IdaContext, Label, Node, Scenario, Setup, Side, StateId,
    StateSet,
};
use proptest::prelude::*;

fn setup(seed: u64, mode: AttackMode) -> Setup {
    Setup::new(random_scenario(seed, &RandomConfig::standard(), mode)).unwrap()
}

type Key = (bool, Vec<StateId>, StateId);

/// AIDA recomputed from the plant and R̃ transition tables alone.
/// Returns node keys and labelled edges as strings.
fn reference_aida(ctx: &IdaContext) -> (BTreeSet<Key>, BTreeSet<(Key, String, Key)>) {
    let g = ctx.g;
    let alpha = g.alphabet();
    let closure = |xs: &BTreeSet<StateId>, allowed: &dyn Fn(usize) -> bool| {
        let mut out = xs.clone();
        let mut stack: Vec<StateId> = xs.iter().copied().collect();
        while let Some(x) = stack.pop() {
            for e in 0..alpha.len() {
                if !alpha.is_observable(e) && allowed(e) {
                    if let Some(y) = g.delta(x, e) {
                        if out.insert(y) {
                            stack.push(y);
                        }
                    }
                }
            }
        }
        out
    };
    let key = |s: bool, xs: &BTreeSet<StateId>, q| (s, xs.iter().copied().collect::<Vec<_>>(), q);
    let crit: BTreeSet<StateId> = ctx.crit.iter().collect();
    let mut nodes = BTreeSet::new();
    let mut edges = BTreeSet::new();
    let start: BTreeSet<StateId> = [g.initial()].into();
    let mut queue = VecDeque::from([(true, start, ctx.rt.initial())]);
    while let Some((is_s, xs, q)) = queue.pop_front() {
        if !nodes.insert(key(is_s, &xs, q)) {
            continue;
        }
        let from = key(is_s, &xs, q);
        let dec = ctx.rt.decision(q);
        let mut out = Vec::new();
        if is_s {
            if ctx.rt.is_dead(q) {
                continue;
            }
            let ys = closure(&xs, &|e| dec.contains(e));
            let names: Vec<&str> = dec.iter().map(|e| alpha.name(e)).collect();
            out.push((format!("gamma:{{{}}}", names.join(",")), false, ys, q));
        } else {
            if xs.is_subset(&crit) {
                continue;
            }
            for e in 0..alpha.len() {
                if !alpha.is_observable(e) || !dec.contains(e) {
                    continue;
                }
                let nx: BTreeSet<StateId> = xs.iter().filter_map(|x| g.delta(*x, e)).collect();
                let q2 = ctx.rt.delta(q, e).unwrap();
                let name = alpha.name(e);
                if !nx.is_empty() {
                    out.push((name.to_string(), true, nx.clone(), q2));
                }
                if ctx.ea.is_compromised(e) {
                    if !nx.is_empty() {
                        out.push((format!("{name}.del"), true, nx, q));
                    }
                    out.push((format!("{name}.ins"), true, xs.clone(), q2));
                }
            }
        }
        for (l, s2, ys, q2) in out {
            edges.insert((from.clone(), l, key(s2, &ys, q2)));
            queue.push_back((s2, ys, q2));
        }
    }
    (nodes, edges)
}

fn node_key(n: &Node) -> Key {
    (n.side == Side::S, n.plant.iter().collect(), n.sup)
}

fn ida_edges(ctx: &IdaContext, ida: &Ida) -> BTreeSet<(Key, String, Key)> {
    let mut out = BTreeSet::new();
    for n in 0..ida.num_nodes() {
        for (l, d) in ida.edges(n) {
            out.insert((node_key(ida.node(n)), ctx.label_name(l), node_key(ida.node(*d))));
        }
    }
    out
}

fn uncontrollable(ctx: &IdaContext, l: &Label) -> bool {
    match l {
        Label::Decision(_) => true,
        Label::Sym(EditSym::Genuine(e)) => !ctx.ea.is_compromised(*e),
        Label::Sym(_) => false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn aida_matches_reference_construction(seed in any::<u64>()) {
        let s = setup(seed, AttackMode::Interruptible);
        let ctx = s.ctx();
        let aida = s.aida();
        let (nodes, edges) = reference_aida(&ctx);
        let got: BTreeSet<Key> = aida.nodes().iter().map(node_key).collect();
        prop_assert_eq!(got, nodes);
        prop_assert_eq!(ida_edges(&ctx, &aida), edges);
        prop_assert!(verify_aida_maximality(&ctx, &aida).is_ok());
        let bound = (1usize << (s.scenario.plant.num_states() + 1)) * s.rt.num_states();
        prop_assert!(aida.num_nodes() <= bound);
    }

    #[test]
    fn isda_is_race_free_controllable_and_idempotent(seed in any::<u64>()) {
        let s = setup(seed, AttackMode::Interruptible);
        let ctx = s.ctx();
        let aida = s.aida();
        let an = s.analyse(AttackMode::Interruptible).unwrap();
        let isda = &an.pruned.ida;
        prop_assert!(isda.is_subsystem(&aida));
        for n in 0..isda.num_nodes() {
            let node = isda.node(n);
            prop_assert!(!ctx.is_dead_s(node));
            let a = aida.id_of(node).unwrap();
            for (l, _) in aida.edges(a) {
                if uncontrollable(&ctx, l) {
                    prop_assert!(isda.succ(n, l).is_some());
                }
                if let Label::Sym(EditSym::Genuine(e)) = l {
                    prop_assert!(
                        isda.has_sym(n, EditSym::Genuine(*e)) || isda.has_sym(n, EditSym::Delete(*e))
                    );
                }
            }
        }
        let again = prune_from(&ctx, &aida, isda, PruneClass::Interruptible, Default::default());
        prop_assert_eq!(ctx.write(&again.ida), ctx.write(isda));
    }

    #[test]
    fn usda_flags_restrict_to_insertions(seed in any::<u64>()) {
        let s = setup(seed, AttackMode::Unbounded);
        let ctx = s.ctx();
        let aida = s.aida();
        let p = s.analyse(AttackMode::Unbounded).unwrap().pruned;
        prop_assert!(p.ida.is_subsystem(&aida));
        for n in 0..p.ida.num_nodes() {
            let a = aida.id_of(p.ida.node(n)).unwrap();
            let uc_ok = aida.edges(a).iter().filter(|(l, _)| uncontrollable(&ctx, l)).all(|(l, _)| p.ida.succ(n, l).is_some());
            if p.is_flagged(n) {
                for (l, _) in p.ida.edges(n) {
                    prop_assert!(matches!(l, Label::Decision(_) | Label::Sym(EditSym::Insert(_))));
                }
            } else {
                prop_assert!(uc_ok);
            }
            if !aida.edges(a).is_empty() {
                prop_assert!(!p.ida.edges(n).is_empty());
            }
        }
        let again = prune_from(&ctx, &aida, &p.ida, PruneClass::Unbounded, Default::default());
        prop_assert_eq!(ctx.write(&again.ida), ctx.write(&p.ida));
        prop_assert_eq!(again.flags, p.flags);
    }

    #[test]
    fn baida_and_bsda_respect_the_bound(seed in any::<u64>(), n_a in 1u32..4) {
        let s = setup(seed, AttackMode::Bounded(n_a));
        let ctx = s.ctx();
        let aida = s.aida();
        let an = s.analyse(AttackMode::Bounded(n_a)).unwrap();
        let baida = an.baida.unwrap();
        prop_assert!(baida.forget_counters().is_subsystem(&aida));
        // Reference counter walk: insertions increment, other edits reset to 1.
        let mut seen = BTreeMap::new();
        let mut queue = VecDeque::from([(baida.initial().unwrap(), 0u32)]);
        while let Some((n, k)) = queue.pop_front() {
            if seen.insert(n, k).is_some() {
                continue;
            }
            prop_assert_eq!(baida.node(n).counter, Some(Counter::Count(k)));
            for (l, d) in baida.edges(n) {
                let k2 = match l {
                    Label::Decision(_) => k,
                    Label::Sym(EditSym::Insert(_)) => k + 1,
                    Label::Sym(_) => 1,
                };
                prop_assert!(k2 <= n_a);
                queue.push_back((*d, k2));
            }
        }
        let p = &an.pruned;
        for n in 0..p.ida.num_nodes() {
            if p.ida.node(n).counter == Some(Counter::Count(n_a)) {
                prop_assert!(!p.is_flagged(n));
            }
            prop_assert!(baida.id_of(p.ida.node(n)).is_some());
        }
        let again = prune_from(&ctx, &aida, &p.ida, PruneClass::Bounded(n_a), Default::default());
        prop_assert_eq!(ctx.write(&again.ida), ctx.write(&p.ida));
    }

    #[test]
    fn ida_text_round_trips(seed in any::<u64>(), n_a in 1u32..3) {
        let s = setup(seed, AttackMode::Bounded(n_a));
        let ctx = s.ctx();
        let aida = s.aida();
        let baida = s.baida(&aida, n_a).unwrap();
        for ida in [&aida, &baida] {
            let text = ctx.write(ida);
            let back = ctx.read(&text).unwrap();
            prop_assert_eq!(&back, ida);
            prop_assert_eq!(ctx.write(&back), text);
        }
    }

    #[test]
    fn state_sets_are_canonical(xs in proptest::collection::vec(0usize..12, 0..20)) {
        let a: StateSet = xs.iter().copied().collect();
        let b: StateSet = xs.iter().rev().copied().collect();
        let reference: Vec<usize> = xs.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.as_slice(), &reference[..]);
    }

    #[test]
    fn scenario_text_round_trips(seed in any::<u64>()) {
        let sc = random_scenario(seed, &RandomConfig::standard(), AttackMode::Bounded(2));
        let dir = std::env::temp_dir().join(format!("idasynth-rt-{seed}"));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("g.fsm"), idasynth_core::format::write_automaton(&sc.plant)).unwrap();
        std::fs::write(dir.join("r.fsm"), idasynth_core::format::write_automaton(&sc.supervisor)).unwrap();
        let text = sc.to_text("g.fsm", "r.fsm");
        let back = Scenario::parse(&text, &dir).unwrap();
        std::fs::remove_dir_all(&dir).ok();
        prop_assert_eq!(back.to_text("g.fsm", "r.fsm"), text);
        prop_assert_eq!(back.mode, sc.mode);
    }
}
