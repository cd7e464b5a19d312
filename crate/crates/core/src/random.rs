//! Seeded random scenarios for property tests and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::{Automaton, AutomatonBuilder, EventDecl};
use crate::scenario::Scenario;
use crate::supervisor::closed_loop_states;
use crate::synthesis::AttackMode;

#[derive(Clone, Copy, Debug)]
pub struct RandomConfig {
    pub max_states: usize,
    pub max_events: usize,
    pub max_observable: usize,
    pub max_sup_states: usize,
    /// Transitions only go to higher-numbered states.
    pub acyclic: bool,
    pub density: f64,
}

impl RandomConfig {
    /// |X| ≤ 5, |Σ| ≤ 4.
    pub fn standard() -> Self {
        RandomConfig {
            max_states: 5,
            max_events: 4,
            max_observable: 4,
            max_sup_states: 3,
            acyclic: false,
            density: 0.45,
        }
    }

    /// Acyclic, |X| ≤ 3, |Σ_o| ≤ 2, one compromised event.
    pub fn tiny() -> Self {
        RandomConfig {
            max_states: 3,
            max_events: 3,
            max_observable: 2,
            max_sup_states: 2,
            acyclic: true,
            density: 0.6,
        }
    }
}

const EVENT_NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "f"];
const SUP_NAMES: [&str; 4] = ["A", "B", "C", "D"];

fn plant(
    decls: &[EventDecl],
    n: usize,
    trans: &[(usize, usize, usize)],
    absorbing: &[usize],
) -> Automaton {
    let mut b = AutomatonBuilder::new("plant");
    for d in decls {
        b.add_event(d.clone()).unwrap();
    }
    for x in 0..n {
        b.add_state(&x.to_string(), x == 0).unwrap();
    }
    for (s, e, d) in trans {
        if !absorbing.contains(s) {
            b.add_transition(*s, *e, *d).unwrap();
        }
    }
    b.build().unwrap()
}

/// A scenario drawn from `seed`. Critical states are absorbing and, where
/// possible, unreachable in the nominal closed loop.
pub fn random_scenario(seed: u64, cfg: &RandomConfig, mode: AttackMode) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=cfg.max_states);
    let m = rng.gen_range(2..=cfg.max_events.min(EVENT_NAMES.len()));
    let mut decls: Vec<EventDecl> = (0..m)
        .map(|i| EventDecl::new(EVENT_NAMES[i], rng.gen_bool(0.75), rng.gen_bool(0.5)))
        .collect();
    if !decls.iter().any(|d| d.observable) {
        decls[0].observable = true;
    }
    while decls.iter().filter(|d| d.observable).count() > cfg.max_observable {
        let last = decls.iter().rposition(|d| d.observable).unwrap();
        decls[last].observable = false;
    }

    let mut trans = Vec::new();
    for x in 0..n {
        for e in 0..m {
            let lo = if cfg.acyclic { x + 1 } else { 0 };
            if lo < n && rng.gen_bool(cfg.density) {
                trans.push((x, e, rng.gen_range(lo..n)));
            }
        }
    }

    let k = rng.gen_range(1..=cfg.max_sup_states.min(SUP_NAMES.len()));
    let mut rb = AutomatonBuilder::new("sup");
    for d in &decls {
        rb.add_event(d.clone()).unwrap();
    }
    for q in 0..k {
        rb.add_state(SUP_NAMES[q], q == 0).unwrap();
    }
    for q in 0..k {
        for (e, d) in decls.iter().enumerate() {
            if d.controllable && !rng.gen_bool(0.6) {
                continue;
            }
            let dst = if d.observable { rng.gen_range(0..k) } else { q };
            rb.add_transition(q, e, dst).unwrap();
        }
    }
    let sup = rb.build().unwrap();

    let g0 = plant(&decls, n, &trans, &[]);
    let nominal = closed_loop_states(&g0, &sup).expect("generated models are compatible");
    let mut hidden: Vec<usize> = (1..n).filter(|x| !nominal.contains(*x)).collect();
    let mut crit = Vec::new();
    if hidden.is_empty() {
        crit.push(rng.gen_range(1..n));
    } else {
        hidden.shuffle(&mut rng);
        let take = if hidden.len() > 1 && rng.gen_bool(0.3) { 2 } else { 1 };
        crit.extend(hidden.into_iter().take(take));
        crit.sort_unstable();
    }
    let g = plant(&decls, n, &trans, &crit);

    let observable: Vec<&str> = decls
        .iter()
        .filter(|d| d.observable)
        .map(|d| d.name.as_str())
        .collect();
    let max_attack = if cfg.acyclic { 1 } else { observable.len() };
    let na = rng.gen_range(1..=max_attack);
    let mut attack: Vec<&str> = observable.choose_multiple(&mut rng, na).copied().collect();
    attack.sort_unstable();
    let crit_names: Vec<String> = crit.iter().map(|x| x.to_string()).collect();
    let crit_refs: Vec<&str> = crit_names.iter().map(String::as_str).collect();
    Scenario::new(g, sup, &attack, &crit_refs, mode).expect("generated scenario is valid")
}
