//! Supervisor realization, closed-loop observer H and the completed
//! supervisor R̃ with its `dead` state.

use std::collections::{BTreeSet, HashMap};

use crate::automaton::{Automaton, AutomatonBuilder};
use crate::error::ModelError;
use crate::sets::{EventId, EventSet, StateId, StateSet};

pub const DEAD: &str = "dead";

/// H = obs(R||G) together with the (realization, plant) pairs of each state.
#[derive(Clone, Debug)]
pub struct ObservedLoop {
    pub h: Automaton,
    pub product: Automaton,
    pub pairs: Vec<(StateId, StateId)>,
    /// Product-state ids in each H state.
    pub cells: Vec<StateSet>,
}

/// Completed supervisor. States `0..dead` are the H states, `dead` is last.
#[derive(Clone, Debug)]
pub struct RTilde {
    pub automaton: Automaton,
    pub dead: StateId,
    /// (realization state, plant state) pairs of each non-dead state.
    pub cells: Vec<Vec<(StateId, StateId)>>,
}

/// Checks R against G: same alphabet, and unobservable events self-loop.
/// Returns R renumbered to G's event order.
pub fn validate_realization(g: &Automaton, r: &Automaton) -> Result<Automaton, ModelError> {
    let r = r.reorder_alphabet(g.alphabet())?;
    for (s, e, d) in r.transitions() {
        if !r.alphabet().is_observable(e) && s != d {
            return Err(ModelError::InvalidSupervisor(format!(
                "unobservable event `{}` must self-loop at `{}`",
                r.alphabet().name(e),
                r.state_name(s)
            )));
        }
    }
    Ok(r)
}

pub fn build_h(g: &Automaton, r: &Automaton) -> Result<ObservedLoop, ModelError> {
    let r = validate_realization(g, r)?;
    let p = r.parallel(g)?;
    let obs = p.automaton.observer();
    Ok(ObservedLoop {
        h: obs.automaton,
        product: p.automaton,
        pairs: p.pairs,
        cells: obs.cells,
    })
}

/// Plant states reachable in the nominal closed loop R||G.
pub fn closed_loop_states(g: &Automaton, r: &Automaton) -> Result<StateSet, ModelError> {
    let r = validate_realization(g, r)?;
    let p = r.parallel(g)?;
    Ok(p.pairs.iter().map(|(_, x)| *x).collect())
}

pub fn build_rtilde(g: &Automaton, r: &Automaton) -> Result<RTilde, ModelError> {
    let lp = build_h(g, r)?;
    let r = validate_realization(g, r)?;
    let alpha = g.alphabet();
    let n = lp.h.num_states();
    let uc_o = alpha.uncontrollable().intersection(&alpha.observable());
    let uc_uo = alpha.uncontrollable().intersection(&alpha.unobservable());
    let c_uo = alpha.controllable().intersection(&alpha.unobservable());

    let cells: Vec<Vec<(StateId, StateId)>> = lp
        .cells
        .iter()
        .map(|c| c.iter().map(|p| lp.pairs[p]).collect())
        .collect();

    let mut b = AutomatonBuilder::with_alphabet(&format!("{}~", r.name()), alpha.clone());
    let mut used: HashMap<String, usize> = HashMap::new();
    used.insert(DEAD.to_string(), 1);
    for (q, cell) in cells.iter().enumerate() {
        let comps: BTreeSet<&str> = cell.iter().map(|(x, _)| r.state_name(*x)).collect();
        let base = comps.into_iter().collect::<Vec<_>>().join("|");
        let k = used.entry(base.clone()).or_insert(0);
        *k += 1;
        let name = if *k == 1 { base } else { format!("{base}~{k}") };
        b.add_state(&name, q == 0)?;
    }
    let dead = b.add_state(DEAD, false)?;

    for q in 0..n {
        for e in alpha.observable().iter() {
            if let Some(d) = lp.h.delta(q, e) {
                b.add_transition(q, e, d)?;
            }
        }
        let active = lp.h.gamma(&StateSet::singleton(q));
        for e in uc_o.difference(&active).iter() {
            b.add_transition(q, e, dead)?;
        }
        for e in uc_uo.iter() {
            b.add_transition(q, e, q)?;
        }
        for e in c_uo.iter() {
            if lp.cells[q]
                .iter()
                .any(|p| lp.product.delta(p, e).is_some())
            {
                b.add_transition(q, e, q)?;
            }
        }
    }
    for e in alpha.uncontrollable().iter() {
        b.add_transition(dead, e, dead)?;
    }
    Ok(RTilde {
        automaton: b.build()?,
        dead,
        cells,
    })
}

impl RTilde {
    pub fn num_states(&self) -> usize {
        self.automaton.num_states()
    }

    pub fn initial(&self) -> StateId {
        self.automaton.initial()
    }

    pub fn is_dead(&self, q: StateId) -> bool {
        q == self.dead
    }

    /// Γ_R̃(q) without bounds checks.
    pub fn decision(&self, q: StateId) -> EventSet {
        self.automaton.enabled(q)
    }

    /// Γ_R̃(q), the control decision issued at `q`.
    pub fn control_decision(&self, q: StateId) -> Result<EventSet, ModelError> {
        if q >= self.num_states() {
            return Err(ModelError::UnknownState(q.to_string()));
        }
        Ok(self.decision(q))
    }

    pub fn delta(&self, q: StateId, e: EventId) -> Option<StateId> {
        self.automaton.delta(q, e)
    }

    pub fn state_name(&self, q: StateId) -> &str {
        self.automaton.state_name(q)
    }

    /// Structural invariants: no controllable event reaches `dead`, and
    /// `dead` self-loops exactly on Σ_uc.
    pub fn check(&self) -> Result<(), ModelError> {
        let alpha = self.automaton.alphabet();
        for (s, e, d) in self.automaton.transitions() {
            if d == self.dead && s != self.dead && alpha.is_controllable(e) {
                return Err(ModelError::InvalidSupervisor(format!(
                    "controllable `{}` leads to dead",
                    alpha.name(e)
                )));
            }
        }
        if self.decision(self.dead) != alpha.uncontrollable() {
            return Err(ModelError::InvalidSupervisor(
                "dead must enable exactly the uncontrollable events".into(),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::parse_automaton;

    fn g() -> Automaton {
        parse_automaton(
            "automaton g
event a obs unctrl
event u unobs unctrl
event c unobs ctrl
event b obs ctrl
state 0 initial
state 1
state 2
trans 0 a 1
trans 0 c 2
trans 1 u 1
trans 1 b 0
trans 2 b 0",
        )
        .unwrap()
    }

    fn r() -> Automaton {
        parse_automaton(
            "automaton r
event a obs unctrl
event b obs ctrl
event u unobs unctrl
event c unobs ctrl
state P initial
state Q
trans P a Q
trans Q u Q
trans Q b P",
        )
        .unwrap()
    }

    #[test]
    fn rtilde_completion_rules() {
        let rt = build_rtilde(&g(), &r()).unwrap();
        rt.check().unwrap();
        let al = rt.automaton.alphabet().clone();
        let (a, u, c, b) = (
            al.id("a").unwrap(),
            al.id("u").unwrap(),
            al.id("c").unwrap(),
            al.id("b").unwrap(),
        );
        let p = rt.initial();
        assert_eq!(rt.state_name(p), "P");
        let q = rt.delta(p, a).unwrap();
        assert_eq!(rt.state_name(q), "Q");
        // a is uncontrollable, observable and not in Γ_H(Q): goes to dead.
        assert_eq!(rt.delta(q, a), Some(rt.dead));
        // u self-loops everywhere.
        assert_eq!(rt.delta(p, u), Some(p));
        assert_eq!(rt.delta(rt.dead, u), Some(rt.dead));
        // c is controllable and unobservable; enabled nowhere in R, so absent.
        assert_eq!(rt.delta(p, c), None);
        assert_eq!(rt.delta(q, b), Some(p));
        assert_eq!(rt.delta(rt.dead, b), None);
        assert!(rt.control_decision(99).is_err());
    }

    #[test]
    fn unobservable_moves_must_self_loop() {
        let bad = parse_automaton(
            "automaton r
event a obs unctrl
event b obs ctrl
event u unobs unctrl
event c unobs ctrl
state P initial
state Q
trans P u Q",
        )
        .unwrap();
        assert!(matches!(
            build_rtilde(&g(), &bad),
            Err(ModelError::InvalidSupervisor(_))
        ));
    }
}
