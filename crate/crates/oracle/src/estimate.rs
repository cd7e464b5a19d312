//! Direct evaluation of the attacker's state estimate along an edit string.

use idasynth_core::alphabet::p_s;
use idasynth_core::{EditSym, EventSet, IdaContext, StateId, StateSet};

fn closure(ctx: &IdaContext, s: &StateSet, gamma: &EventSet) -> StateSet {
    let g = ctx.g;
    let mut out: Vec<StateId> = s.iter().collect();
    let mut i = 0;
    while i < out.len() {
        let x = out[i];
        for u in gamma.iter() {
            if g.alphabet().is_observable(u) {
                continue;
            }
            if let Some(y) = g.delta(x, u) {
                if !out.contains(&y) {
                    out.push(y);
                }
            }
        }
        i += 1;
    }
    out.into_iter().collect()
}

/// μ̃(q0, P_e^S(w)).
pub fn supervisor_after(ctx: &IdaContext, w: &[EditSym]) -> Option<StateId> {
    ctx.rt.automaton.step(ctx.rt.initial(), &p_s(w))
}

/// Plant states consistent with the edit string `w`: start from the
/// unobservable closure of x0 under the first decision; each genuine or
/// deleted event moves the estimate, insertions leave it; every step closes
/// under the decision issued after the prefix. `None` if a decision is
/// undefined or the estimate empties.
pub fn reach_estimate(ctx: &IdaContext, w: &[EditSym]) -> Option<StateSet> {
    let decision = |k: usize| supervisor_after(ctx, &w[..k]).map(|q| ctx.rt.decision(q));
    let mut re = closure(ctx, &StateSet::singleton(ctx.g.initial()), &decision(0)?);
    for (i, s) in w.iter().enumerate() {
        let moved = match s.to_plant() {
            Some(e) => re.iter().filter_map(|x| ctx.g.delta(x, e)).collect(),
            None => re,
        };
        re = closure(ctx, &moved, &decision(i + 1)?);
        if re.is_empty() {
            return None;
        }
    }
    Some(re)
}
