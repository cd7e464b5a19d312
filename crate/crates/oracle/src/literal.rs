//! Brute-force closed-loop language, used to cross-check [`Explorer`] on
//! tiny instances. Every index sequence is enumerated explicitly.
//!
//! [`Explorer`]: crate::closed_loop::Explorer

use std::collections::{BTreeMap, BTreeSet};

use idasynth_core::alphabet::p_s;
use idasynth_core::{EditSym, EventId, EventSet, IdaContext};

/// f_A(u, e), with `e = None` for the initial reactions.
pub type ReactionFn<'a> = dyn Fn(&[EditSym], Option<EventId>) -> Option<Vec<Vec<EditSym>>> + 'a;

struct Literal<'a> {
    ctx: IdaContext<'a>,
    f: &'a ReactionFn<'a>,
    fhat: BTreeMap<Vec<EventId>, BTreeSet<Vec<EditSym>>>,
    member: BTreeMap<Vec<EventId>, bool>,
}

impl<'a> Literal<'a> {
    /// S_A^d(w) = Γ_R̃(μ̃(q0, P_e^S(w))), Σ_uc when μ̃ is undefined.
    fn decision(&self, w: &[EditSym]) -> EventSet {
        let rt = self.ctx.rt;
        match rt.automaton.step(rt.initial(), &p_s(w)) {
            Some(q) => rt.decision(q),
            None => self.ctx.g.alphabet().uncontrollable(),
        }
    }

    fn fhat(&mut self, o: &[EventId]) -> BTreeSet<Vec<EditSym>> {
        if let Some(v) = self.fhat.get(o) {
            return v.clone();
        }
        let v: BTreeSet<Vec<EditSym>> = match o.split_last() {
            None => (self.f)(&[], None).unwrap_or_default().into_iter().collect(),
            Some((e, rest)) => {
                let mut v = BTreeSet::new();
                for u in self.fhat(rest) {
                    for t in (self.f)(&u, Some(*e)).unwrap_or_default() {
                        v.insert([u.clone(), t].concat());
                    }
                }
                v
            }
        };
        self.fhat.insert(o.to_vec(), v.clone());
        v
    }

    /// Some non-decreasing i_1..i_k in `first..=|t2|` (with i_k = |t2| when
    /// `last_fixed`) has t1[j] ∈ S_A^d(t3 t2^{i_j}).
    fn indices_exist(&self, t3: &[EditSym], t2: &[EditSym], t1: &[EventId], last_fixed: bool, first: usize) -> bool {
        fn rec(l: &Literal, t3: &[EditSym], t2: &[EditSym], t1: &[EventId], j: usize, lo: usize, last_fixed: bool) -> bool {
            if j == t1.len() {
                return true;
            }
            for i in lo..=t2.len() {
                if last_fixed && j + 1 == t1.len() && i != t2.len() {
                    continue;
                }
                let w = [t3, &t2[..i]].concat();
                if l.decision(&w).contains(t1[j]) && rec(l, t3, t2, t1, j + 1, i, last_fixed) {
                    return true;
                }
            }
            false
        }
        rec(self, t3, t2, t1, 0, first.min(t2.len()), last_fixed)
    }

    fn is_member(&mut self, s: &[EventId]) -> bool {
        if s.is_empty() {
            return true;
        }
        if let Some(b) = self.member.get(s) {
            return *b;
        }
        let alpha = self.ctx.g.alphabet();
        let g = self.ctx.g;
        let mut ok = g.step(g.initial(), s).is_some();
        if ok {
            // s = prefix · t1, prefix empty or ending in an observable event,
            // t1 ∈ Σ_uo* (Σ_o ∪ ε).
            let last_obs = alpha.is_observable(*s.last().unwrap());
            let body = if last_obs { &s[..s.len() - 1] } else { s };
            let cut = body.iter().rposition(|e| alpha.is_observable(*e)).map_or(0, |i| i + 1);
            let (prefix, t1) = s.split_at(cut);
            ok = self.is_member(prefix);
            if ok {
                // After an observed event the decision before its reaction
                // no longer applies: indices start at 1.
                let first = usize::from(!prefix.is_empty());
                let pairs: Vec<(Vec<EditSym>, Vec<EditSym>)> = match prefix.split_last() {
                    None => (self.f)(&[], None)
                        .unwrap_or_default()
                        .into_iter()
                        .map(|t2| (Vec::new(), t2))
                        .collect(),
                    Some((e, before)) => {
                        let o = alpha.project(before);
                        let mut v = Vec::new();
                        for t3 in self.fhat(&o) {
                            for t2 in (self.f)(&t3, Some(*e)).unwrap_or_default() {
                                v.push((t3.clone(), t2));
                            }
                        }
                        v
                    }
                };
                ok = pairs
                    .iter()
                    .any(|(t3, t2)| self.indices_exist(t3, t2, t1, last_obs, first));
            }
        }
        self.member.insert(s.to_vec(), ok);
        ok
    }
}

/// L(S_A/G) up to `horizon`, by direct evaluation of the recursive definition.
pub fn literal_language(ctx: IdaContext, f: &ReactionFn, horizon: usize) -> BTreeSet<Vec<EventId>> {
    let mut l = Literal {
        ctx,
        f,
        fhat: BTreeMap::new(),
        member: BTreeMap::new(),
    };
    ctx.g
        .language(horizon)
        .into_iter()
        .filter(|s| l.is_member(s))
        .collect()
}
