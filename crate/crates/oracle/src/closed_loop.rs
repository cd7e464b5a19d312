//! Closed-loop behaviour of an attacked supervisor, evaluated directly from
//! the attacker's reaction map.
//!
//! After an observation `o` (what the attacker has seen), the attacker's
//! possible output histories are F(o). A *candidate* for the next segment is
//! a pair (t3, t2) with t3 ∈ F(o_prev) and t2 ∈ f_A(t3, e); it fixes the
//! control decisions S_A^d(t3 t2^i) for i = 1..|t2| (0..|t2| before the
//! first observation, where t3 = ε). Unobservable plant
//! events must be enabled by a non-decreasing sequence of these decisions,
//! observable ones by the last. A candidate is tracked by the least index
//! still usable, which is enough since decisions only need to exist at
//! some index at or after the previous one.
//!
//! Admissibility is checked per history: whenever a candidate can let the
//! plant fire an observable event, its history must have a reaction to it.

use std::collections::{BTreeSet, HashMap, HashSet};

use idasynth_core::{EditSym, EventId, EventSet, Ida, IdaContext, NodeId, StateId};

use crate::policy::{AttackPolicy, Reactions};

/// One attacker output history with the supervisor position it induces.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct EditCtx<H> {
    hist: H,
    /// μ̃(q0, P_e^S(t)); `None` when undefined.
    sup: Option<StateId>,
    ie: Option<NodeId>,
    /// IE of the history minus its last symbol is defined.
    prev_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Cand<H> {
    sups: Vec<Option<StateId>>,
    end: EditCtx<H>,
}

#[derive(Clone, Debug)]
struct ObsData<H> {
    cands: Vec<Cand<H>>,
    ends: Vec<EditCtx<H>>,
}

/// A reaction the attacker has not decided yet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Missing<H> {
    pub obs: Vec<EventId>,
    pub event: Option<EventId>,
    pub hists: Vec<H>,
}

/// Outcome of a bounded exploration. Witnesses are observation strings.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub horizon: usize,
    pub observations: usize,
    pub admissible: bool,
    pub stealthy: bool,
    pub embedded: bool,
    pub inadmissible_at: Option<Vec<EventId>>,
    pub detected_at: Option<Vec<EventId>>,
    pub escaped_at: Option<Vec<EventId>>,
    /// Some observation whose plant estimate lies in the critical set.
    pub strong_hit: Option<Vec<EventId>>,
    /// Some observation after which a critical state is possible.
    pub weak_hit: Option<Vec<EventId>>,
}

type Item = (StateId, Vec<(u32, u32)>);

pub struct Explorer<'a, P: AttackPolicy> {
    ctx: IdaContext<'a>,
    policy: &'a P,
    track: Option<&'a Ida>,
    decisions: Vec<EventSet>,
    lost: EventSet,
    obs: Vec<ObsData<P::Hist>>,
    obs_index: HashMap<Vec<Cand<P::Hist>>, usize>,
    succ: HashMap<(usize, EventId), usize>,
}

impl<'a, P: AttackPolicy> Explorer<'a, P> {
    pub fn new(ctx: IdaContext<'a>, policy: &'a P) -> Self {
        let decisions = (0..ctx.rt.num_states()).map(|q| ctx.rt.decision(q)).collect();
        Explorer {
            lost: ctx.g.alphabet().uncontrollable(),
            ctx,
            policy,
            track: None,
            decisions,
            obs: Vec::new(),
            obs_index: HashMap::new(),
            succ: HashMap::new(),
        }
    }

    /// Also follow histories through `ida` to check embedding.
    pub fn tracking(mut self, ida: &'a Ida) -> Self {
        self.track = Some(ida);
        self
    }

    fn decision(&self, sup: Option<StateId>) -> &EventSet {
        match sup {
            Some(q) => &self.decisions[q],
            None => &self.lost,
        }
    }

    fn root_ctx(&self) -> EditCtx<P::Hist> {
        EditCtx {
            hist: self.policy.root(),
            sup: Some(self.ctx.rt.initial()),
            ie: self.track.and_then(|t| t.z0()),
            prev_ok: true,
        }
    }

    fn walk(&self, start: &EditCtx<P::Hist>, r: &[EditSym]) -> Option<Cand<P::Hist>> {
        let mut c = start.clone();
        let mut sups = vec![c.sup];
        for s in r {
            let sup = match s.to_supervisor() {
                Some(e) => c.sup.and_then(|q| self.ctx.rt.delta(q, e)),
                None => c.sup,
            };
            let ie = match (self.track, c.ie) {
                (Some(t), Some(z)) => t.step_e(z, *s),
                _ => None,
            };
            c = EditCtx {
                hist: self.policy.extend(&c.hist, *s)?,
                sup,
                prev_ok: c.ie.is_some() || self.track.is_none(),
                ie,
            };
            sups.push(sup);
        }
        Some(Cand { sups, end: c })
    }

    fn intern(&mut self, mut cands: Vec<Cand<P::Hist>>) -> usize {
        cands.sort();
        cands.dedup();
        if let Some(i) = self.obs_index.get(&cands) {
            return *i;
        }
        let mut ends: Vec<EditCtx<P::Hist>> = cands.iter().map(|c| c.end.clone()).collect();
        ends.sort();
        ends.dedup();
        let id = self.obs.len();
        self.obs_index.insert(cands.clone(), id);
        self.obs.push(ObsData { cands, ends });
        id
    }

    fn root_obs(&mut self) -> Result<usize, Missing<P::Hist>> {
        let root = self.root_ctx();
        let cands = match self.policy.react(&root.hist, None) {
            Reactions::Defined(rs) => rs.iter().filter_map(|r| self.walk(&root, r)).collect(),
            Reactions::Undefined => Vec::new(),
            Reactions::Unknown => {
                return Err(Missing {
                    obs: Vec::new(),
                    event: None,
                    hists: vec![root.hist],
                })
            }
        };
        Ok(self.intern(cands))
    }

    fn next_obs(&mut self, id: usize, e: EventId, o: &[EventId]) -> Result<usize, Missing<P::Hist>> {
        if let Some(n) = self.succ.get(&(id, e)) {
            return Ok(*n);
        }
        let mut cands = Vec::new();
        for c in &self.obs[id].ends {
            match self.policy.react(&c.hist, Some(e)) {
                Reactions::Defined(rs) => cands.extend(rs.iter().filter_map(|r| self.walk(c, r))),
                Reactions::Undefined => {}
                Reactions::Unknown => {
                    let mut hists: Vec<P::Hist> = self.obs[id].ends.iter().map(|c| c.hist.clone()).collect();
                    hists.dedup();
                    return Err(Missing {
                        obs: o.to_vec(),
                        event: Some(e),
                        hists,
                    });
                }
            }
        }
        let n = self.intern(cands);
        self.succ.insert((id, e), n);
        Ok(n)
    }

    /// Least index ≥ m at which candidate `c` enables `u`.
    fn advance(&self, id: usize, c: u32, m: u32, u: EventId) -> Option<u32> {
        let sups = &self.obs[id].cands[c as usize].sups;
        (m as usize..sups.len())
            .find(|i| self.decision(sups[*i]).contains(u))
            .map(|i| i as u32)
    }

    fn enables_last(&self, id: usize, mid: &[(u32, u32)], u: EventId) -> bool {
        mid.iter().any(|(c, _)| self.cand_enables_last(id, *c, u))
    }

    fn cand_enables_last(&self, id: usize, c: u32, u: EventId) -> bool {
        let sups = &self.obs[id].cands[c as usize].sups;
        self.decision(*sups.last().unwrap()).contains(u)
    }

    fn unobservable_step(&self, id: usize, mid: &[(u32, u32)], u: EventId) -> Vec<(u32, u32)> {
        mid.iter()
            .filter_map(|(c, m)| self.advance(id, *c, *m, u).map(|i| (*c, i)))
            .collect()
    }

    /// Initial positions in each candidate. After an observed event the
    /// supervisor has already processed the first reaction symbol, so
    /// positions start at 1; before any observation they start at 0.
    fn fresh_mid(&self, id: usize, initial: bool) -> Vec<(u32, u32)> {
        let cands = &self.obs[id].cands;
        (0..cands.len() as u32)
            .map(|c| {
                let start = !initial && cands[c as usize].sups.len() > 1;
                (c, start as u32)
            })
            .collect()
    }

    /// Closure of a set of (plant state, candidate positions) under
    /// unobservable plant moves.
    fn close(&self, id: usize, seed: Vec<Item>) -> BTreeSet<Item> {
        let g = self.ctx.g;
        let unobs = g.alphabet().unobservable();
        let mut set: BTreeSet<Item> = seed.iter().cloned().collect();
        let mut stack = seed;
        while let Some((x, mid)) = stack.pop() {
            for u in unobs.iter() {
                if let Some(y) = g.delta(x, u) {
                    let m = self.unobservable_step(id, &mid, u);
                    if !m.is_empty() && set.insert((y, m.clone())) {
                        stack.push((y, m));
                    }
                }
            }
        }
        set
    }

    fn record(&self, report: &mut Report, id: usize, o: &[EventId]) {
        let data = &self.obs[id];
        if data.cands.is_empty() && report.inadmissible_at.is_none() {
            report.admissible = false;
            report.inadmissible_at = Some(o.to_vec());
        }
        let detected = data
            .ends
            .iter()
            .any(|c| c.sup.is_none_or(|q| self.ctx.rt.is_dead(q)));
        if detected && report.detected_at.is_none() {
            report.stealthy = false;
            report.detected_at = Some(o.to_vec());
        }
        if self.track.is_some() && data.ends.iter().any(|c| !c.prev_ok) && report.escaped_at.is_none() {
            report.embedded = false;
            report.escaped_at = Some(o.to_vec());
        }
    }

    /// Explores all observations of length at most `horizon`. Stops early
    /// when the attacker reports an undecided reaction.
    pub fn check(&mut self, horizon: usize) -> (Report, Option<Missing<P::Hist>>) {
        let mut report = Report {
            horizon,
            admissible: true,
            stealthy: true,
            embedded: true,
            ..Report::default()
        };
        let root = match self.root_obs() {
            Ok(r) => r,
            Err(m) => return (report, Some(m)),
        };
        self.record(&mut report, root, &[]);
        let x0 = self.ctx.g.initial();
        let start = self.close(root, vec![(x0, self.fresh_mid(root, true))]);
        let mut seen: HashSet<(usize, BTreeSet<Item>)> = HashSet::new();
        let mut layer = vec![(Vec::<EventId>::new(), root, start)];
        seen.insert((root, layer[0].2.clone()));
        let crit = self.ctx.crit;
        let observable = self.ctx.g.alphabet().observable();
        for depth in 0..=horizon {
            let mut next = Vec::new();
            for (o, id, items) in &layer {
                report.observations += 1;
                if report.weak_hit.is_none() && items.iter().any(|(x, _)| crit.contains(*x)) {
                    report.weak_hit = Some(o.clone());
                }
                if report.strong_hit.is_none() && items.iter().all(|(x, _)| crit.contains(*x)) {
                    report.strong_hit = Some(o.clone());
                }
                if depth == horizon {
                    continue;
                }
                for u in observable.iter() {
                    // Plant successors, and the candidates whose history
                    // must react to `u`.
                    let mut targets = BTreeSet::new();
                    let mut firing = BTreeSet::new();
                    for (x, mid) in items {
                        let Some(y) = self.ctx.g.delta(*x, u) else { continue };
                        for (c, _) in mid {
                            if self.cand_enables_last(*id, *c, u) {
                                targets.insert(y);
                                firing.insert(*c);
                            }
                        }
                    }
                    if targets.is_empty() {
                        continue;
                    }
                    let mut o2 = o.clone();
                    o2.push(u);
                    let nid = match self.next_obs(*id, u, o) {
                        Ok(n) => n,
                        Err(m) => return (report, Some(m)),
                    };
                    let stuck = firing.iter().any(|c| {
                        let h = &self.obs[*id].cands[*c as usize].end.hist;
                        self.policy.react(h, Some(u)) == Reactions::Undefined
                    });
                    if stuck && report.inadmissible_at.is_none() {
                        report.admissible = false;
                        report.inadmissible_at = Some(o2.clone());
                    }
                    self.record(&mut report, nid, &o2);
                    let mid = self.fresh_mid(nid, false);
                    let seed = targets.into_iter().map(|y| (y, mid.clone())).collect();
                    let items = self.close(nid, seed);
                    if seen.insert((nid, items.clone())) {
                        next.push((o2, nid, items));
                    }
                }
            }
            layer = next;
            if layer.is_empty() {
                break;
            }
        }
        (report, None)
    }

    /// All closed-loop strings of length at most `horizon`.
    pub fn language(&mut self, horizon: usize) -> Result<BTreeSet<Vec<EventId>>, Missing<P::Hist>> {
        let g = self.ctx.g;
        let root = self.root_obs()?;
        let mut out = BTreeSet::new();
        let mut frontier = vec![(Vec::<EventId>::new(), Vec::<EventId>::new(), g.initial(), root, self.fresh_mid(root, true))];
        out.insert(Vec::new());
        for _ in 0..horizon {
            let mut next = Vec::new();
            for (s, o, x, id, mid) in &frontier {
                for u in 0..g.alphabet().len() {
                    let Some(y) = g.delta(*x, u) else { continue };
                    let mut s2 = s.clone();
                    s2.push(u);
                    if g.alphabet().is_observable(u) {
                        if !self.enables_last(*id, mid, u) {
                            continue;
                        }
                        let nid = self.next_obs(*id, u, o)?;
                        let mut o2 = o.clone();
                        o2.push(u);
                        out.insert(s2.clone());
                        next.push((s2, o2, y, nid, self.fresh_mid(nid, false)));
                    } else {
                        let m = self.unobservable_step(*id, mid, u);
                        if m.is_empty() {
                            continue;
                        }
                        out.insert(s2.clone());
                        next.push((s2, o.clone(), y, *id, m));
                    }
                }
            }
            frontier = next;
        }
        Ok(out)
    }
}

/// Admissible, stealthy and damaging within the horizon.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub report: Report,
    pub strong: bool,
}

impl Verdict {
    pub fn hit(&self) -> bool {
        if self.strong {
            self.report.strong_hit.is_some()
        } else {
            self.report.weak_hit.is_some()
        }
    }

    pub fn passes(&self) -> bool {
        self.report.admissible && self.report.stealthy && self.hit()
    }

    pub fn describe(&self, ctx: &IdaContext) -> String {
        let alpha = ctx.g.alphabet();
        let w = |o: &Option<Vec<EventId>>| match o {
            Some(o) => format!("after `{}`", alpha.format_string(o)),
            None => "-".into(),
        };
        let r = &self.report;
        format!(
            "horizon={}\nobservations={}\nadmissible={} {}\nstealthy={} {}\n{}_hit={} {}\npasses={}\n",
            r.horizon,
            r.observations,
            r.admissible,
            w(&r.inadmissible_at),
            r.stealthy,
            w(&r.detected_at),
            if self.strong { "strong" } else { "weak" },
            self.hit(),
            w(if self.strong { &r.strong_hit } else { &r.weak_hit }),
            self.passes()
        )
    }
}

pub fn check_problem1<P: AttackPolicy>(
    ctx: IdaContext,
    policy: &P,
    horizon: usize,
    strong: bool,
) -> Verdict {
    let (report, missing) = Explorer::new(ctx, policy).check(horizon);
    debug_assert!(missing.is_none(), "complete attackers decide every reaction");
    Verdict { report, strong }
}

/// Every output history stays inside `ida` (up to its last symbol).
pub fn check_embedding<P: AttackPolicy>(ctx: IdaContext, policy: &P, ida: &Ida, horizon: usize) -> Report {
    Explorer::new(ctx, policy).tracking(ida).check(horizon).0
}

pub fn closed_loop_language<P: AttackPolicy>(
    ctx: IdaContext,
    policy: &P,
    horizon: usize,
) -> BTreeSet<Vec<EventId>> {
    Explorer::new(ctx, policy)
        .language(horizon)
        .unwrap_or_default()
}
