//! Pruning of the AIDA into the supremal stealthy structures for the
//! interruptible (ISDA), unbounded (USDA) and bounded (BSDA) attacker
//! classes.
//!
//! Labels split into meta-controllable (compromised genuine events and all
//! edits) and uncontrollable (other genuine events and control decisions).
//! Every check reads Γ_A from the unpruned AIDA node and Γ_H from the
//! current candidate.

use crate::alphabet::EditSym;
use crate::ida::{Counter, Ida, IdaContext, Label, NodeId, Side};

/// Which states survive the trim step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TrimMode {
    #[default]
    Accessible,
    /// Accessible and able to reach an E-state meeting the critical set.
    Coaccessible,
}

/// Race check applied at saturated counters of the bounded structure.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BoundedRace {
    /// Every feasible observable event.
    #[default]
    Full,
    /// Compromised events only.
    Literal,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PruneOptions {
    pub trim: TrimMode,
    pub bounded_race: BoundedRace,
}

/// A pruned structure with its flagged (insertion-only) nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pruned {
    pub ida: Ida,
    pub flags: Vec<bool>,
}

impl Pruned {
    pub fn is_flagged(&self, n: NodeId) -> bool {
        self.flags.get(n).copied().unwrap_or(false)
    }
}

/// Removes S-nodes at `dead` and keeps the accessible part.
pub fn trim_dead(ctx: &IdaContext, ida: &Ida) -> Ida {
    let keep: Vec<bool> = ida.nodes().iter().map(|n| !ctx.is_dead_s(n)).collect();
    ida.restrict(&keep, |_, _, _| true)
}

enum Kind {
    Isda,
    Usda,
    Bsda { n_a: u32, race: BoundedRace },
}

struct Work<'a> {
    ctx: &'a IdaContext<'a>,
    base: Ida,
    refs: Vec<Vec<Label>>,
    alive: Vec<bool>,
    edge: Vec<Vec<bool>>,
    flag: Vec<bool>,
    trim: TrimMode,
}

impl<'a> Work<'a> {
    fn new(ctx: &'a IdaContext<'a>, base: Ida, aida: &Ida, trim: TrimMode) -> Self {
        let refs = base
            .nodes()
            .iter()
            .map(|n| {
                aida.id_of(&n.uncounted())
                    .map(|a| aida.edges(a).iter().map(|(l, _)| l.clone()).collect())
                    .unwrap_or_default()
            })
            .collect();
        let n = base.num_nodes();
        let edge = (0..n).map(|i| vec![true; base.edges(i).len()]).collect();
        Work {
            ctx,
            refs,
            alive: vec![!base.is_empty(); n],
            edge,
            flag: vec![false; n],
            base,
            trim,
        }
    }

    fn uncontrollable(&self, l: &Label) -> bool {
        match l {
            Label::Decision(_) => true,
            Label::Sym(EditSym::Genuine(e)) => !self.ctx.ea.is_compromised(*e),
            Label::Sym(_) => false,
        }
    }

    /// Γ_H of every node of the current candidate.
    fn gamma_h(&self) -> Vec<Vec<Label>> {
        (0..self.base.num_nodes())
            .map(|n| {
                if !self.alive[n] {
                    return Vec::new();
                }
                self.base
                    .edges(n)
                    .iter()
                    .zip(&self.edge[n])
                    .filter(|((_, d), ok)| **ok && self.alive[*d])
                    .map(|((l, _), _)| l.clone())
                    .collect()
            })
            .collect()
    }

    fn controllable_ok(&self, gh: &[Vec<Label>], n: NodeId) -> bool {
        self.refs[n]
            .iter()
            .filter(|l| self.uncontrollable(l))
            .all(|l| gh[n].contains(l))
    }

    fn race_ok(&self, gh: &[Vec<Label>], n: NodeId, compromised_only: bool) -> bool {
        if self.base.node(n).side != Side::E {
            return true;
        }
        self.refs[n].iter().all(|l| match l {
            Label::Sym(EditSym::Genuine(e)) => {
                (compromised_only && !self.ctx.ea.is_compromised(*e))
                    || gh[n].contains(l)
                    || gh[n].contains(&Label::Sym(EditSym::Delete(*e)))
            }
            _ => true,
        })
    }

    fn deadlocked(&self, gh: &[Vec<Label>], n: NodeId) -> bool {
        gh[n].is_empty() && !self.refs[n].is_empty()
    }

    fn at_max(&self, n: NodeId, n_a: u32) -> bool {
        self.base.node(n).counter == Some(Counter::Count(n_a))
    }

    /// Keeps nodes in `keep`, edges between kept nodes that pass
    /// `edge_ok`, then trims.
    fn apply(&mut self, keep: &[bool], edge_ok: impl Fn(&Self, NodeId, &Label) -> bool) {
        for n in 0..self.base.num_nodes() {
            for (i, (l, d)) in self.base.edges(n).iter().enumerate() {
                let ok = self.edge[n][i] && keep[n] && keep[*d] && edge_ok(self, n, l);
                self.edge[n][i] = ok;
            }
        }
        self.alive = keep.to_vec();
        self.trim();
    }

    fn trim(&mut self) {
        let n = self.base.num_nodes();
        let Some(init) = self.base.initial().filter(|i| self.alive[*i]) else {
            self.alive = vec![false; n];
            return;
        };
        let mut seen = vec![false; n];
        seen[init] = true;
        let mut stack = vec![init];
        while let Some(a) = stack.pop() {
            for (i, (_, d)) in self.base.edges(a).iter().enumerate() {
                if self.edge[a][i] && self.alive[*d] && !seen[*d] {
                    seen[*d] = true;
                    stack.push(*d);
                }
            }
        }
        if self.trim == TrimMode::Coaccessible {
            let mut good: Vec<bool> = (0..n)
                .map(|a| {
                    let node = self.base.node(a);
                    seen[a] && node.is_e() && node.plant.intersects(self.ctx.crit)
                })
                .collect();
            let mut changed = true;
            while changed {
                changed = false;
                for a in 0..n {
                    if seen[a] && !good[a] {
                        let reach = self
                            .base
                            .edges(a)
                            .iter()
                            .enumerate()
                            .any(|(i, (_, d))| self.edge[a][i] && seen[*d] && good[*d]);
                        if reach {
                            good[a] = true;
                            changed = true;
                        }
                    }
                }
            }
            for a in 0..n {
                seen[a] &= good[a];
            }
            if !seen[init] {
                self.alive = vec![false; n];
                return;
            }
        }
        self.alive = seen;
    }

    fn round(&mut self, kind: &Kind) {
        let n = self.base.num_nodes();
        let gh = self.gamma_h();
        let live: Vec<NodeId> = (0..n).filter(|a| self.alive[*a]).collect();
        match kind {
            Kind::Isda => {
                let mut keep = self.alive.clone();
                for &a in &live {
                    if !self.controllable_ok(&gh, a) || !self.race_ok(&gh, a, false) {
                        keep[a] = false;
                    }
                }
                self.apply(&keep, |_, _, _| true);
            }
            Kind::Usda => {
                for &a in &live {
                    if !self.controllable_ok(&gh, a) {
                        self.flag[a] = true;
                    }
                }
                let mut keep = self.alive.clone();
                for &a in &live {
                    if self.deadlocked(&gh, a) {
                        keep[a] = false;
                    }
                }
                for &a in &live {
                    if keep[a] && !self.race_ok(&gh, a, false) {
                        self.flag[a] = true;
                    }
                }
                self.apply(&keep, Self::edge_allowed);
            }
            Kind::Bsda { n_a, race } => {
                let mut keep = self.alive.clone();
                for &a in &live {
                    if !self.controllable_ok(&gh, a) {
                        if self.at_max(a, *n_a) {
                            keep[a] = false;
                        } else {
                            self.flag[a] = true;
                        }
                    }
                }
                for &a in &live {
                    if keep[a] && self.deadlocked(&gh, a) {
                        keep[a] = false;
                    }
                }
                let literal = *race == BoundedRace::Literal;
                for &a in &live {
                    if keep[a] && self.at_max(a, *n_a) && !self.race_ok(&gh, a, literal) {
                        keep[a] = false;
                    }
                }
                for &a in &live {
                    if keep[a] && !self.at_max(a, *n_a) && !self.race_ok(&gh, a, false) {
                        self.flag[a] = true;
                    }
                }
                self.apply(&keep, Self::edge_allowed);
            }
        }
    }

    /// Flagged nodes keep only insertions (and decisions, which only occur
    /// at S-nodes).
    fn edge_allowed(&self, n: NodeId, l: &Label) -> bool {
        match l {
            Label::Decision(_) | Label::Sym(EditSym::Insert(_)) => true,
            Label::Sym(_) => !self.flag[n],
        }
    }

    fn run(mut self, kind: Kind) -> Pruned {
        self.trim();
        loop {
            let before = (self.alive.clone(), self.edge.clone(), self.flag.clone());
            self.round(&kind);
            let flags_now: Vec<bool> = self.flag.iter().zip(&self.alive).map(|(f, a)| *f && *a).collect();
            let flags_before: Vec<bool> = before.2.iter().zip(&before.0).map(|(f, a)| *f && *a).collect();
            if before.0 == self.alive && before.1 == self.edge && flags_before == flags_now {
                break;
            }
        }
        let ida = self.base.restrict(&self.alive, |n, l, _| {
            let i = self.base.edges(n).iter().position(|(m, _)| m == l).unwrap();
            self.edge[n][i]
        });
        let flags = ida
            .nodes()
            .iter()
            .map(|node| self.flag[self.base.id_of(node).unwrap()])
            .collect();
        Pruned { ida, flags }
    }
}

/// Attacker class a pruning run targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PruneClass {
    Interruptible,
    Unbounded,
    Bounded(u32),
}

/// Runs a pruning fixpoint starting from `start` (any sub-structure of the
/// AIDA, or of the BAIDA for the bounded class), reading Γ_A from `aida`.
pub fn prune_from(ctx: &IdaContext, aida: &Ida, start: &Ida, class: PruneClass, opts: PruneOptions) -> Pruned {
    let kind = match class {
        PruneClass::Interruptible => Kind::Isda,
        PruneClass::Unbounded => Kind::Usda,
        PruneClass::Bounded(n_a) => Kind::Bsda {
            n_a,
            race: opts.bounded_race,
        },
    };
    Work::new(ctx, start.clone(), aida, opts.trim).run(kind)
}

/// Supremal race-free, meta-controllable sub-structure (interruptible attacker).
pub fn prune_isda(ctx: &IdaContext, aida: &Ida, opts: PruneOptions) -> Ida {
    prune_from(ctx, aida, &trim_dead(ctx, aida), PruneClass::Interruptible, opts).ida
}

/// Unbounded deterministic attacker: violators are flagged and keep only
/// their insertions.
pub fn prune_usda(ctx: &IdaContext, aida: &Ida, opts: PruneOptions) -> Pruned {
    prune_from(ctx, aida, &trim_dead(ctx, aida), PruneClass::Unbounded, opts)
}

/// Bounded deterministic attacker over the BAIDA. Violators below the bound
/// are flagged; at the bound they are removed.
pub fn prune_bsda(ctx: &IdaContext, aida: &Ida, baida: &Ida, n_a: u32, opts: PruneOptions) -> Pruned {
    prune_from(ctx, aida, &trim_dead(ctx, baida), PruneClass::Bounded(n_a), opts)
}
