//! Attackers as seen by the oracle: a history handle plus a reaction map.

use std::collections::BTreeMap;
use std::hash::Hash;

use idasynth_core::{AttackFunction, EditSym, EventId, StateId};

/// Outcome of asking an attacker for f_A(h, e).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reactions {
    Defined(Vec<Vec<EditSym>>),
    Undefined,
    /// Not decided yet (partial tables during enumeration).
    Unknown,
}

pub trait AttackPolicy {
    /// Abstraction of the attacker's output history.
    type Hist: Clone + Ord + Hash + std::fmt::Debug;

    fn root(&self) -> Self::Hist;

    /// f_A(h, e); `e = None` requests the initial reactions at the root.
    fn react(&self, h: &Self::Hist, e: Option<EventId>) -> Reactions;

    fn extend(&self, h: &Self::Hist, s: EditSym) -> Option<Self::Hist>;
}

impl AttackPolicy for AttackFunction {
    type Hist = StateId;

    fn root(&self) -> StateId {
        self.initial()
    }

    fn react(&self, h: &StateId, e: Option<EventId>) -> Reactions {
        match self.reactions_at(*h, e) {
            Some(r) => Reactions::Defined(r),
            None => Reactions::Undefined,
        }
    }

    fn extend(&self, h: &StateId, s: EditSym) -> Option<StateId> {
        self.delta(*h, s)
    }
}

/// Explicit attack table keyed by full output history. Missing keys are
/// undefined once `complete` is set, unknown otherwise.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TableAttacker {
    pub initial: Option<Vec<Vec<EditSym>>>,
    pub entries: BTreeMap<(Vec<EditSym>, EventId), Option<Vec<Vec<EditSym>>>>,
    pub complete: bool,
}

impl TableAttacker {
    /// f_A(w, e) as a set of strings, `None` when undefined.
    pub fn lookup(&self, w: &[EditSym], e: Option<EventId>) -> Option<Vec<Vec<EditSym>>> {
        match self.react(&w.to_vec(), e) {
            Reactions::Defined(r) => Some(r),
            _ => None,
        }
    }
}

impl AttackPolicy for TableAttacker {
    type Hist = Vec<EditSym>;

    fn root(&self) -> Vec<EditSym> {
        Vec::new()
    }

    fn react(&self, h: &Vec<EditSym>, e: Option<EventId>) -> Reactions {
        let unknown = if self.complete {
            Reactions::Undefined
        } else {
            Reactions::Unknown
        };
        let Some(e) = e else {
            if !h.is_empty() {
                return Reactions::Undefined;
            }
            return match &self.initial {
                Some(r) => Reactions::Defined(r.clone()),
                None => unknown,
            };
        };
        match self.entries.get(&(h.clone(), e)) {
            Some(Some(r)) => Reactions::Defined(r.clone()),
            Some(None) => Reactions::Undefined,
            None => unknown,
        }
    }

    fn extend(&self, h: &Vec<EditSym>, s: EditSym) -> Option<Vec<EditSym>> {
        let mut w = h.clone();
        w.push(s);
        Some(w)
    }
}

/// The identity attacker: every observed event is passed on unchanged.
#[derive(Clone, Copy, Debug, Default)]
pub struct Relay;

impl AttackPolicy for Relay {
    type Hist = ();

    fn root(&self) {}

    fn react(&self, _: &(), e: Option<EventId>) -> Reactions {
        match e {
            None => Reactions::Defined(vec![Vec::new()]),
            Some(e) => Reactions::Defined(vec![vec![EditSym::Genuine(e)]]),
        }
    }

    fn extend(&self, _: &(), _: EditSym) -> Option<()> {
        Some(())
    }
}
