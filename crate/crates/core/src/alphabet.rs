//! Insertion/deletion edit alphabet and its projections.

use std::fmt;

use crate::automaton::Alphabet;
use crate::error::ModelError;
use crate::sets::{EventId, EventSet};

pub const INS_SUFFIX: &str = ".ins";
pub const DEL_SUFFIX: &str = ".del";

/// A symbol of Σ_o ∪ Σ_a^i ∪ Σ_a^d. The variant order gives the tie-break
/// genuine < deletion < insertion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EditSym {
    Genuine(EventId),
    Delete(EventId),
    Insert(EventId),
}

impl EditSym {
    /// The mask M_e: the underlying event.
    pub fn event(self) -> EventId {
        match self {
            EditSym::Genuine(e) | EditSym::Delete(e) | EditSym::Insert(e) => e,
        }
    }

    pub fn is_insertion(self) -> bool {
        matches!(self, EditSym::Insert(_))
    }

    /// Event seen by the supervisor.
    pub fn to_supervisor(self) -> Option<EventId> {
        match self {
            EditSym::Genuine(e) | EditSym::Insert(e) => Some(e),
            EditSym::Delete(_) => None,
        }
    }

    /// Event executed by the plant.
    pub fn to_plant(self) -> Option<EventId> {
        match self {
            EditSym::Genuine(e) | EditSym::Delete(e) => Some(e),
            EditSym::Insert(_) => None,
        }
    }

    fn sort_key(self) -> (EventId, u8) {
        match self {
            EditSym::Genuine(e) => (e, 0),
            EditSym::Delete(e) => (e, 1),
            EditSym::Insert(e) => (e, 2),
        }
    }
}

/// Canonical ordering: event declaration order, then genuine < deletion < insertion.
pub fn sym_order(a: &EditSym, b: &EditSym) -> std::cmp::Ordering {
    a.sort_key().cmp(&b.sort_key())
}

/// The plant alphabet together with the compromised set Σ_a ⊆ Σ_o.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EditAlphabet {
    base: Alphabet,
    compromised: EventSet,
}

impl EditAlphabet {
    pub fn new(base: &Alphabet, compromised: EventSet) -> Result<Self, ModelError> {
        for d in base.decls() {
            if d.name.ends_with(INS_SUFFIX) || d.name.ends_with(DEL_SUFFIX) {
                return Err(ModelError::InvalidAttack(format!(
                    "event name `{}` uses a reserved suffix",
                    d.name
                )));
            }
        }
        if compromised.capacity() != base.len() {
            return Err(ModelError::InvalidAttack("set size mismatch".into()));
        }
        for e in compromised.iter() {
            if !base.is_observable(e) {
                return Err(ModelError::InvalidAttack(format!(
                    "compromised event `{}` is unobservable",
                    base.name(e)
                )));
            }
        }
        Ok(EditAlphabet {
            base: base.clone(),
            compromised,
        })
    }

    pub fn from_names(base: &Alphabet, names: &[&str]) -> Result<Self, ModelError> {
        let set = base.event_set(names)?;
        Self::new(base, set)
    }

    pub fn base(&self) -> &Alphabet {
        &self.base
    }

    pub fn compromised(&self) -> &EventSet {
        &self.compromised
    }

    pub fn is_compromised(&self, e: EventId) -> bool {
        self.compromised.contains(e)
    }

    /// Σ_o ∪ Σ_a^i ∪ Σ_a^d in canonical order.
    pub fn symbols(&self) -> Vec<EditSym> {
        let mut out = Vec::new();
        for e in self.base.observable().iter() {
            out.push(EditSym::Genuine(e));
            if self.is_compromised(e) {
                out.push(EditSym::Delete(e));
                out.push(EditSym::Insert(e));
            }
        }
        out
    }

    pub fn is_symbol(&self, s: EditSym) -> bool {
        match s {
            EditSym::Genuine(e) => e < self.base.len() && self.base.is_observable(e),
            EditSym::Delete(e) | EditSym::Insert(e) => {
                e < self.base.len() && self.is_compromised(e)
            }
        }
    }

    pub fn sym_name(&self, s: EditSym) -> String {
        match s {
            EditSym::Genuine(e) => self.base.name(e).to_string(),
            EditSym::Delete(e) => format!("{}{DEL_SUFFIX}", self.base.name(e)),
            EditSym::Insert(e) => format!("{}{INS_SUFFIX}", self.base.name(e)),
        }
    }

    pub fn parse_sym(&self, name: &str) -> Result<EditSym, ModelError> {
        let s = if let Some(b) = name.strip_suffix(INS_SUFFIX) {
            EditSym::Insert(self.base.lookup(b)?)
        } else if let Some(b) = name.strip_suffix(DEL_SUFFIX) {
            EditSym::Delete(self.base.lookup(b)?)
        } else {
            EditSym::Genuine(self.base.lookup(name)?)
        };
        if !self.is_symbol(s) {
            return Err(ModelError::UnknownEvent(name.to_string()));
        }
        Ok(s)
    }

    pub fn format_word(&self, w: &[EditSym]) -> String {
        if w.is_empty() {
            return "ε".to_string();
        }
        w.iter()
            .map(|s| self.sym_name(*s))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// P_e^S: what the supervisor observes.
pub fn p_s(w: &[EditSym]) -> Vec<EventId> {
    w.iter().filter_map(|s| s.to_supervisor()).collect()
}

/// P_e^G: what the plant executes.
pub fn p_g(w: &[EditSym]) -> Vec<EventId> {
    w.iter().filter_map(|s| s.to_plant()).collect()
}

/// M_e: drops the edit marks.
pub fn mask(w: &[EditSym]) -> Vec<EventId> {
    w.iter().map(|s| s.event()).collect()
}

impl fmt::Display for EditSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EditSym::Genuine(e) => write!(f, "{e}"),
            EditSym::Delete(e) => write!(f, "{e}{DEL_SUFFIX}"),
            EditSym::Insert(e) => write!(f, "{e}{INS_SUFFIX}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::EventDecl;
    use proptest::prelude::*;

    fn base() -> Alphabet {
        let mut a = Alphabet::new();
        a.push(EventDecl::new("a", true, false)).unwrap();
        a.push(EventDecl::new("b", true, true)).unwrap();
        a.push(EventDecl::new("u", false, true)).unwrap();
        a
    }

    #[test]
    fn symbols_and_names() {
        let ea = EditAlphabet::from_names(&base(), &["b"]).unwrap();
        let names: Vec<String> = ea.symbols().iter().map(|s| ea.sym_name(*s)).collect();
        assert_eq!(names, vec!["a", "b", "b.del", "b.ins"]);
        assert_eq!(ea.parse_sym("b.ins").unwrap(), EditSym::Insert(1));
        assert!(ea.parse_sym("a.ins").is_err());
        assert!(ea.parse_sym("u").is_err());
    }

    #[test]
    fn rejects_unobservable_compromise() {
        assert!(EditAlphabet::from_names(&base(), &["u"]).is_err());
    }

    #[test]
    fn projections_of_example_word() {
        let w = [EditSym::Genuine(0), EditSym::Delete(1), EditSym::Insert(1)];
        assert_eq!(p_s(&w), vec![0, 1]);
        assert_eq!(p_g(&w), vec![0, 1]);
        assert_eq!(mask(&w), vec![0, 1, 1]);
    }

    fn sym() -> impl Strategy<Value = EditSym> {
        (0usize..3, 0u8..3).prop_map(|(e, k)| match k {
            0 => EditSym::Genuine(e),
            1 => EditSym::Delete(e),
            _ => EditSym::Insert(e),
        })
    }

    proptest! {
        #[test]
        fn projections_are_homomorphisms(u in prop::collection::vec(sym(), 0..6),
                                         v in prop::collection::vec(sym(), 0..6)) {
            let uv: Vec<EditSym> = u.iter().chain(v.iter()).copied().collect();
            let cat = |x: Vec<EventId>, y: Vec<EventId>| [x, y].concat();
            prop_assert_eq!(p_s(&uv), cat(p_s(&u), p_s(&v)));
            prop_assert_eq!(p_g(&uv), cat(p_g(&u), p_g(&v)));
            prop_assert_eq!(mask(&uv), cat(mask(&u), mask(&v)));
            prop_assert_eq!(mask(&uv).len(), uv.len());
        }
    }
}
