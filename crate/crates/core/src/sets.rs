//! Event and state sets.

use std::fmt;

use fixedbitset::FixedBitSet;

pub type EventId = usize;
pub type StateId = usize;

/// A set of events over an alphabet of fixed size.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventSet(FixedBitSet);

impl EventSet {
    pub fn empty(n: usize) -> Self {
        EventSet(FixedBitSet::with_capacity(n))
    }

    pub fn full(n: usize) -> Self {
        let mut b = FixedBitSet::with_capacity(n);
        b.insert_range(..);
        EventSet(b)
    }

    pub fn from_ids<I: IntoIterator<Item = EventId>>(n: usize, ids: I) -> Self {
        let mut s = Self::empty(n);
        for e in ids {
            s.insert(e);
        }
        s
    }

    pub fn capacity(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, e: EventId) -> bool {
        self.0.contains(e)
    }

    pub fn insert(&mut self, e: EventId) {
        self.0.insert(e);
    }

    pub fn remove(&mut self, e: EventId) {
        self.0.set(e, false);
    }

    pub fn union(&self, other: &EventSet) -> EventSet {
        let mut b = self.0.clone();
        b.union_with(&other.0);
        EventSet(b)
    }

    pub fn intersection(&self, other: &EventSet) -> EventSet {
        let mut b = self.0.clone();
        b.intersect_with(&other.0);
        EventSet(b)
    }

    pub fn difference(&self, other: &EventSet) -> EventSet {
        let mut b = self.0.clone();
        b.difference_with(&other.0);
        EventSet(b)
    }

    pub fn is_subset(&self, other: &EventSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    /// Members in ascending id order.
    pub fn iter(&self) -> impl Iterator<Item = EventId> + '_ {
        self.0.ones()
    }
}

impl fmt::Debug for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// A sorted, duplicate-free set of state ids.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet(Vec<StateId>);

impl StateSet {
    pub fn new() -> Self {
        StateSet(Vec::new())
    }

    pub fn singleton(x: StateId) -> Self {
        StateSet(vec![x])
    }

    pub fn contains(&self, x: StateId) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn insert(&mut self, x: StateId) -> bool {
        match self.0.binary_search(&x) {
            Ok(_) => false,
            Err(i) => {
                self.0.insert(i, x);
                true
            }
        }
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.0.iter().all(|x| other.contains(*x))
    }

    pub fn intersects(&self, other: &StateSet) -> bool {
        self.0.iter().any(|x| other.contains(*x))
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        self.0.iter().chain(other.0.iter()).copied().collect()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = StateId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[StateId] {
        &self.0
    }
}

impl FromIterator<StateId> for StateSet {
    fn from_iter<I: IntoIterator<Item = StateId>>(iter: I) -> Self {
        let mut v: Vec<StateId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        StateSet(v)
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn event_set_ops() {
        let a = EventSet::from_ids(4, [0, 2]);
        let b = EventSet::from_ids(4, [2, 3]);
        assert_eq!(a.union(&b).iter().collect::<Vec<_>>(), vec![0, 2, 3]);
        assert_eq!(a.intersection(&b).iter().collect::<Vec<_>>(), vec![2]);
        assert_eq!(a.difference(&b).iter().collect::<Vec<_>>(), vec![0]);
        assert!(EventSet::from_ids(4, [2]).is_subset(&a));
        assert_eq!(EventSet::full(3).len(), 3);
    }

    #[test]
    fn state_set_is_canonical() {
        let a: StateSet = [3, 1, 3, 0].into_iter().collect();
        assert_eq!(a.as_slice(), &[0, 1, 3]);
        let mut b = StateSet::singleton(1);
        b.insert(0);
        b.insert(3);
        assert_eq!(a, b);
        assert!(StateSet::singleton(3).is_subset(&a));
        assert!(!a.intersects(&StateSet::singleton(2)));
    }
}
