//! Deterministic finite automata with observability and controllability
//! attributes on events.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::ModelError;
use crate::sets::{EventId, EventSet, StateId, StateSet};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EventDecl {
    pub name: String,
    pub observable: bool,
    pub controllable: bool,
}

impl EventDecl {
    pub fn new(name: &str, observable: bool, controllable: bool) -> Self {
        EventDecl {
            name: name.to_string(),
            observable,
            controllable,
        }
    }
}

/// Ordered event declarations. Declaration order fixes event ids.
#[derive(Clone, Debug, Default)]
pub struct Alphabet {
    events: Vec<EventDecl>,
    index: HashMap<String, EventId>,
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.events == other.events
    }
}

impl Eq for Alphabet {}

/// Names usable for states and events in the text formats.
pub fn is_valid_name(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| !c.is_whitespace() && !matches!(c, '#' | ',' | '{' | '}'))
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, decl: EventDecl) -> Result<EventId, ModelError> {
        if !is_valid_name(&decl.name) {
            return Err(ModelError::UnknownEvent(decl.name));
        }
        if self.index.contains_key(&decl.name) {
            return Err(ModelError::DuplicateEvent(decl.name));
        }
        let id = self.events.len();
        self.index.insert(decl.name.clone(), id);
        self.events.push(decl);
        Ok(id)
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn get(&self, e: EventId) -> &EventDecl {
        &self.events[e]
    }

    pub fn name(&self, e: EventId) -> &str {
        &self.events[e].name
    }

    pub fn id(&self, name: &str) -> Option<EventId> {
        self.index.get(name).copied()
    }

    pub fn lookup(&self, name: &str) -> Result<EventId, ModelError> {
        self.id(name)
            .ok_or_else(|| ModelError::UnknownEvent(name.to_string()))
    }

    pub fn decls(&self) -> &[EventDecl] {
        &self.events
    }

    fn filtered(&self, f: impl Fn(&EventDecl) -> bool) -> EventSet {
        EventSet::from_ids(
            self.len(),
            self.events
                .iter()
                .enumerate()
                .filter(|(_, d)| f(d))
                .map(|(i, _)| i),
        )
    }

    pub fn all(&self) -> EventSet {
        EventSet::full(self.len())
    }

    pub fn observable(&self) -> EventSet {
        self.filtered(|d| d.observable)
    }

    pub fn unobservable(&self) -> EventSet {
        self.filtered(|d| !d.observable)
    }

    pub fn controllable(&self) -> EventSet {
        self.filtered(|d| d.controllable)
    }

    pub fn uncontrollable(&self) -> EventSet {
        self.filtered(|d| !d.controllable)
    }

    pub fn is_observable(&self, e: EventId) -> bool {
        self.events[e].observable
    }

    pub fn is_controllable(&self, e: EventId) -> bool {
        self.events[e].controllable
    }

    /// Natural projection onto observable events.
    pub fn project(&self, s: &[EventId]) -> Vec<EventId> {
        s.iter()
            .copied()
            .filter(|e| self.is_observable(*e))
            .collect()
    }

    pub fn event_set(&self, names: &[&str]) -> Result<EventSet, ModelError> {
        let mut s = EventSet::empty(self.len());
        for n in names {
            s.insert(self.lookup(n)?);
        }
        Ok(s)
    }

    /// `{a,b}` in declaration order.
    pub fn format_set(&self, s: &EventSet) -> String {
        let names: Vec<&str> = s.iter().map(|e| self.name(e)).collect();
        format!("{{{}}}", names.join(","))
    }

    pub fn format_string(&self, s: &[EventId]) -> String {
        if s.is_empty() {
            return "ε".to_string();
        }
        s.iter()
            .map(|e| self.name(*e))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A deterministic finite automaton with a single initial state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    name: String,
    alphabet: Alphabet,
    states: Vec<String>,
    state_index: HashMap<String, StateId>,
    delta: Vec<Vec<Option<StateId>>>,
    initial: StateId,
}

/// Incremental construction with duplicate and determinism checks.
#[derive(Clone, Debug, Default)]
pub struct AutomatonBuilder {
    name: String,
    alphabet: Alphabet,
    states: Vec<String>,
    state_index: HashMap<String, StateId>,
    initial: Option<StateId>,
    trans: Vec<(StateId, EventId, StateId)>,
}

impl AutomatonBuilder {
    pub fn new(name: &str) -> Self {
        AutomatonBuilder {
            name: name.to_string(),
            ..Default::default()
        }
    }

    pub fn with_alphabet(name: &str, alphabet: Alphabet) -> Self {
        AutomatonBuilder {
            name: name.to_string(),
            alphabet,
            ..Default::default()
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn add_event(&mut self, decl: EventDecl) -> Result<EventId, ModelError> {
        self.alphabet.push(decl)
    }

    pub fn add_state(&mut self, name: &str, initial: bool) -> Result<StateId, ModelError> {
        if !is_valid_name(name) {
            return Err(ModelError::UnknownState(name.to_string()));
        }
        if self.state_index.contains_key(name) {
            return Err(ModelError::DuplicateState(name.to_string()));
        }
        let id = self.states.len();
        self.states.push(name.to_string());
        self.state_index.insert(name.to_string(), id);
        if initial {
            if self.initial.is_some() {
                return Err(ModelError::MultipleInitial(self.name.clone()));
            }
            self.initial = Some(id);
        }
        Ok(id)
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_index.get(name).copied()
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn add_transition(
        &mut self,
        src: StateId,
        e: EventId,
        dst: StateId,
    ) -> Result<(), ModelError> {
        if src >= self.states.len() {
            return Err(ModelError::UnknownState(src.to_string()));
        }
        if dst >= self.states.len() {
            return Err(ModelError::UnknownState(dst.to_string()));
        }
        if e >= self.alphabet.len() {
            return Err(ModelError::UnknownEvent(e.to_string()));
        }
        self.trans.push((src, e, dst));
        Ok(())
    }

    pub fn add_transition_by_name(
        &mut self,
        src: &str,
        e: &str,
        dst: &str,
    ) -> Result<(), ModelError> {
        let s = self
            .state_id(src)
            .ok_or_else(|| ModelError::UnknownState(src.to_string()))?;
        let d = self
            .state_id(dst)
            .ok_or_else(|| ModelError::UnknownState(dst.to_string()))?;
        let ev = self.alphabet.lookup(e)?;
        self.add_transition(s, ev, d)
    }

    pub fn build(self) -> Result<Automaton, ModelError> {
        let initial = self
            .initial
            .ok_or_else(|| ModelError::MissingInitial(self.name.clone()))?;
        let mut delta = vec![vec![None; self.alphabet.len()]; self.states.len()];
        for (s, e, d) in self.trans {
            match delta[s][e] {
                Some(old) if old != d => {
                    return Err(ModelError::Nondeterministic {
                        state: self.states[s].clone(),
                        event: self.alphabet.name(e).to_string(),
                    })
                }
                _ => delta[s][e] = Some(d),
            }
        }
        Ok(Automaton {
            name: self.name,
            alphabet: self.alphabet,
            states: self.states,
            state_index: self.state_index,
            delta,
            initial,
        })
    }
}

/// Subset-construction observer with the plant-state cell of each state.
#[derive(Clone, Debug)]
pub struct Observer {
    pub automaton: Automaton,
    pub cells: Vec<StateSet>,
}

/// Accessible synchronous product with the component pair of each state.
#[derive(Clone, Debug)]
pub struct Product {
    pub automaton: Automaton,
    pub pairs: Vec<(StateId, StateId)>,
}

impl Automaton {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.delta.iter().flatten().filter(|d| d.is_some()).count()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn state_name(&self, x: StateId) -> &str {
        &self.states[x]
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_index.get(name).copied()
    }

    pub fn lookup_state(&self, name: &str) -> Result<StateId, ModelError> {
        self.state_id(name)
            .ok_or_else(|| ModelError::UnknownState(name.to_string()))
    }

    pub fn state_set(&self, names: &[&str]) -> Result<StateSet, ModelError> {
        names.iter().map(|n| self.lookup_state(n)).collect()
    }

    /// `{x,y}` with member names sorted lexicographically.
    pub fn format_state_set(&self, s: &StateSet) -> String {
        let mut names: Vec<&str> = s.iter().map(|x| self.state_name(x)).collect();
        names.sort_unstable();
        format!("{{{}}}", names.join(","))
    }

    pub fn delta(&self, x: StateId, e: EventId) -> Option<StateId> {
        self.delta[x][e]
    }

    pub fn step(&self, x: StateId, s: &[EventId]) -> Option<StateId> {
        s.iter().try_fold(x, |x, e| self.delta(x, *e))
    }

    /// Every transition, sorted by (source, event).
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, EventId, StateId)> + '_ {
        self.delta.iter().enumerate().flat_map(|(x, row)| {
            row.iter()
                .enumerate()
                .filter_map(move |(e, d)| d.map(|d| (x, e, d)))
        })
    }

    pub fn enabled(&self, x: StateId) -> EventSet {
        EventSet::from_ids(
            self.alphabet.len(),
            self.delta[x]
                .iter()
                .enumerate()
                .filter(|(_, d)| d.is_some())
                .map(|(e, _)| e),
        )
    }

    /// Γ(S) without bounds checks.
    pub fn gamma(&self, s: &StateSet) -> EventSet {
        let mut out = EventSet::empty(self.alphabet.len());
        for x in s.iter() {
            for (e, d) in self.delta[x].iter().enumerate() {
                if d.is_some() {
                    out.insert(e);
                }
            }
        }
        out
    }

    /// Γ(S), the events active at some state of `s`.
    pub fn active_events(&self, s: &StateSet) -> Result<EventSet, ModelError> {
        if let Some(x) = s.iter().find(|x| *x >= self.num_states()) {
            return Err(ModelError::UnknownState(x.to_string()));
        }
        Ok(self.gamma(s))
    }

    /// UR_γ(S): closure of `s` under unobservable events of `gamma`.
    pub fn unobservable_reach(&self, s: &StateSet, gamma: &EventSet) -> StateSet {
        let allowed = gamma.intersection(&self.alphabet.unobservable());
        let mut seen = vec![false; self.num_states()];
        let mut stack: Vec<StateId> = s.iter().collect();
        for x in s.iter() {
            seen[x] = true;
        }
        while let Some(x) = stack.pop() {
            for e in allowed.iter() {
                if let Some(y) = self.delta[x][e] {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        (0..self.num_states()).filter(|x| seen[*x]).collect()
    }

    /// NX_e(S): the `e`-successors of `s`.
    pub fn next_states(&self, s: &StateSet, e: EventId) -> StateSet {
        s.iter().filter_map(|x| self.delta[x][e]).collect()
    }

    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(x) = queue.pop_front() {
            for y in self.delta[x].iter().flatten() {
                if !seen[*y] {
                    seen[*y] = true;
                    queue.push_back(*y);
                }
            }
        }
        seen
    }

    /// Observer over Σ_o. The alphabet is kept whole so event ids agree
    /// with the source; only observable events carry transitions.
    pub fn observer(&self) -> Observer {
        let all = self.alphabet.all();
        let obs = self.alphabet.observable();
        let start = self.unobservable_reach(&StateSet::singleton(self.initial), &all);
        let mut cells = vec![start.clone()];
        let mut index: HashMap<StateSet, StateId> = HashMap::from([(start, 0)]);
        let mut trans = Vec::new();
        let mut i = 0;
        while i < cells.len() {
            for e in obs.iter() {
                let next = self.next_states(&cells[i], e);
                if next.is_empty() {
                    continue;
                }
                let cell = self.unobservable_reach(&next, &all);
                let j = *index.entry(cell.clone()).or_insert_with(|| {
                    cells.push(cell);
                    cells.len() - 1
                });
                trans.push((i, e, j));
            }
            i += 1;
        }
        let mut b = AutomatonBuilder::with_alphabet(&format!("obs({})", self.name), self.alphabet.clone());
        for (k, c) in cells.iter().enumerate() {
            let mut names: Vec<&str> = c.iter().map(|x| self.state_name(x)).collect();
            names.sort_unstable();
            b.add_state(&names.join("+"), k == 0)
                .or_else(|_| b.add_state(&format!("{}~{k}", names.join("+")), k == 0))
                .expect("observer cells are distinct");
        }
        for (s, e, d) in trans {
            b.add_transition(s, e, d).expect("valid ids");
        }
        Observer {
            automaton: b.build().expect("observer is deterministic"),
            cells,
        }
    }

    /// Accessible part of the synchronous product. Shared events must carry
    /// identical attributes.
    pub fn parallel(&self, other: &Automaton) -> Result<Product, ModelError> {
        let mut alphabet = self.alphabet.clone();
        let mut left = (0..self.alphabet.len()).map(Some).collect::<Vec<_>>();
        let mut right = vec![None; self.alphabet.len()];
        for (j, d) in other.alphabet.decls().iter().enumerate() {
            match alphabet.id(&d.name) {
                Some(i) => {
                    if alphabet.get(i) != d {
                        return Err(ModelError::AttributeMismatch(d.name.clone()));
                    }
                    right[i] = Some(j);
                }
                None => {
                    alphabet.push(d.clone())?;
                    left.push(None);
                    right.push(Some(j));
                }
            }
        }
        let start = (self.initial, other.initial);
        let mut pairs = vec![start];
        let mut index = HashMap::from([(start, 0usize)]);
        let mut trans = Vec::new();
        let mut i = 0;
        while i < pairs.len() {
            let (x, y) = pairs[i];
            for e in 0..alphabet.len() {
                let nx = match left[e] {
                    Some(a) => self.delta[x][a],
                    None => Some(x),
                };
                let ny = match right[e] {
                    Some(b) => other.delta[y][b],
                    None => Some(y),
                };
                if let (Some(nx), Some(ny)) = (nx, ny) {
                    let j = *index.entry((nx, ny)).or_insert_with(|| {
                        pairs.push((nx, ny));
                        pairs.len() - 1
                    });
                    trans.push((i, e, j));
                }
            }
            i += 1;
        }
        let mut b = AutomatonBuilder::with_alphabet(&format!("{}||{}", self.name, other.name), alphabet);
        for (k, (x, y)) in pairs.iter().enumerate() {
            b.add_state(&format!("{}|{}", self.states[*x], other.states[*y]), k == 0)
                .or_else(|_| b.add_state(&format!("{}|{}~{}", self.states[*x], other.states[*y], k), k == 0))?;
        }
        for (s, e, d) in trans {
            b.add_transition(s, e, d)?;
        }
        Ok(Product {
            automaton: b.build()?,
            pairs,
        })
    }

    /// Accessible part, with the old id of every kept state.
    pub fn trim_accessible(&self) -> (Automaton, Vec<StateId>) {
        let seen = self.reachable();
        let kept: Vec<StateId> = (0..self.num_states()).filter(|x| seen[*x]).collect();
        let mut new_id = vec![None; self.num_states()];
        for (i, x) in kept.iter().enumerate() {
            new_id[*x] = Some(i);
        }
        let mut b = AutomatonBuilder::with_alphabet(&self.name, self.alphabet.clone());
        for x in &kept {
            b.add_state(&self.states[*x], *x == self.initial)
                .expect("names are unique");
        }
        for (s, e, d) in self.transitions() {
            if let (Some(s), Some(d)) = (new_id[s], new_id[d]) {
                b.add_transition(s, e, d).expect("valid ids");
            }
        }
        (b.build().expect("initial is kept"), kept)
    }

    /// The same automaton with events renumbered to follow `target`.
    /// Both alphabets must declare the same events with the same attributes.
    pub fn reorder_alphabet(&self, target: &Alphabet) -> Result<Automaton, ModelError> {
        if target.len() != self.alphabet.len() {
            return Err(ModelError::AlphabetMismatch(format!(
                "`{}` declares {} events, expected {}",
                self.name,
                self.alphabet.len(),
                target.len()
            )));
        }
        let mut map = vec![0; self.alphabet.len()];
        for (i, d) in self.alphabet.decls().iter().enumerate() {
            let j = target.id(&d.name).ok_or_else(|| {
                ModelError::AlphabetMismatch(format!("event `{}` is not shared", d.name))
            })?;
            if target.get(j) != d {
                return Err(ModelError::AttributeMismatch(d.name.clone()));
            }
            map[i] = j;
        }
        let mut delta = vec![vec![None; target.len()]; self.num_states()];
        for (s, e, d) in self.transitions() {
            delta[s][map[e]] = Some(d);
        }
        Ok(Automaton {
            name: self.name.clone(),
            alphabet: target.clone(),
            states: self.states.clone(),
            state_index: self.state_index.clone(),
            delta,
            initial: self.initial,
        })
    }

    /// All generated strings of length at most `horizon`.
    pub fn language(&self, horizon: usize) -> BTreeSet<Vec<EventId>> {
        let mut out = BTreeSet::new();
        let mut frontier = vec![(Vec::new(), self.initial)];
        out.insert(Vec::new());
        for _ in 0..horizon {
            let mut next = Vec::new();
            for (s, x) in &frontier {
                for (e, d) in self.delta[*x].iter().enumerate() {
                    if let Some(d) = d {
                        let mut t = s.clone();
                        t.push(e);
                        out.insert(t.clone());
                        next.push((t, *d));
                    }
                }
            }
            frontier = next;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Automaton {
        let mut b = AutomatonBuilder::new("g");
        b.add_event(EventDecl::new("a", true, false)).unwrap();
        b.add_event(EventDecl::new("u", false, true)).unwrap();
        b.add_event(EventDecl::new("b", true, true)).unwrap();
        for (i, n) in ["0", "1", "2", "3"].iter().enumerate() {
            b.add_state(n, i == 0).unwrap();
        }
        b.add_transition_by_name("0", "u", "1").unwrap();
        b.add_transition_by_name("0", "a", "2").unwrap();
        b.add_transition_by_name("1", "b", "3").unwrap();
        b.add_transition_by_name("2", "b", "3").unwrap();
        b.build().unwrap()
    }

    #[test]
    fn active_and_reach() {
        let g = small();
        let s = g.state_set(&["0"]).unwrap();
        assert_eq!(g.alphabet().format_set(&g.active_events(&s).unwrap()), "{a,u}");
        let all = g.alphabet().all();
        assert_eq!(g.format_state_set(&g.unobservable_reach(&s, &all)), "{0,1}");
        let none = EventSet::empty(3);
        assert_eq!(g.unobservable_reach(&s, &none), s);
        let b = g.alphabet().id("b").unwrap();
        let s01 = g.state_set(&["0", "1"]).unwrap();
        assert_eq!(g.format_state_set(&g.next_states(&s01, b)), "{3}");
        assert!(g.active_events(&StateSet::singleton(9)).is_err());
    }

    #[test]
    fn nondeterminism_rejected() {
        let mut b = AutomatonBuilder::new("n");
        b.add_event(EventDecl::new("a", true, true)).unwrap();
        b.add_state("0", true).unwrap();
        b.add_state("1", false).unwrap();
        b.add_transition_by_name("0", "a", "0").unwrap();
        b.add_transition_by_name("0", "a", "1").unwrap();
        assert!(matches!(b.build(), Err(ModelError::Nondeterministic { .. })));
    }

    #[test]
    fn observer_cells() {
        let g = small();
        let o = g.observer();
        let a = g.alphabet().id("a").unwrap();
        let b = g.alphabet().id("b").unwrap();
        assert_eq!(o.cells[0], g.state_set(&["0", "1"]).unwrap());
        let after_b = o.automaton.delta(0, b).unwrap();
        assert_eq!(o.cells[after_b], g.state_set(&["3"]).unwrap());
        let after_a = o.automaton.delta(0, a).unwrap();
        assert_eq!(o.cells[after_a], g.state_set(&["2"]).unwrap());
        assert_eq!(o.automaton.num_states(), 3);
    }

    #[test]
    fn parallel_synchronises_shared_events() {
        let g = small();
        let mut b = AutomatonBuilder::new("r");
        b.add_event(EventDecl::new("a", true, false)).unwrap();
        b.add_event(EventDecl::new("c", true, true)).unwrap();
        b.add_state("p", true).unwrap();
        b.add_state("q", false).unwrap();
        b.add_transition_by_name("p", "c", "q").unwrap();
        let r = b.build().unwrap();
        let p = g.parallel(&r).unwrap();
        // `a` is blocked by r, `u`, `b` are private to g, `c` private to r.
        assert!(p.automaton.alphabet().id("c").is_some());
        assert_eq!(p.pairs.len(), 6);
        assert!(p.pairs.iter().all(|(x, _)| *x != 2));
    }

    #[test]
    fn parallel_rejects_attribute_mismatch() {
        let g = small();
        let mut b = AutomatonBuilder::new("r");
        b.add_event(EventDecl::new("a", false, false)).unwrap();
        b.add_state("p", true).unwrap();
        let r = b.build().unwrap();
        assert!(matches!(g.parallel(&r), Err(ModelError::AttributeMismatch(_))));
    }

    #[test]
    fn trim_drops_unreachable() {
        let mut b = AutomatonBuilder::new("t");
        b.add_event(EventDecl::new("a", true, true)).unwrap();
        b.add_state("0", true).unwrap();
        b.add_state("1", false).unwrap();
        b.add_state("2", false).unwrap();
        b.add_transition_by_name("0", "a", "1").unwrap();
        b.add_transition_by_name("2", "a", "0").unwrap();
        let (t, kept) = b.build().unwrap().trim_accessible();
        assert_eq!(kept, vec![0, 1]);
        assert_eq!(t.num_transitions(), 1);
    }
}
