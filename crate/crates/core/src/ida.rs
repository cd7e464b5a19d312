//! Insertion-deletion attack structures: bipartite graphs of S-states
//! (supervisor about to issue a decision) and E-states (attacker about to
//! edit an event).

use std::collections::{HashMap, VecDeque};
use std::fmt::Write;

use crate::alphabet::{EditAlphabet, EditSym};
use crate::automaton::Automaton;
use crate::error::ModelError;
use crate::format::content_lines;
use crate::sets::{EventSet, StateId, StateSet};
use crate::supervisor::RTilde;

pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    S,
    E,
}

/// Insertion counter of bounded structures. `Warmup` only occurs when
/// insertions before the first genuine event are unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Counter {
    Warmup,
    Count(u32),
}

/// Node payload. The side is part of the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Node {
    pub side: Side,
    pub plant: StateSet,
    pub sup: StateId,
    pub counter: Option<Counter>,
}

impl Node {
    pub fn s(plant: StateSet, sup: StateId) -> Self {
        Node {
            side: Side::S,
            plant,
            sup,
            counter: None,
        }
    }

    pub fn e(plant: StateSet, sup: StateId) -> Self {
        Node {
            side: Side::E,
            plant,
            sup,
            counter: None,
        }
    }

    pub fn is_e(&self) -> bool {
        self.side == Side::E
    }

    /// The same node with the counter dropped.
    pub fn uncounted(&self) -> Node {
        Node {
            counter: None,
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Decision(EventSet),
    Sym(EditSym),
}

impl Label {
    pub fn sym(&self) -> Option<EditSym> {
        match self {
            Label::Sym(s) => Some(*s),
            Label::Decision(_) => None,
        }
    }
}

/// A deterministic bipartite transition structure. Node ids follow
/// insertion order; edges keep insertion order per node.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ida {
    nodes: Vec<Node>,
    index: HashMap<Node, NodeId>,
    out: Vec<Vec<(Label, NodeId)>>,
    initial: Option<NodeId>,
}

impl Ida {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id and whether the node is new.
    pub fn add_node(&mut self, n: Node) -> (NodeId, bool) {
        if let Some(id) = self.index.get(&n) {
            return (*id, false);
        }
        let id = self.nodes.len();
        self.index.insert(n.clone(), id);
        self.nodes.push(n);
        self.out.push(Vec::new());
        (id, true)
    }

    pub fn set_initial(&mut self, id: NodeId) {
        self.initial = Some(id);
    }

    pub fn add_edge(&mut self, src: NodeId, label: Label, dst: NodeId) -> Result<(), ModelError> {
        if let Some((_, d)) = self.out[src].iter().find(|(l, _)| *l == label) {
            if *d != dst {
                return Err(ModelError::Conflict {
                    node: src.to_string(),
                    label: format!("{label:?}"),
                });
            }
            return Ok(());
        }
        if let Label::Decision(_) = label {
            if self.out[src].iter().any(|(l, _)| matches!(l, Label::Decision(_))) {
                return Err(ModelError::Conflict {
                    node: src.to_string(),
                    label: "second decision".into(),
                });
            }
        }
        self.out[src].push((label, dst));
        Ok(())
    }

    pub fn initial(&self) -> Option<NodeId> {
        self.initial
    }

    pub fn is_empty(&self) -> bool {
        self.initial.is_none()
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_edges(&self) -> usize {
        self.out.iter().map(|o| o.len()).sum()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn id_of(&self, n: &Node) -> Option<NodeId> {
        self.index.get(n).copied()
    }

    pub fn edges(&self, id: NodeId) -> &[(Label, NodeId)] {
        &self.out[id]
    }

    pub fn succ(&self, id: NodeId, label: &Label) -> Option<NodeId> {
        self.out[id].iter().find(|(l, _)| l == label).map(|(_, d)| *d)
    }

    pub fn has_sym(&self, id: NodeId, s: EditSym) -> bool {
        self.succ(id, &Label::Sym(s)).is_some()
    }

    /// Target of the decision edge of an S-node.
    pub fn decision_succ(&self, id: NodeId) -> Option<NodeId> {
        self.out[id]
            .iter()
            .find(|(l, _)| matches!(l, Label::Decision(_)))
            .map(|(_, d)| *d)
    }

    /// z0, the E-node after the initial decision.
    pub fn z0(&self) -> Option<NodeId> {
        self.initial.and_then(|y| self.decision_succ(y))
    }

    /// One edit step between E-nodes, contracting the S-node in between.
    pub fn step_e(&self, z: NodeId, s: EditSym) -> Option<NodeId> {
        let y = self.succ(z, &Label::Sym(s))?;
        self.decision_succ(y)
    }

    /// IE(w): the E-node reached by traversing `w` from z0.
    pub fn induced_e_state(&self, w: &[EditSym]) -> Option<NodeId> {
        w.iter().try_fold(self.z0()?, |z, s| self.step_e(z, *s))
    }

    pub fn e_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(|i| self.nodes[*i].is_e())
    }

    /// Node ids in breadth-first order from the initial node.
    pub fn bfs_order(&self) -> Vec<NodeId> {
        let Some(init) = self.initial else {
            return Vec::new();
        };
        let mut seen = vec![false; self.nodes.len()];
        let mut order = vec![init];
        seen[init] = true;
        let mut i = 0;
        while i < order.len() {
            for (_, d) in &self.out[order[i]] {
                if !seen[*d] {
                    seen[*d] = true;
                    order.push(*d);
                }
            }
            i += 1;
        }
        order
    }

    pub fn all_reachable(&self) -> bool {
        self.bfs_order().len() == self.nodes.len()
    }

    /// Keeps the selected nodes and edges, then the accessible part.
    /// Node ids are renumbered preserving order.
    pub fn restrict(
        &self,
        keep_node: &[bool],
        keep_edge: impl Fn(NodeId, &Label, NodeId) -> bool,
    ) -> Ida {
        let mut alive = keep_node.to_vec();
        let Some(init) = self.initial.filter(|i| alive[*i]) else {
            return Ida::new();
        };
        let mut seen = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([init]);
        seen[init] = true;
        while let Some(n) = queue.pop_front() {
            for (l, d) in &self.out[n] {
                if alive[*d] && !seen[*d] && keep_edge(n, l, *d) {
                    seen[*d] = true;
                    queue.push_back(*d);
                }
            }
        }
        for (a, s) in alive.iter_mut().zip(&seen) {
            *a &= *s;
        }
        let mut map = vec![None; self.nodes.len()];
        let mut out = Ida::new();
        for n in 0..self.nodes.len() {
            if alive[n] {
                map[n] = Some(out.add_node(self.nodes[n].clone()).0);
            }
        }
        for n in 0..self.nodes.len() {
            if let Some(src) = map[n] {
                for (l, d) in &self.out[n] {
                    if let Some(dst) = map[*d] {
                        if keep_edge(n, l, *d) {
                            out.add_edge(src, l.clone(), dst).expect("subset of a deterministic structure");
                        }
                    }
                }
            }
        }
        out.initial = map[init];
        out
    }

    /// A1 ⊑ A2: same initial node, and nodes and edges of A1 occur in A2.
    pub fn is_subsystem(&self, other: &Ida) -> bool {
        let map_init = |a: &Ida| a.initial.map(|i| a.nodes[i].clone());
        if self.is_empty() {
            return true;
        }
        if map_init(self) != map_init(other) {
            return false;
        }
        (0..self.nodes.len()).all(|n| {
            let Some(m) = other.id_of(&self.nodes[n]) else {
                return false;
            };
            self.out[n].iter().all(|(l, d)| {
                other
                    .succ(m, l)
                    .is_some_and(|t| other.nodes[t] == self.nodes[*d])
            })
        })
    }

    /// Union of two structures with the same initial node.
    pub fn union(&self, other: &Ida) -> Result<Ida, ModelError> {
        if self.is_empty() {
            return Ok(other.clone());
        }
        if other.is_empty() {
            return Ok(self.clone());
        }
        if self.nodes[self.initial.unwrap()] != other.nodes[other.initial.unwrap()] {
            return Err(ModelError::Conflict {
                node: "initial".into(),
                label: "different initial nodes".into(),
            });
        }
        let mut u = self.clone();
        let map: Vec<NodeId> = other.nodes.iter().map(|n| u.add_node(n.clone()).0).collect();
        for n in 0..other.nodes.len() {
            for (l, d) in &other.out[n] {
                u.add_edge(map[n], l.clone(), map[*d])?;
            }
        }
        Ok(u)
    }

    /// Drops insertion counters, merging nodes that agree otherwise.
    pub fn forget_counters(&self) -> Ida {
        let mut out = Ida::new();
        let map: Vec<NodeId> = self
            .nodes
            .iter()
            .map(|n| out.add_node(n.uncounted()).0)
            .collect();
        for n in 0..self.nodes.len() {
            for (l, d) in &self.out[n] {
                let _ = out.add_edge(map[n], l.clone(), map[*d]);
            }
        }
        out.initial = self.initial.map(|i| map[i]);
        out
    }
}

/// The models an IDA is built over.
#[derive(Clone, Copy)]
pub struct IdaContext<'a> {
    pub g: &'a Automaton,
    pub rt: &'a RTilde,
    pub ea: &'a EditAlphabet,
    pub crit: &'a StateSet,
}

impl<'a> IdaContext<'a> {
    /// y0 = ({x0}, q0).
    pub fn initial_node(&self) -> Node {
        Node::s(StateSet::singleton(self.g.initial()), self.rt.initial())
    }

    /// h_SE: the supervisor issues γ = Γ_R̃(I_S); the plant estimate grows
    /// by unobservable events in γ.
    pub fn h_se(&self, y: &Node) -> (Label, Node) {
        let gamma = self.rt.decision(y.sup);
        let plant = self.g.unobservable_reach(&y.plant, &gamma);
        (
            Label::Decision(gamma),
            Node {
                side: Side::E,
                plant,
                sup: y.sup,
                counter: y.counter,
            },
        )
    }

    /// h_ES for a genuine, inserted or deleted event.
    pub fn h_es(&self, z: &Node, s: EditSym) -> Option<Node> {
        if !self.ea.is_symbol(s) {
            return None;
        }
        let e = s.event();
        if !self.rt.decision(z.sup).contains(e) {
            return None;
        }
        let (plant, sup) = match s {
            EditSym::Genuine(e) => (self.g.next_states(&z.plant, e), self.rt.delta(z.sup, e)?),
            EditSym::Insert(e) => (z.plant.clone(), self.rt.delta(z.sup, e)?),
            EditSym::Delete(e) => (self.g.next_states(&z.plant, e), z.sup),
        };
        if plant.is_empty() {
            return None;
        }
        Some(Node {
            side: Side::S,
            plant,
            sup,
            counter: z.counter,
        })
    }

    pub fn is_dead_s(&self, n: &Node) -> bool {
        n.side == Side::S && self.rt.is_dead(n.sup)
    }

    pub fn is_critical_e(&self, n: &Node) -> bool {
        n.is_e() && n.plant.is_subset(self.crit)
    }

    /// Observable events the plant can execute under the current decision.
    pub fn feasible_observable(&self, z: &Node) -> EventSet {
        self.rt
            .decision(z.sup)
            .intersection(&self.g.alphabet().observable())
            .intersection(&self.g.gamma(&z.plant))
    }

    /// (P1) at an E-node: each feasible observable event is either let
    /// through or deleted.
    pub fn is_race_free(&self, ida: &Ida, z: NodeId) -> bool {
        let n = ida.node(z);
        if !n.is_e() {
            return true;
        }
        self.feasible_observable(n).iter().all(|e| {
            ida.has_sym(z, EditSym::Genuine(e)) || ida.has_sym(z, EditSym::Delete(e))
        })
    }

    pub fn node_label(&self, n: &Node) -> String {
        let side = match n.side {
            Side::S => "S",
            Side::E => "E",
        };
        let counter = match n.counter {
            None => String::new(),
            Some(Counter::Warmup) => ",n=w".into(),
            Some(Counter::Count(k)) => format!(",n={k}"),
        };
        format!(
            "{side}({},{}{counter})",
            self.g.format_state_set(&n.plant),
            self.rt.state_name(n.sup)
        )
    }

    pub fn label_name(&self, l: &Label) -> String {
        match l {
            Label::Decision(g) => format!("gamma:{}", self.g.alphabet().format_set(g)),
            Label::Sym(s) => self.ea.sym_name(*s),
        }
    }

    pub fn parse_label(&self, t: &str) -> Result<Label, ModelError> {
        if let Some(set) = t.strip_prefix("gamma:") {
            let inner = set
                .strip_prefix('{')
                .and_then(|s| s.strip_suffix('}'))
                .ok_or_else(|| ModelError::UnknownEvent(t.to_string()))?;
            let names: Vec<&str> = inner.split(',').filter(|s| !s.is_empty()).collect();
            Ok(Label::Decision(self.g.alphabet().event_set(&names)?))
        } else {
            Ok(Label::Sym(self.ea.parse_sym(t)?))
        }
    }

    /// Finds a node by side, plant state names and supervisor state name.
    pub fn find(&self, ida: &Ida, side: Side, plant: &[&str], sup: &str) -> Option<NodeId> {
        let plant = self.g.state_set(plant).ok()?;
        let sup = self.rt.automaton.state_id(sup)?;
        ida.id_of(&Node {
            side,
            plant,
            sup,
            counter: None,
        })
    }

    pub fn write(&self, ida: &Ida) -> String {
        let mut out = String::from("ida\n");
        match ida.initial() {
            Some(i) => writeln!(out, "initial {i}").unwrap(),
            None => writeln!(out, "initial none").unwrap(),
        }
        for (i, n) in ida.nodes().iter().enumerate() {
            let side = if n.is_e() { "E" } else { "S" };
            write!(
                out,
                "node {i} {side} {} {}",
                self.g.format_state_set(&n.plant),
                self.rt.state_name(n.sup)
            )
            .unwrap();
            match n.counter {
                None => {}
                Some(Counter::Warmup) => write!(out, " n=w").unwrap(),
                Some(Counter::Count(k)) => write!(out, " n={k}").unwrap(),
            }
            out.push('\n');
        }
        for i in 0..ida.num_nodes() {
            for (l, d) in ida.edges(i) {
                writeln!(out, "edge {i} {} {d}", self.label_name(l)).unwrap();
            }
        }
        out
    }

    pub fn read(&self, text: &str) -> Result<Ida, ModelError> {
        let perr = |line, msg: String| ModelError::Parse { line, msg };
        let mut ida = Ida::new();
        let mut initial = None;
        let mut edges = Vec::new();
        for (ln, t) in content_lines(text) {
            match t[0] {
                "ida" => {}
                "initial" if t.len() == 2 => {
                    initial = match t[1] {
                        "none" => None,
                        s => Some(s.parse::<NodeId>().map_err(|e| perr(ln, e.to_string()))?),
                    }
                }
                "node" if t.len() == 5 || t.len() == 6 => {
                    let id: NodeId = t[1].parse().map_err(|_| perr(ln, "bad node id".into()))?;
                    let side = match t[2] {
                        "S" => Side::S,
                        "E" => Side::E,
                        s => return Err(perr(ln, format!("bad side `{s}`"))),
                    };
                    let inner = t[3]
                        .strip_prefix('{')
                        .and_then(|s| s.strip_suffix('}'))
                        .ok_or_else(|| perr(ln, "bad state set".into()))?;
                    let names: Vec<&str> = inner.split(',').filter(|s| !s.is_empty()).collect();
                    let plant = self.g.state_set(&names).map_err(|e| perr(ln, e.to_string()))?;
                    let sup = self
                        .rt
                        .automaton
                        .lookup_state(t[4])
                        .map_err(|e| perr(ln, e.to_string()))?;
                    let counter = match t.get(5) {
                        None => None,
                        Some(&"n=w") => Some(Counter::Warmup),
                        Some(c) => Some(Counter::Count(
                            c.strip_prefix("n=")
                                .and_then(|k| k.parse().ok())
                                .ok_or_else(|| perr(ln, format!("bad counter `{c}`")))?,
                        )),
                    };
                    let (got, fresh) = ida.add_node(Node {
                        side,
                        plant,
                        sup,
                        counter,
                    });
                    if got != id || !fresh {
                        return Err(perr(ln, "node ids must be consecutive and distinct".into()));
                    }
                }
                "edge" if t.len() == 4 => {
                    let s: NodeId = t[1].parse().map_err(|_| perr(ln, "bad edge source".into()))?;
                    let d: NodeId = t[3].parse().map_err(|_| perr(ln, "bad edge target".into()))?;
                    let l = self.parse_label(t[2]).map_err(|e| perr(ln, e.to_string()))?;
                    edges.push((ln, s, l, d));
                }
                k => return Err(perr(ln, format!("unexpected `{k}`"))),
            }
        }
        for (ln, s, l, d) in edges {
            if s >= ida.num_nodes() || d >= ida.num_nodes() {
                return Err(perr(ln, "edge refers to unknown node".into()));
            }
            ida.add_edge(s, l, d).map_err(|e| perr(ln, e.to_string()))?;
        }
        if let Some(i) = initial {
            if i >= ida.num_nodes() {
                return Err(perr(1, "unknown initial node".into()));
            }
            ida.set_initial(i);
        }
        Ok(ida)
    }
}

/// Sidecar listing flagged node ids.
pub fn write_flags(flags: &[bool]) -> String {
    let mut out = String::new();
    for (i, f) in flags.iter().enumerate() {
        if *f {
            writeln!(out, "flag {i}").unwrap();
        }
    }
    out
}

pub fn read_flags(text: &str, n: usize) -> Result<Vec<bool>, ModelError> {
    let mut flags = vec![false; n];
    for (ln, t) in content_lines(text) {
        let id = match t.as_slice() {
            ["flag", id] => id.parse::<usize>().ok().filter(|i| *i < n),
            _ => None,
        };
        let id = id.ok_or_else(|| ModelError::Parse {
            line: ln,
            msg: "expected `flag <node id>`".into(),
        })?;
        flags[id] = true;
    }
    Ok(flags)
}
