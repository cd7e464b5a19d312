//! Feasibility, shortest attack paths and extraction of attack functions
//! from a pruned structure.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write;

use crate::alphabet::{EditAlphabet, EditSym};
use crate::automaton::{Automaton, AutomatonBuilder, EventDecl};
use crate::error::{ModelError, SynthesisError};
use crate::format::{content_lines, parse_automaton, write_automaton};
use crate::ida::{Counter, Ida, IdaContext, Label, NodeId};
use crate::pruning::Pruned;
use crate::sets::{EventId, StateId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AttackMode {
    Interruptible,
    Unbounded,
    Bounded(u32),
}

impl AttackMode {
    pub fn is_deterministic(self) -> bool {
        !matches!(self, AttackMode::Interruptible)
    }

    pub fn name(self) -> String {
        match self {
            AttackMode::Interruptible => "interruptible".into(),
            AttackMode::Unbounded => "unbounded".into(),
            AttackMode::Bounded(n) => format!("bounded {n}"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Strength {
    #[default]
    Strong,
    Weak,
}

/// Choice between letting an event through and deleting it when both are
/// available off the attack path.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Preference {
    #[default]
    LetThrough,
    Delete,
}

/// First E-node, in breadth-first order, whose plant estimate is inside
/// (strong) or meets (weak) the critical set.
pub fn feasibility(ctx: &IdaContext, pruned: &Ida, strength: Strength) -> Option<NodeId> {
    pruned.bfs_order().into_iter().find(|n| {
        let node = pruned.node(*n);
        node.is_e()
            && match strength {
                Strength::Strong => node.plant.is_subset(ctx.crit),
                Strength::Weak => node.plant.intersects(ctx.crit),
            }
    })
}

/// Breadth-first shortest path from the initial node. Ties go to the
/// earlier edge, i.e. alphabet order and genuine < deletion < insertion.
pub fn shortest_path(pruned: &Ida, target: NodeId) -> Option<Vec<(NodeId, Label, NodeId)>> {
    let init = pruned.initial()?;
    let mut parent: Vec<Option<(NodeId, Label)>> = vec![None; pruned.num_nodes()];
    let mut seen = vec![false; pruned.num_nodes()];
    seen[init] = true;
    let mut queue = VecDeque::from([init]);
    while let Some(n) = queue.pop_front() {
        if n == target {
            break;
        }
        for (l, d) in pruned.edges(n) {
            if !seen[*d] {
                seen[*d] = true;
                parent[*d] = Some((n, l.clone()));
                queue.push_back(*d);
            }
        }
    }
    if !seen[target] {
        return None;
    }
    let mut path = Vec::new();
    let mut cur = target;
    while let Some((p, l)) = parent[cur].clone() {
        path.push((p, l, cur));
        cur = p;
    }
    path.reverse();
    Some(path)
}

/// An attack function represented by a deterministic automaton F over the
/// edit symbols. Its states are E-nodes of the pruned structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AttackFunction {
    pub mode: AttackMode,
    pub automaton: Automaton,
    syms: Vec<EditSym>,
    index: HashMap<EditSym, EventId>,
}

impl AttackFunction {
    fn new(mode: AttackMode, automaton: Automaton, syms: Vec<EditSym>) -> Self {
        let index = syms.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        AttackFunction {
            mode,
            automaton,
            syms,
            index,
        }
    }

    pub fn initial(&self) -> StateId {
        self.automaton.initial()
    }

    pub fn delta(&self, q: StateId, s: EditSym) -> Option<StateId> {
        self.automaton.delta(q, *self.index.get(&s)?)
    }

    pub fn run(&self, w: &[EditSym]) -> Option<StateId> {
        w.iter().try_fold(self.initial(), |q, s| self.delta(q, *s))
    }

    fn insertion_edge(&self, q: StateId) -> Option<(EditSym, StateId)> {
        self.syms
            .iter()
            .filter(|s| s.is_insertion())
            .find_map(|s| self.delta(q, *s).map(|d| (*s, d)))
    }

    /// Insertion walks from `q`: every prefix of the insertion chain for
    /// the interruptible class, the maximal chain otherwise.
    pub fn insertion_walks(&self, q: StateId) -> Vec<Vec<EditSym>> {
        let mut chain = Vec::new();
        let mut cur = q;
        while let Some((s, d)) = self.insertion_edge(cur) {
            chain.push(s);
            cur = d;
            if chain.len() > self.automaton.num_states() {
                break;
            }
        }
        if self.mode.is_deterministic() {
            vec![chain]
        } else {
            (0..=chain.len()).map(|k| chain[..k].to_vec()).collect()
        }
    }

    /// f_A at F-state `q` for observed event `e`, or the initial reactions
    /// when `e` is `None`.
    pub fn reactions_at(&self, q: StateId, e: Option<EventId>) -> Option<Vec<Vec<EditSym>>> {
        let Some(e) = e else {
            return Some(self.insertion_walks(q));
        };
        let mut out = Vec::new();
        for s in [EditSym::Genuine(e), EditSym::Delete(e)] {
            if let Some(d) = self.delta(q, s) {
                for w in self.insertion_walks(d) {
                    let mut r = vec![s];
                    r.extend(w);
                    out.push(r);
                }
            }
        }
        (!out.is_empty()).then_some(out)
    }

    /// f_A(s, e). `e = None` asks for f_A(ε, ε).
    pub fn evaluate(&self, s: &[EditSym], e: Option<EventId>) -> Option<Vec<Vec<EditSym>>> {
        if e.is_none() && !s.is_empty() {
            return None;
        }
        self.reactions_at(self.run(s)?, e)
    }

    /// Structural checks for the attacker class.
    pub fn check_class(&self) -> Result<(), SynthesisError> {
        let n = self.automaton.num_states();
        let err = |m: String| Err(SynthesisError::ClassViolation(m));
        for q in 0..n {
            let mut cur = q;
            let mut len = 0usize;
            while let Some((_, d)) = self.insertion_edge(cur) {
                len += 1;
                cur = d;
                if len > n {
                    return err(format!("insertion cycle through {}", self.automaton.state_name(q)));
                }
            }
            let ins = self.syms.iter().filter(|s| s.is_insertion() && self.delta(q, **s).is_some()).count();
            if ins > 1 {
                return err(format!("two insertions at {}", self.automaton.state_name(q)));
            }
            if self.mode.is_deterministic() {
                let passes = self.syms.iter().filter(|s| !s.is_insertion() && self.delta(q, **s).is_some());
                let mut seen = Vec::new();
                for s in passes {
                    if ins > 0 {
                        return err(format!("{} both inserts and waits", self.automaton.state_name(q)));
                    }
                    if seen.contains(&s.event()) {
                        return err(format!("{} both passes and deletes", self.automaton.state_name(q)));
                    }
                    seen.push(s.event());
                }
            }
        }
        if let AttackMode::Bounded(n_a) = self.mode {
            let chain = |q: StateId| self.insertion_walks(q)[0].len();
            let mut longest = chain(self.initial());
            for (_, e, t) in self.automaton.transitions() {
                if !self.syms[e].is_insertion() {
                    longest = longest.max(1 + chain(t));
                }
            }
            if longest > n_a as usize {
                return err(format!("reaction of length {longest} exceeds {n_a}"));
            }
        }
        Ok(())
    }

    pub fn write(&self) -> String {
        format!("mode {}\n{}", self.mode.name(), write_automaton(&self.automaton))
    }

    pub fn read(ea: &EditAlphabet, text: &str) -> Result<AttackFunction, ModelError> {
        let (ln, toks) = content_lines(text).next().ok_or(ModelError::Parse {
            line: 1,
            msg: "empty attack file".into(),
        })?;
        let mode = match toks.as_slice() {
            ["mode", "interruptible"] => AttackMode::Interruptible,
            ["mode", "unbounded"] => AttackMode::Unbounded,
            ["mode", "bounded", n] => AttackMode::Bounded(n.parse().map_err(|_| ModelError::Parse {
                line: ln,
                msg: format!("bad bound `{n}`"),
            })?),
            _ => {
                return Err(ModelError::Parse {
                    line: ln,
                    msg: "expected `mode <interruptible|unbounded|bounded n>`".into(),
                })
            }
        };
        let rest: String = text
            .lines()
            .enumerate()
            .map(|(i, l)| if i + 1 == ln { "" } else { l })
            .collect::<Vec<_>>()
            .join("\n");
        let automaton = parse_automaton(&rest)?;
        let syms = automaton
            .alphabet()
            .decls()
            .iter()
            .map(|d| ea.parse_sym(&d.name))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(AttackFunction::new(mode, automaton, syms))
    }

    /// Human-readable decision table: reactions per F-state and observed event.
    pub fn decision_table(&self, ea: &EditAlphabet) -> String {
        let fmt_set = |rs: &[Vec<EditSym>]| {
            rs.iter()
                .map(|r| ea.format_word(r))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let mut out = String::new();
        writeln!(out, "# mode {}", self.mode.name()).unwrap();
        if let Some(rs) = self.reactions_at(self.initial(), None) {
            writeln!(out, "{} ε -> {{{}}}", self.automaton.state_name(self.initial()), fmt_set(&rs)).unwrap();
        }
        for q in 0..self.automaton.num_states() {
            for e in ea.base().observable().iter() {
                if let Some(rs) = self.reactions_at(q, Some(e)) {
                    writeln!(
                        out,
                        "{} {} -> {{{}}}",
                        self.automaton.state_name(q),
                        ea.base().name(e),
                        fmt_set(&rs)
                    )
                    .unwrap();
                }
            }
        }
        out
    }
}

fn state_name(ctx: &IdaContext, ida: &Ida, n: NodeId) -> String {
    let node = ida.node(n);
    let mut plant: Vec<&str> = node.plant.iter().map(|x| ctx.g.state_name(x)).collect();
    plant.sort_unstable();
    let mut s = format!("{}/{}", plant.join("+"), ctx.rt.state_name(node.sup));
    match node.counter {
        Some(Counter::Count(k)) => write!(s, "@{k}").unwrap(),
        Some(Counter::Warmup) => s.push_str("@w"),
        None => {}
    }
    s
}

/// For flagged nodes, the first insertion of a shortest insertion chain
/// leading to a node in `sinks`.
fn escape_moves(pruned: &Pruned, sinks: &[bool]) -> Vec<Option<(EditSym, NodeId)>> {
    let ida = &pruned.ida;
    let n = ida.num_nodes();
    let mut dist: Vec<Option<usize>> = (0..n).map(|q| sinks[q].then_some(0)).collect();
    let mut choice = vec![None; n];
    let mut changed = true;
    while changed {
        changed = false;
        for q in 0..n {
            if dist[q].is_some() || !ida.node(q).is_e() {
                continue;
            }
            let mut best: Option<(usize, EditSym, NodeId)> = None;
            for (l, y) in ida.edges(q) {
                if let Label::Sym(s @ EditSym::Insert(_)) = l {
                    if let Some(t) = ida.decision_succ(*y) {
                        if let Some(d) = dist[t] {
                            if best.is_none_or(|(b, _, _)| d + 1 < b) {
                                best = Some((d + 1, *s, t));
                            }
                        }
                    }
                }
            }
            if let Some((d, s, t)) = best {
                dist[q] = Some(d);
                choice[q] = Some((s, t));
                changed = true;
            }
        }
    }
    choice
}

/// Expands a shortest path into a total attack function.
pub fn expand_path(
    ctx: &IdaContext,
    pruned: &Pruned,
    path: &[(NodeId, Label, NodeId)],
    mode: AttackMode,
    pref: Preference,
) -> Result<AttackFunction, SynthesisError> {
    let ida = &pruned.ida;
    let init = ida.initial().ok_or(SynthesisError::Infeasible)?;
    let contract = |y: NodeId| ida.decision_succ(y).ok_or(SynthesisError::MissingDecision(y));
    let z0 = contract(init)?;

    let mut edges: Vec<Vec<(EditSym, NodeId)>> = vec![Vec::new(); ida.num_nodes()];
    let mut order = vec![z0];
    let mut visited = vec![false; ida.num_nodes()];
    visited[z0] = true;
    let mut path_insert = vec![false; ida.num_nodes()];
    for (a, l, b) in path {
        if let Label::Sym(s) = l {
            let t = contract(*b)?;
            edges[*a].push((*s, t));
            path_insert[*a] |= s.is_insertion();
            if !visited[t] {
                visited[t] = true;
                order.push(t);
            }
        }
    }
    let escape = if mode.is_deterministic() {
        let sinks: Vec<bool> = (0..ida.num_nodes())
            .map(|q| ida.node(q).is_e() && (!pruned.is_flagged(q) || path_insert[q]))
            .collect();
        escape_moves(pruned, &sinks)
    } else {
        Vec::new()
    };

    let mut i = 0;
    while i < order.len() {
        let q = order[i];
        i += 1;
        let mut add = Vec::new();
        let has = |edges: &Vec<Vec<(EditSym, NodeId)>>, s: EditSym| edges[q].iter().any(|(t, _)| *t == s);
        if mode.is_deterministic() && path_insert[q] {
            // committed to the path insertion
        } else if mode.is_deterministic() && pruned.is_flagged(q) {
            let (s, t) = escape[q].ok_or(SynthesisError::NoEscape(q))?;
            add.push((s, t));
        } else {
            for (l, y) in ida.edges(q) {
                let Label::Sym(s) = l else { continue };
                let e = s.event();
                let take = match s {
                    EditSym::Genuine(_) => {
                        !has(&edges, EditSym::Delete(e))
                            && !(pref == Preference::Delete
                                && ida.has_sym(q, EditSym::Delete(e))
                                && !has(&edges, *s))
                    }
                    EditSym::Delete(_) => {
                        !has(&edges, EditSym::Genuine(e))
                            && (pref == Preference::Delete || !ida.has_sym(q, EditSym::Genuine(e)))
                    }
                    EditSym::Insert(_) => false,
                };
                if take && !has(&edges, *s) {
                    add.push((*s, contract(*y)?));
                }
            }
        }
        for (s, t) in add {
            edges[q].push((s, t));
            if !visited[t] {
                visited[t] = true;
                order.push(t);
            }
        }
    }

    let syms = ctx.ea.symbols();
    let mut b = AutomatonBuilder::new("attack");
    for s in &syms {
        b.add_event(EventDecl::new(&ctx.ea.sym_name(*s), true, true))
            .expect("symbol names are distinct");
    }
    let mut fid = vec![None; ida.num_nodes()];
    for (k, q) in order.iter().enumerate() {
        fid[*q] = Some(b.add_state(&state_name(ctx, ida, *q), k == 0).expect("distinct nodes"));
    }
    let sym_idx: HashMap<EditSym, EventId> = syms.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    for q in &order {
        let mut out = edges[*q].clone();
        out.sort_by(|a, b| crate::alphabet::sym_order(&a.0, &b.0));
        for (s, t) in out {
            b.add_transition(fid[*q].unwrap(), sym_idx[&s], fid[t].unwrap())
                .expect("valid ids");
        }
    }
    let f = AttackFunction::new(mode, b.build().expect("deterministic by construction"), syms);
    f.check_class()?;
    Ok(f)
}

/// Result of the full extraction pipeline.
#[derive(Clone, Debug)]
pub struct Synthesis {
    pub target: NodeId,
    pub path: Vec<(NodeId, Label, NodeId)>,
    pub function: AttackFunction,
}

pub fn synthesize(
    ctx: &IdaContext,
    pruned: &Pruned,
    mode: AttackMode,
    strength: Strength,
    pref: Preference,
) -> Result<Synthesis, SynthesisError> {
    let target = feasibility(ctx, &pruned.ida, strength).ok_or(SynthesisError::Infeasible)?;
    let path = shortest_path(&pruned.ida, target).ok_or(SynthesisError::Unreachable(target))?;
    let function = expand_path(ctx, pruned, &path, mode, pref)?;
    Ok(Synthesis {
        target,
        path,
        function,
    })
}
