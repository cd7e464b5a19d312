//! Exhaustive enumeration of small attack tables.
//!
//! Tables are grown lazily: the explorer runs on a partial table and stops
//! at the first undecided group (an observation `o` and event `e`); every
//! history in F(o) then gets a reaction set or "undefined", with at least
//! one history defined so the table stays admissible.

use idasynth_core::{EditSym, EventId, IdaContext};
use thiserror::Error;

use crate::closed_loop::{Explorer, Report};
use crate::policy::TableAttacker;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnumClass {
    /// Prefix-closed reaction sets.
    Interruptible,
    /// Singleton reaction sets.
    Deterministic,
}

#[derive(Clone, Copy, Debug)]
pub struct EnumBounds {
    pub reaction_len: usize,
    pub horizon: usize,
    /// Drop partial tables that are already detected or inadmissible.
    pub prune_failing: bool,
    /// Cap on explorer runs (partial and complete tables).
    pub max_steps: usize,
}

impl Default for EnumBounds {
    fn default() -> Self {
        EnumBounds {
            reaction_len: 2,
            horizon: 4,
            prune_failing: true,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("instance too large for enumeration: {0}")]
    TooLarge(String),
    #[error("enumeration budget of {0} steps exhausted")]
    Budget(usize),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumStats {
    pub tables: usize,
    pub steps: usize,
}

fn insertion_words(ins: &[EditSym], max: usize) -> Vec<Vec<EditSym>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..max {
        let mut next = Vec::new();
        for w in &layer {
            for s in ins {
                let mut v: Vec<EditSym> = w.clone();
                v.push(*s);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Reaction sets allowed for one key. `e = None` is the initial key.
pub fn reaction_options(
    ctx: &IdaContext,
    class: EnumClass,
    reaction_len: usize,
    e: Option<EventId>,
) -> Result<Vec<Vec<Vec<EditSym>>>, EnumError> {
    let ins: Vec<EditSym> = ctx.ea.compromised().iter().map(EditSym::Insert).collect();
    let words: Vec<Vec<EditSym>> = match e {
        None => insertion_words(&ins, reaction_len),
        Some(e) => {
            let mut heads = vec![EditSym::Genuine(e)];
            if ctx.ea.is_compromised(e) {
                heads.push(EditSym::Delete(e));
            }
            let tails = insertion_words(&ins, reaction_len.saturating_sub(1));
            heads
                .iter()
                .flat_map(|h| tails.iter().map(move |t| [vec![*h], t.clone()].concat()))
                .collect()
        }
    };
    if class == EnumClass::Deterministic {
        return Ok(words.into_iter().map(|w| vec![w]).collect());
    }
    if words.len() > 12 {
        return Err(EnumError::TooLarge(format!("{} candidate reactions per key", words.len())));
    }
    let mut out = Vec::new();
    for mask in 1u32..(1 << words.len()) {
        let set: Vec<Vec<EditSym>> = (0..words.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| words[i].clone())
            .collect();
        let closed = set.iter().all(|w| {
            let min = if e.is_none() { 0 } else { 1 };
            w.len() <= min || set.contains(&w[..w.len() - 1].to_vec())
        });
        let has_eps = e.is_some() || set.iter().any(|w| w.is_empty());
        if closed && has_eps {
            out.push(set);
        }
    }
    Ok(out)
}

struct Enum<'a, F: FnMut(&TableAttacker, &Report)> {
    ctx: IdaContext<'a>,
    class: EnumClass,
    bounds: EnumBounds,
    visit: F,
    stats: EnumStats,
}

impl<'a, F: FnMut(&TableAttacker, &Report)> Enum<'a, F> {
    fn rec(&mut self, table: TableAttacker) -> Result<(), EnumError> {
        self.stats.steps += 1;
        if self.stats.steps > self.bounds.max_steps {
            return Err(EnumError::Budget(self.bounds.max_steps));
        }
        let (report, missing) = Explorer::new(self.ctx, &table).check(self.bounds.horizon);
        if self.bounds.prune_failing && !(report.stealthy && report.admissible) {
            return Ok(());
        }
        let Some(m) = missing else {
            let mut done = table;
            done.complete = true;
            self.stats.tables += 1;
            (self.visit)(&done, &report);
            return Ok(());
        };
        let opts = reaction_options(&self.ctx, self.class, self.bounds.reaction_len, m.event)?;
        let Some(e) = m.event else {
            for o in opts {
                let mut t = table.clone();
                t.initial = Some(o);
                self.rec(t)?;
            }
            return Ok(());
        };
        // Odometer over (undefined | option) per history, skipping all-undefined.
        let k = m.hists.len();
        let base = opts.len() + 1;
        let mut digits = vec![0usize; k];
        loop {
            let mut i = 0;
            while i < k && digits[i] + 1 == base {
                digits[i] = 0;
                i += 1;
            }
            if i == k {
                break;
            }
            digits[i] += 1;
            let mut t = table.clone();
            for (h, d) in m.hists.iter().zip(&digits) {
                let v = (*d > 0).then(|| opts[*d - 1].clone());
                t.entries.insert((h.clone(), e), v);
            }
            self.rec(t)?;
        }
        Ok(())
    }
}

/// Calls `visit` on every complete table of the class (only admissible,
/// stealthy ones when pruning) with its exploration report.
pub fn enumerate_attackers<F: FnMut(&TableAttacker, &Report)>(
    ctx: IdaContext,
    class: EnumClass,
    bounds: EnumBounds,
    visit: F,
) -> Result<EnumStats, EnumError> {
    let n_obs = ctx.g.alphabet().observable().len();
    if ctx.g.num_states() > 3 || n_obs > 2 || bounds.reaction_len > 2 || bounds.horizon > 4 {
        return Err(EnumError::TooLarge(format!(
            "|X|={}, |Σ_o|={n_obs}, reaction length {}, horizon {} (limits 3, 2, 2, 4)",
            ctx.g.num_states(),
            bounds.reaction_len,
            bounds.horizon
        )));
    }
    let mut en = Enum {
        ctx,
        class,
        bounds,
        visit,
        stats: EnumStats::default(),
    };
    en.rec(TableAttacker::default())?;
    Ok(en.stats)
}
