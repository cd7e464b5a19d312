//! Attack scenarios: plant, supervisor realization, compromised events,
//! critical states, attacker class and knobs.
//!
//! Scenario files hold `key=value` lines; model paths are relative to the
//! scenario file.

use std::fmt::Write;
use std::path::Path;

use crate::alphabet::EditAlphabet;
use crate::automaton::Automaton;
use crate::builders::{construct_aida, construct_baida};
use crate::error::ModelError;
use crate::format::parse_automaton;
use crate::ida::{Ida, IdaContext};
use crate::pruning::{prune_bsda, prune_isda, prune_usda, BoundedRace, PruneOptions, Pruned, TrimMode};
use crate::sets::StateSet;
use crate::supervisor::{build_rtilde, closed_loop_states, RTilde, DEAD};
use crate::synthesis::{AttackMode, Preference};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ScenarioOptions {
    pub prune: PruneOptions,
    /// Insertions before the first genuine event are not counted.
    pub warmup: bool,
    pub preference: Preference,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub plant: Automaton,
    pub supervisor: Automaton,
    pub attack: EditAlphabet,
    pub critical: StateSet,
    pub mode: AttackMode,
    pub options: ScenarioOptions,
}

fn invalid(msg: impl Into<String>) -> ModelError {
    ModelError::InvalidScenario(msg.into())
}

fn split_list(v: &str) -> Vec<&str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

impl Scenario {
    pub fn new(
        plant: Automaton,
        supervisor: Automaton,
        attack_events: &[&str],
        critical_states: &[&str],
        mode: AttackMode,
    ) -> Result<Scenario, ModelError> {
        for a in [&plant, &supervisor] {
            if a.state_id(DEAD).is_some() {
                return Err(ModelError::ReservedName(DEAD.into()));
            }
        }
        if let AttackMode::Bounded(0) = mode {
            return Err(invalid("n_a must be at least 1"));
        }
        let attack = EditAlphabet::from_names(plant.alphabet(), attack_events)?;
        let critical = plant.state_set(critical_states)?;
        Ok(Scenario {
            plant,
            supervisor,
            attack,
            critical,
            mode,
            options: ScenarioOptions::default(),
        })
    }

    pub fn parse(text: &str, base: &Path) -> Result<Scenario, ModelError> {
        let mut kv: Vec<(usize, &str, &str)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ModelError::Parse {
                line: i + 1,
                msg: "expected key=value".into(),
            })?;
            kv.push((i + 1, k.trim(), v.trim()));
        }
        let get = |key: &str| kv.iter().find(|(_, k, _)| *k == key).map(|(_, _, v)| *v);
        for (ln, k, _) in &kv {
            const KEYS: [&str; 10] = [
                "plant",
                "supervisor",
                "attack_events",
                "critical_states",
                "mode",
                "n_a",
                "initial_insertions",
                "bounded_race",
                "trim",
                "prefer",
            ];
            if !KEYS.contains(k) {
                return Err(ModelError::Parse {
                    line: *ln,
                    msg: format!("unknown key `{k}`"),
                });
            }
        }
        let load = |key: &str| -> Result<Automaton, ModelError> {
            let rel = get(key).ok_or_else(|| invalid(format!("missing `{key}`")))?;
            let path = base.join(rel);
            let text = std::fs::read_to_string(&path)
                .map_err(|e| ModelError::Io(format!("{}: {e}", path.display())))?;
            parse_automaton(&text).map_err(|e| ModelError::Io(format!("{}: {e}", path.display())))
        };
        let plant = load("plant")?;
        let supervisor = load("supervisor")?;
        let n_a = get("n_a")
            .map(|v| v.parse::<u32>().map_err(|_| invalid(format!("bad n_a `{v}`"))))
            .transpose()?;
        let mode = match get("mode").unwrap_or("interruptible") {
            "interruptible" => AttackMode::Interruptible,
            "unbounded" => AttackMode::Unbounded,
            "bounded" => AttackMode::Bounded(n_a.ok_or_else(|| invalid("bounded mode needs n_a"))?),
            m => return Err(invalid(format!("unknown mode `{m}`"))),
        };
        let mut sc = Scenario::new(
            plant,
            supervisor,
            &split_list(get("attack_events").unwrap_or("")),
            &split_list(get("critical_states").ok_or_else(|| invalid("missing `critical_states`"))?),
            mode,
        )?;
        sc.options.warmup = match get("initial_insertions").unwrap_or("bounded") {
            "bounded" => false,
            "unbounded" => true,
            v => return Err(invalid(format!("bad initial_insertions `{v}`"))),
        };
        sc.options.prune.bounded_race = match get("bounded_race").unwrap_or("full") {
            "full" => BoundedRace::Full,
            "literal" => BoundedRace::Literal,
            v => return Err(invalid(format!("bad bounded_race `{v}`"))),
        };
        sc.options.prune.trim = match get("trim").unwrap_or("accessible") {
            "accessible" => TrimMode::Accessible,
            "coaccessible" => TrimMode::Coaccessible,
            v => return Err(invalid(format!("bad trim `{v}`"))),
        };
        sc.options.preference = match get("prefer").unwrap_or("let-through") {
            "let-through" => Preference::LetThrough,
            "deletion" => Preference::Delete,
            v => return Err(invalid(format!("bad prefer `{v}`"))),
        };
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Scenario, ModelError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ModelError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Scenario file text referring to the given model paths.
    pub fn to_text(&self, plant_path: &str, supervisor_path: &str) -> String {
        let alpha = self.plant.alphabet();
        let attack: Vec<&str> = self.attack.compromised().iter().map(|e| alpha.name(e)).collect();
        let crit: Vec<&str> = self.critical.iter().map(|x| self.plant.state_name(x)).collect();
        let mut out = String::new();
        writeln!(out, "plant={plant_path}").unwrap();
        writeln!(out, "supervisor={supervisor_path}").unwrap();
        writeln!(out, "attack_events={}", attack.join(",")).unwrap();
        writeln!(out, "critical_states={}", crit.join(",")).unwrap();
        match self.mode {
            AttackMode::Interruptible => writeln!(out, "mode=interruptible").unwrap(),
            AttackMode::Unbounded => writeln!(out, "mode=unbounded").unwrap(),
            AttackMode::Bounded(n) => writeln!(out, "mode=bounded\nn_a={n}").unwrap(),
        }
        if self.options.warmup {
            writeln!(out, "initial_insertions=unbounded").unwrap();
        }
        if self.options.prune.bounded_race == BoundedRace::Literal {
            writeln!(out, "bounded_race=literal").unwrap();
        }
        if self.options.prune.trim == TrimMode::Coaccessible {
            writeln!(out, "trim=coaccessible").unwrap();
        }
        if self.options.preference == Preference::Delete {
            writeln!(out, "prefer=deletion").unwrap();
        }
        out
    }

    /// Non-fatal observations about the scenario.
    pub fn diagnostics(&self) -> Result<Vec<String>, ModelError> {
        let mut out = Vec::new();
        let nominal = closed_loop_states(&self.plant, &self.supervisor)?;
        for x in self.critical.iter() {
            if nominal.contains(x) {
                out.push(format!(
                    "critical state `{}` is reachable without attack",
                    self.plant.state_name(x)
                ));
            }
            if !self.plant.enabled(x).is_empty() {
                out.push(format!(
                    "critical state `{}` is not absorbing",
                    self.plant.state_name(x)
                ));
            }
        }
        if self.attack.compromised().is_empty() {
            out.push("no compromised events: only the identity attacker exists".into());
        }
        Ok(out)
    }
}

/// A scenario with its completed supervisor.
#[derive(Clone, Debug)]
pub struct Setup {
    pub scenario: Scenario,
    pub rt: RTilde,
}

/// Structures computed for one attacker class.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub aida: Ida,
    pub baida: Option<Ida>,
    pub pruned: Pruned,
}

impl Setup {
    pub fn new(scenario: Scenario) -> Result<Setup, ModelError> {
        let rt = build_rtilde(&scenario.plant, &scenario.supervisor)?;
        Ok(Setup { scenario, rt })
    }

    pub fn ctx(&self) -> IdaContext<'_> {
        IdaContext {
            g: &self.scenario.plant,
            rt: &self.rt,
            ea: &self.scenario.attack,
            crit: &self.scenario.critical,
        }
    }

    pub fn aida(&self) -> Ida {
        construct_aida(&self.ctx())
    }

    pub fn baida(&self, aida: &Ida, n_a: u32) -> Result<Ida, ModelError> {
        construct_baida(aida, n_a, self.scenario.options.warmup)
    }

    pub fn analyse(&self, mode: AttackMode) -> Result<Analysis, ModelError> {
        let ctx = self.ctx();
        let opts = self.scenario.options.prune;
        let aida = self.aida();
        let (baida, pruned) = match mode {
            AttackMode::Interruptible => {
                let ida = prune_isda(&ctx, &aida, opts);
                let flags = vec![false; ida.num_nodes()];
                (None, Pruned { ida, flags })
            }
            AttackMode::Unbounded => (None, prune_usda(&ctx, &aida, opts)),
            AttackMode::Bounded(n) => {
                let b = self.baida(&aida, n)?;
                let p = prune_bsda(&ctx, &aida, &b, n, opts);
                (Some(b), p)
            }
        };
        Ok(Analysis {
            aida,
            baida,
            pruned,
        })
    }
}
