//! Command-line pipeline: scenario parsing, structure construction,
//! pruning, synthesis, verification and export.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use idasynth_core::dot::{automaton_to_dot, ida_to_dot};
use idasynth_core::format::write_automaton;
use idasynth_core::ida::write_flags;
use idasynth_core::random::{random_scenario, RandomConfig};
use idasynth_core::scenario::Analysis;
use idasynth_core::synthesis::synthesize;
use idasynth_core::{
    AttackFunction, AttackMode, ModelError, Scenario, Setup, Strength, SynthesisError,
};
use idasynth_oracle::check_problem1;
use thiserror::Error;

pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Parser)]
#[command(name = "idasynth", version, about = "Stealthy insertion/deletion attack synthesis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a scenario and report diagnostics.
    Validate(Common),
    /// Write the completed supervisor R̃.
    BuildRtilde(Staged),
    /// Write the AIDA (and the BAIDA in bounded mode).
    BuildAida(Staged),
    /// Write the pruned structure for the attacker class.
    Prune(Staged),
    /// Build, prune, extract an attack function and verify it.
    Synthesize(Synth),
    /// Check an attack function against the scenario.
    Verify(VerifyArgs),
    /// Write a DOT rendering of one pipeline stage.
    ExportDot(DotArgs),
    /// Write a seeded random scenario.
    Generate(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Interruptible,
    Unbounded,
    Bounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrengthArg {
    Strong,
    Weak,
}

impl From<StrengthArg> for Strength {
    fn from(s: StrengthArg) -> Strength {
        match s {
            StrengthArg::Strong => Strength::Strong,
            StrengthArg::Weak => Strength::Weak,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Stage {
    Plant,
    Supervisor,
    Rtilde,
    Aida,
    Baida,
    Pruned,
    Attack,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Scenario file.
    pub scenario: PathBuf,
    /// Attacker class, overriding the scenario.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Insertion bound for bounded mode, overriding the scenario.
    #[arg(long = "n-a")]
    pub n_a: Option<u32>,
}

#[derive(Debug, Args)]
pub struct Staged {
    #[command(flatten)]
    pub common: Common,
    /// Output directory.
    #[arg(long, short, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct Synth {
    #[command(flatten)]
    pub staged: Staged,
    #[arg(long, value_enum, default_value = "strong")]
    pub strength: StrengthArg,
    /// Observation horizon of the verification run.
    #[arg(long, default_value_t = 10)]
    pub horizon: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Attack function file written by `synthesize`.
    #[arg(long)]
    pub attack: PathBuf,
    #[arg(long, value_enum, default_value = "strong")]
    pub strength: StrengthArg,
    #[arg(long, default_value_t = 10)]
    pub horizon: usize,
}

#[derive(Debug, Args)]
pub struct DotArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub stage: Stage,
    #[arg(long, value_enum, default_value = "strong")]
    pub strength: StrengthArg,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Use the tiny instance shape (|X| ≤ 3, |Σ_o| ≤ 2).
    #[arg(long)]
    pub tiny: bool,
    #[arg(long, value_enum, default_value = "interruptible")]
    pub mode: ModeArg,
    #[arg(long = "n-a", default_value_t = 2)]
    pub n_a: u32,
    #[arg(long, short, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("no attack: {0}")]
    Infeasible(String),
    #[error("verification failed:\n{0}")]
    Rejected(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Infeasible(_) | CliError::Rejected(_) => 1,
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Conflict { .. } => CliError::Internal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<SynthesisError> for CliError {
    fn from(e: SynthesisError) -> Self {
        match e {
            SynthesisError::Infeasible => CliError::Infeasible(e.to_string()),
            _ => CliError::Internal(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Input(format!("{}: {e}", path.display()))
}

fn write_file(dir: &Path, name: &str, text: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let p = dir.join(name);
    fs::write(&p, text).map_err(|e| io_err(&p, e))?;
    Ok(p)
}

fn load(c: &Common) -> Result<Setup, CliError> {
    let mut sc = Scenario::load(&c.scenario)?;
    let n_a = c.n_a.or(match sc.mode {
        AttackMode::Bounded(n) => Some(n),
        _ => None,
    });
    sc.mode = match (c.mode, sc.mode) {
        (None, AttackMode::Bounded(_)) | (Some(ModeArg::Bounded), _) => {
            let n = n_a.ok_or_else(|| CliError::Input("bounded mode needs --n-a".into()))?;
            if n == 0 {
                return Err(CliError::Input("--n-a must be at least 1".into()));
            }
            AttackMode::Bounded(n)
        }
        (None, m) => m,
        (Some(ModeArg::Interruptible), _) => AttackMode::Interruptible,
        (Some(ModeArg::Unbounded), _) => AttackMode::Unbounded,
    };
    Ok(Setup::new(sc)?)
}

fn stage_name(mode: AttackMode) -> &'static str {
    match mode {
        AttackMode::Interruptible => "isda",
        AttackMode::Unbounded => "usda",
        AttackMode::Bounded(_) => "bsda",
    }
}

fn write_pruned(setup: &Setup, an: &Analysis, dir: &Path, log: &mut dyn Write) -> Result<(), CliError> {
    let ctx = setup.ctx();
    let mode = setup.scenario.mode;
    let name = stage_name(mode);
    let p = &an.pruned;
    write_file(dir, &format!("{name}.ida"), &ctx.write(&p.ida))?;
    let flags = mode.is_deterministic().then_some(&p.flags[..]);
    if let Some(f) = flags {
        write_file(dir, &format!("{name}.flags"), &write_flags(f))?;
    }
    write_file(dir, &format!("{name}.dot"), &ida_to_dot(&ctx, &p.ida, flags, name))?;
    let flagged = p.flags.iter().filter(|f| **f).count();
    say(log, format!(
        "{name}: {} nodes, {} edges, {flagged} flagged",
        p.ida.num_nodes(),
        p.ida.num_edges()
    ))
}

fn say(log: &mut dyn Write, msg: String) -> Result<(), CliError> {
    writeln!(log, "{msg}").map_err(|e| CliError::Internal(e.to_string()))
}

fn verdict_text(setup: &Setup, f: &AttackFunction, strength: Strength, horizon: usize) -> (bool, String) {
    let ctx = setup.ctx();
    let v = check_problem1(ctx, f, horizon, strength == Strength::Strong);
    let mut text = format!("mode={}\n", f.mode.name());
    if let Err(e) = f.check_class() {
        text.push_str(&format!("class_violation={e}\n"));
        return (false, text + &v.describe(&ctx));
    }
    text.push_str(&v.describe(&ctx));
    (v.passes(), text)
}

fn synthesize_cmd(a: &Synth, log: &mut dyn Write) -> Result<(), CliError> {
    let setup = load(&a.staged.common)?;
    let ctx = setup.ctx();
    let mode = setup.scenario.mode;
    let dir = &a.staged.out;
    let an = setup.analyse(mode)?;
    write_pruned(&setup, &an, dir, log)?;
    let strength = Strength::from(a.strength);
    let syn = synthesize(&ctx, &an.pruned, mode, strength, setup.scenario.options.preference)?;
    let f = &syn.function;
    write_file(dir, "attack.fsm", &f.write())?;
    write_file(dir, "attack_table.txt", &f.decision_table(&setup.scenario.attack))?;
    let path: Vec<String> = syn
        .path
        .iter()
        .map(|(_, l, d)| format!("{} {}", ctx.label_name(l), ctx.node_label(an.pruned.ida.node(*d))))
        .collect();
    let (ok, mut text) = verdict_text(&setup, f, strength, a.horizon);
    text = format!(
        "target={}\npath={}\n{text}",
        ctx.node_label(an.pruned.ida.node(syn.target)),
        path.join(" ; ")
    );
    write_file(dir, "verdict.txt", &text)?;
    say(log, format!("attack function: {} states", f.automaton.num_states()))?;
    say(log, text.trim_end().to_string())?;
    if !ok {
        return Err(CliError::Internal(format!("synthesized attack fails verification\n{text}")));
    }
    Ok(())
}

fn dot_cmd(a: &DotArgs, log: &mut dyn Write) -> Result<(), CliError> {
    let setup = load(&a.common)?;
    let ctx = setup.ctx();
    let mode = setup.scenario.mode;
    let text = match a.stage {
        Stage::Plant => automaton_to_dot(&setup.scenario.plant),
        Stage::Supervisor => automaton_to_dot(&setup.scenario.supervisor),
        Stage::Rtilde => automaton_to_dot(&setup.rt.automaton),
        Stage::Aida => ida_to_dot(&ctx, &setup.aida(), None, "aida"),
        Stage::Baida => {
            let AttackMode::Bounded(n) = mode else {
                return Err(CliError::Input("the BAIDA needs bounded mode".into()));
            };
            ida_to_dot(&ctx, &setup.baida(&setup.aida(), n)?, None, "baida")
        }
        Stage::Pruned => {
            let an = setup.analyse(mode)?;
            let flags = mode.is_deterministic().then_some(&an.pruned.flags[..]);
            ida_to_dot(&ctx, &an.pruned.ida, flags, stage_name(mode))
        }
        Stage::Attack => {
            let an = setup.analyse(mode)?;
            let syn = synthesize(&ctx, &an.pruned, mode, a.strength.into(), setup.scenario.options.preference)?;
            automaton_to_dot(&syn.function.automaton)
        }
    };
    match &a.out {
        Some(p) => fs::write(p, text).map_err(|e| io_err(p, e)),
        None => log.write_all(text.as_bytes()).map_err(|e| CliError::Internal(e.to_string())),
    }
}

/// Runs one command; progress and reports go to `log`.
pub fn run(cli: &Cli, log: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Validate(c) => {
            let setup = load(c)?;
            setup.rt.check()?;
            let sc = &setup.scenario;
            say(log, format!(
                "plant: {} states, {} events; supervisor: {} states; R̃: {} states",
                sc.plant.num_states(),
                sc.plant.alphabet().len(),
                sc.supervisor.num_states(),
                setup.rt.num_states()
            ))?;
            for d in sc.diagnostics()? {
                say(log, format!("note: {d}"))?;
            }
            say(log, "ok".into())
        }
        Command::BuildRtilde(a) => {
            let setup = load(&a.common)?;
            write_file(&a.out, "rtilde.fsm", &write_automaton(&setup.rt.automaton))?;
            write_file(&a.out, "rtilde.dot", &automaton_to_dot(&setup.rt.automaton))?;
            say(log, format!("rtilde: {} states", setup.rt.num_states()))
        }
        Command::BuildAida(a) => {
            let setup = load(&a.common)?;
            let ctx = setup.ctx();
            let aida = setup.aida();
            write_file(&a.out, "aida.ida", &ctx.write(&aida))?;
            write_file(&a.out, "aida.dot", &ida_to_dot(&ctx, &aida, None, "aida"))?;
            say(log, format!("aida: {} nodes, {} edges", aida.num_nodes(), aida.num_edges()))?;
            if let AttackMode::Bounded(n) = setup.scenario.mode {
                let b = setup.baida(&aida, n)?;
                write_file(&a.out, "baida.ida", &ctx.write(&b))?;
                say(log, format!("baida: {} nodes, {} edges", b.num_nodes(), b.num_edges()))?;
            }
            Ok(())
        }
        Command::Prune(a) => {
            let setup = load(&a.common)?;
            let an = setup.analyse(setup.scenario.mode)?;
            write_pruned(&setup, &an, &a.out, log)
        }
        Command::Synthesize(a) => synthesize_cmd(a, log),
        Command::Verify(a) => {
            let setup = load(&a.common)?;
            let text = fs::read_to_string(&a.attack).map_err(|e| io_err(&a.attack, e))?;
            let f = AttackFunction::read(&setup.scenario.attack, &text)?;
            let (ok, report) = verdict_text(&setup, &f, a.strength.into(), a.horizon);
            say(log, report.trim_end().to_string())?;
            if ok {
                Ok(())
            } else {
                Err(CliError::Rejected(report))
            }
        }
        Command::ExportDot(a) => dot_cmd(a, log),
        Command::Generate(a) => {
            let cfg = if a.tiny { RandomConfig::tiny() } else { RandomConfig::standard() };
            let mode = match a.mode {
                ModeArg::Interruptible => AttackMode::Interruptible,
                ModeArg::Unbounded => AttackMode::Unbounded,
                ModeArg::Bounded => AttackMode::Bounded(a.n_a.max(1)),
            };
            let sc = random_scenario(a.seed, &cfg, mode);
            write_file(&a.out, "plant.fsm", &write_automaton(&sc.plant))?;
            write_file(&a.out, "supervisor.fsm", &write_automaton(&sc.supervisor))?;
            let p = write_file(&a.out, "scenario.txt", &sc.to_text("plant.fsm", "supervisor.fsm"))?;
            say(log, format!("wrote {}", p.display()))
        }
    }
}
