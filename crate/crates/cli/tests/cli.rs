use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use clap::Parser;
use idasynth_cli::{run, Cli, CliError};
use idasynth_core::format::parse_automaton;
use idasynth_core::{AttackFunction, Scenario, Setup};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/example1").join(name)
}

fn scratch(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("idasynth-cli-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    d
}

fn invoke(args: &[&str]) -> (Result<(), CliError>, String) {
    let cli = Cli::try_parse_from(std::iter::once("idasynth").chain(args.iter().copied())).unwrap();
    let mut buf = Vec::new();
    let r = run(&cli, &mut buf);
    (r, String::from_utf8(buf).unwrap())
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect()
}

#[test]
fn synthesize_reports_strong_hit_on_fixture() {
    let out = scratch("synth");
    let (r, log) = invoke(&["synthesize", fixture("scenario.txt").to_str().unwrap(), "--strength", "strong", "-o", out.to_str().unwrap()]);
    r.unwrap();
    assert!(log.contains("passes=true"));
    let verdict = fs::read_to_string(out.join("verdict.txt")).unwrap();
    assert!(verdict.contains("strong_hit=true"));
    assert!(verdict.contains("admissible=true"));
    assert!(verdict.contains("stealthy=true"));
    assert!(out.join("attack.fsm").exists() && out.join("attack_table.txt").exists());
    fs::remove_dir_all(out).ok();
}

#[test]
fn interruptible_prune_drops_deletion_at_1b() {
    let out = scratch("prune");
    let (r, _) = invoke(&["prune", fixture("scenario.txt").to_str().unwrap(), "--mode", "interruptible", "-o", out.to_str().unwrap()]);
    r.unwrap();
    let dot = fs::read_to_string(out.join("isda.dot")).unwrap();
    let id = dot
        .lines()
        .find(|l| l.contains("label=\"E({1},B)\""))
        .and_then(|l| l.split_whitespace().next())
        .unwrap()
        .to_string();
    assert!(dot.lines().any(|l| l.starts_with(&format!("  {id} ->")) && l.contains("\"b\"")));
    assert!(!dot.lines().any(|l| l.starts_with(&format!("  {id} ->")) && l.contains("b.del")));
    fs::remove_dir_all(out).ok();
}

#[test]
fn pipeline_outputs_are_byte_identical() {
    for (cmd, scen) in [
        ("build-rtilde", "scenario.txt"),
        ("build-aida", "scenario_bounded.txt"),
        ("prune", "scenario_unbounded.txt"),
        ("synthesize", "scenario_bounded.txt"),
        ("synthesize", "scenario.txt"),
    ] {
        let a = scratch(&format!("det-a-{cmd}"));
        let b = scratch(&format!("det-b-{cmd}"));
        let s = fixture(scen);
        let (ra, la) = invoke(&[cmd, s.to_str().unwrap(), "-o", a.to_str().unwrap()]);
        let (rb, lb) = invoke(&[cmd, s.to_str().unwrap(), "-o", b.to_str().unwrap()]);
        ra.unwrap();
        rb.unwrap();
        assert_eq!(la, lb);
        let (sa, sb) = (snapshot(&a), snapshot(&b));
        assert!(!sa.is_empty());
        assert_eq!(sa, sb, "{cmd}");
        fs::remove_dir_all(a).ok();
        fs::remove_dir_all(b).ok();
    }
}

#[test]
fn emitted_models_reparse() {
    let out = scratch("reparse");
    let o = out.to_str().unwrap();
    let s = fixture("scenario_bounded.txt");
    for cmd in ["build-rtilde", "build-aida", "synthesize"] {
        invoke(&[cmd, s.to_str().unwrap(), "-o", o]).0.unwrap();
    }
    let setup = Setup::new(Scenario::load(&s).unwrap()).unwrap();
    let ctx = setup.ctx();
    let rt = fs::read_to_string(out.join("rtilde.fsm")).unwrap();
    assert_eq!(parse_automaton(&rt).unwrap(), setup.rt.automaton);
    let aida = fs::read_to_string(out.join("aida.ida")).unwrap();
    assert_eq!(ctx.write(&ctx.read(&aida).unwrap()), aida);
    let baida = fs::read_to_string(out.join("baida.ida")).unwrap();
    assert_eq!(ctx.write(&ctx.read(&baida).unwrap()), baida);
    let f = fs::read_to_string(out.join("attack.fsm")).unwrap();
    assert_eq!(AttackFunction::read(&setup.scenario.attack, &f).unwrap().write(), f);
    fs::remove_dir_all(out).ok();
}

#[test]
fn generate_is_seeded() {
    let a = scratch("gen-a");
    let b = scratch("gen-b");
    invoke(&["generate", "--seed", "11", "-o", a.to_str().unwrap()]).0.unwrap();
    invoke(&["generate", "--seed", "11", "-o", b.to_str().unwrap()]).0.unwrap();
    assert_eq!(snapshot(&a), snapshot(&b));
    invoke(&["validate", a.join("scenario.txt").to_str().unwrap()]).0.unwrap();
    fs::remove_dir_all(a).ok();
    fs::remove_dir_all(b).ok();
}

fn exit_code(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_idasynth")).args(args).output().unwrap().status.code().unwrap()
}

#[test]
fn exit_codes_distinguish_failures() {
    let dir = scratch("codes");
    fs::create_dir_all(&dir).unwrap();
    let o = dir.join("o");
    assert_eq!(exit_code(&["validate", fixture("scenario.txt").to_str().unwrap()]), 0);
    assert_eq!(exit_code(&["validate", dir.join("missing.txt").to_str().unwrap()]), 2);

    // Broken plant file: parse error with a line number.
    fs::write(dir.join("bad.fsm"), "automaton g\nevent a obs\nstate 0 initial\ntrans 0 a 9\n").unwrap();
    fs::copy(fixture("supervisor.fsm"), dir.join("supervisor.fsm")).unwrap();
    fs::write(dir.join("bad.txt"), "plant=bad.fsm\nsupervisor=supervisor.fsm\nattack_events=b\ncritical_states=2\nmode=interruptible\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_idasynth"))
        .args(["validate", dir.join("bad.txt").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    // No compromised events: nothing can reach the critical state.
    fs::copy(fixture("plant.fsm"), dir.join("plant.fsm")).unwrap();
    fs::write(dir.join("none.txt"), "plant=plant.fsm\nsupervisor=supervisor.fsm\nattack_events=\ncritical_states=2\nmode=interruptible\n").unwrap();
    assert_eq!(exit_code(&["synthesize", dir.join("none.txt").to_str().unwrap(), "-o", o.to_str().unwrap()]), 1);

    // The synthesized attack verifies; a loud one does not.
    assert_eq!(exit_code(&["synthesize", fixture("scenario.txt").to_str().unwrap(), "-o", o.to_str().unwrap()]), 0);
    let attack = o.join("attack.fsm");
    assert_eq!(exit_code(&["verify", fixture("scenario.txt").to_str().unwrap(), "--attack", attack.to_str().unwrap()]), 0);
    // Inserting b before anything is observed: R̃ at A has no b.
    let loud = dir.join("loud.fsm");
    fs::write(&loud, "mode interruptible\nautomaton attack\nevent b.ins obs ctrl\nstate s0 initial\nstate s1\ntrans s0 b.ins s1\n").unwrap();
    assert_eq!(exit_code(&["verify", fixture("scenario.txt").to_str().unwrap(), "--attack", loud.to_str().unwrap()]), 1);
    fs::remove_dir_all(dir).ok();
}
