use std::fs;
use std::path::Path;
use std::process::Command;

use graphene_dg::config::{echo, parse, resolve, FileConfig};
use graphene_dg::export::{snapshot_cells, write_frames};
use graphene_dg_core::convergence::Axis;
use graphene_dg_core::scenario::{FieldMode, RunConfig, ScenarioKind};

const TINY: &str = r#"
[mesh]
nx = 4
ne = 6
nt = 8

[run]
t_end = 0.02
"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_graphene-dg"))
}

fn run_cli(args: &[&str]) -> std::process::Output {
    let out = bin().args(args).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for entry in walk(dir) {
        let rel = entry.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
        out.push((rel, fs::read(&entry).unwrap()));
    }
    out.sort();
    out
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

#[test]
fn unknown_keys_are_rejected() {
    assert!(parse("[mesh]\nnz = 3\n").is_err());
    assert!(parse("colour = 1\n").is_err());
    assert_eq!(parse("").unwrap(), FileConfig::default());
}

#[test]
fn resolution_order() {
    let file = parse("scenario = \"gfet\"\n[run]\nt_end = 0.1\n").unwrap();
    let (c, _) = resolve(&file, None, None, None).unwrap();
    assert_eq!(c.scenario, ScenarioKind::Gfet);
    assert_eq!(c.t_end, 0.1);
    let (c, _) = resolve(&file, Some("suspended"), Some(2.0), None).unwrap();
    assert_eq!(c.scenario, ScenarioKind::Suspended);
    assert_eq!(c.field, FieldMode::Frozen(-2e-3));
    assert_eq!(c.t_end, 0.1);
    let file = parse("[field]\nstrength = 1.5\n[mesh]\nnt = 64\n").unwrap();
    let (c, levels) = resolve(&file, None, None, Some(Axis::Energy)).unwrap();
    assert_eq!(c.field, FieldMode::Frozen(-1.5e-3));
    assert_eq!((c.mesh.nx, c.mesh.ne, c.mesh.nt), (40, 40, 64));
    assert_eq!(levels, vec![40, 80, 160]);
}

#[test]
fn invalid_values_are_reported() {
    assert!(resolve(&FileConfig::default(), Some("bulk"), None, None).is_err());
    assert!(resolve(&parse("[run]\ncfl = 3.0\n").unwrap(), None, None, None).is_err());
    assert!(resolve(&parse("[field]\nmode = \"magnetic\"\n").unwrap(), None, None, None).is_err());
    assert!(resolve(&parse("[field]\nmode = \"coupled\"\nstrength = 1.0\n").unwrap(), None, None, None).is_err());
}

#[test]
fn echo_reproduces_the_configuration() {
    for (c, levels) in [
        (RunConfig::suspended(2.0), vec![]),
        (RunConfig::gfet().with_mesh(40, 25, 16), vec![40, 80]),
    ] {
        let text = toml::to_string(&echo(&c, &levels)).unwrap();
        let (back, l) = resolve(&parse(&text).unwrap(), None, None, None).unwrap();
        assert_eq!(back, c);
        assert_eq!(l, levels);
    }
}

#[test]
fn empty_series_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    write_frames(dir.path(), &[]).unwrap();
    assert!(fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn snapshot_positions() {
    assert_eq!(snapshot_cells(80), [("first", 0), ("middle", 40), ("last", 79)]);
}

#[test]
fn run_writes_every_output_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tiny.toml");
    fs::write(&cfg, TINY).unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        run_cli(&["run", "-q", "--config", cfg.to_str().unwrap(), "--frozen-field", "2", "--out", out.to_str().unwrap()]);
    }
    let fa = files(&a);
    assert_eq!(fa, files(&b));
    let names: Vec<&str> = fa.iter().map(|(n, _)| n.as_str()).collect();
    for band in ["plus", "minus"] {
        for pos in ["first", "middle", "last"] {
            assert!(names.contains(&format!("snapshot_{band}_{pos}.csv").as_str()));
        }
    }
    for f in ["frames/0000.csv", "frames/0001.csv", "frames/0002.csv", "frames/index.csv", "meta.txt"] {
        assert!(names.contains(&f), "{f} missing from {names:?}");
    }
    assert!(!names.contains(&"phi.csv"));
    let frame = fs::read_to_string(a.join("frames/0002.csv")).unwrap();
    assert_eq!(frame.lines().count(), 1 + 4 + 2);
    let snap = fs::read_to_string(a.join("snapshot_plus_middle.csv")).unwrap();
    assert_eq!(snap.lines().count(), 1 + 6 * 8);
    let meta = fs::read_to_string(a.join("meta.txt")).unwrap();
    assert!(meta.contains("# limiter_clamps = 0"));
    let (c, _) = resolve(&parse(&meta).unwrap(), None, None, None).unwrap();
    assert_eq!(c.field, FieldMode::Frozen(-2e-3));
    assert_eq!((c.mesh.nx, c.mesh.ne, c.mesh.nt), (4, 6, 8));
}

#[test]
fn coupled_run_writes_the_potential() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("gfet.toml");
    fs::write(&cfg, "scenario = \"gfet\"\n[mesh]\nnx = 8\nne = 6\nnt = 8\n[run]\nt_end = 0.002\nframe_interval = 0.002\n").unwrap();
    run_cli(&["run", "-q", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    let phi = fs::read_to_string(dir.path().join("phi.csv")).unwrap();
    assert_eq!(phi.lines().count(), 1 + 9 * 23);
}

#[test]
fn converge_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("study.toml");
    fs::write(&cfg, "[mesh]\nnx = 4\nnt = 8\n[run]\nt_end = 0.01\n[convergence]\nlevels = [4, 8, 16]\n").unwrap();
    run_cli(&["converge", "-q", "--axis", "eps", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    let report = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    // three quantities × three norms × two level pairs
    assert_eq!(report.lines().count(), 1 + 3 * 3 * 2);
    assert!(report.lines().nth(1).unwrap().starts_with("density,L1,4,8,"));
}

#[test]
fn dump_tables_writes_the_factors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("t.toml");
    fs::write(&cfg, TINY).unwrap();
    run_cli(&["dump-tables", "--scenario", "gfet", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    for f in ["blocks.csv", "angular.csv", "impurity.csv", "meta.txt"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let angular = fs::read_to_string(dir.path().join("angular.csv")).unwrap();
    // acoustic, optical, K and remote phonons, eight angle offsets each
    assert_eq!(angular.lines().count(), 1 + 4 * 8);
}

#[test]
fn bad_scenario_fails_with_a_message() {
    let out = bin().args(["run", "--scenario", "bulk", "--out", "/nonexistent/never"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown scenario"));
}
