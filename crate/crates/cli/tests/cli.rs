use std::process::{Command, Output};

fn arena(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arena")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn run_writes_a_replayable_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("trace.jsonl");
    let out = out.to_str().unwrap();
    let o = arena(&[
        "run", "--scheme", "s4", "--bang", "aleph0", "--machine", "naive", "--env", "c", "--rounds", "20", "--seed", "7",
        "--out", out,
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("verdict  induced            B"));
    let r = arena(&["replay", out]);
    assert!(r.status.success());
    assert!(stdout(&r).contains("moves replayed"));
}

#[test]
fn run_from_toml_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("match.toml");
    std::fs::write(
        &cfg,
        "scheme = \"long\"\nbang = \"aleph0\"\nmachine = \"k\"\nenv = \"schedule\"\nrounds = 80\nseed = 3\nschedule = [[5, \"\"], [30, \"1\"]]\n",
    )
    .unwrap();
    let o = arena(&["run", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("ok   k layout"));
}

#[test]
fn incompatible_match_is_an_error() {
    let o = arena(&["run", "--scheme", "short", "--bang", "aleph0", "--machine", "sp-parallel", "--env", "random"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn layout_prints_the_stage_diagram() {
    let o = arena(&["layout", "--splits", "e,1,0"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), include_str!("../../core/tests/golden/stage4.txt"));
}

#[test]
fn nnf_pushes_negation_down() {
    let o = arena(&["nnf", "~(P & !u Q)"]);
    assert_eq!(stdout(&o).trim(), "~P | ?u ~Q");
}

#[test]
fn table_on_one_cell() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("table.toml");
    std::fs::write(&cfg, "fuzz_matches = 4\nmax_rounds = 10\ncells = [\"short/parallel\"]\n").unwrap();
    let traces = dir.path().join("traces");
    let o = arena(&["table", "--config", cfg.to_str().unwrap(), "--trace-dir", traces.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("short/parallel: Valid, 4 runs"));
    assert_eq!(std::fs::read_dir(&traces).unwrap().count(), 4);
}
