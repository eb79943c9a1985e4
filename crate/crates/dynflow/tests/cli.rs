//! End-to-end checks of the `dynflow` binary: subcommands, file formats and
//! exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn dynflow(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dynflow"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(path: &Path, content: &str) {
    std::fs::write(path, content).unwrap();
}

const G1_DIMACS: &str = "c four vertices\n\
    p max 4 5\n\
    n 1 s\n\
    n 4 t\n\
    a 1 2 4\n\
    a 1 3 2\n\
    a 2 3 3\n\
    a 2 4 1\n\
    a 3 4 6\n";

#[test]
fn solve_prints_the_flow() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir.path().join("g1.max"), G1_DIMACS);
    let out = dynflow(&["solve", "--graph", "g1.max", "--mode", "static"], dir.path());
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.trim(), "flow 6");
}

#[test]
fn bench_with_empty_batch_verifies_the_fixed_point() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir.path().join("g1.max"), G1_DIMACS);
    write(&dir.path().join("b.upd"), "u 0 mix\n");
    let out = dynflow(
        &[
            "bench", "--graph", "g1.max", "--updates", "b.upd", "--mode", "dyn-pr", "--verify",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().all(|l| l.trim() == "flow 6"));
}

#[test]
fn generated_batches_agree_with_static_rebuild() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir.path().join("g1.max"), G1_DIMACS);
    let out = dynflow(
        &[
            "gen-batch", "--graph", "g1.max", "--percent", "100", "--kind", "dec", "--seed",
            "1", "--out", "b.upd",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    for mode in ["dyn-pr", "dyn-pp", "static"] {
        let out = dynflow(
            &[
                "bench", "--graph", "g1.max", "--updates", "b.upd", "--mode", mode, "--verify",
                "--csv", "runs.csv",
            ],
            dir.path(),
        );
        assert!(out.status.success(), "{mode} failed");
    }
    let csv = std::fs::read_to_string(dir.path().join("runs.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "dataset,mode,schedule,batch_pct,batch_kind,seed,flow,time_ms,rounds,pushes,relabels,invalid_removed"
    );
    // Three runs, two rows each (initial static + batch row).
    assert_eq!(lines.count(), 6);
    // Every dynamic batch row reports the same flow as the static rebuild.
    let flows: Vec<&str> = csv
        .lines()
        .skip(1)
        .filter(|l| l.contains(",dec,"))
        .map(|l| l.split(',').nth(6).unwrap())
        .collect();
    assert_eq!(flows.len(), 3);
    assert!(flows.windows(2).all(|w| w[0] == w[1]), "{flows:?}");
}

#[test]
fn gen_graph_roundtrips_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let out = dynflow(
        &[
            "gen-graph", "--n", "80", "--m", "320", "--seed", "9", "--out", "g.max",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let out = dynflow(
        &["solve", "--graph", "g.max", "--verify", "--threads", "2"],
        dir.path(),
    );
    assert!(out.status.success());
    let flow = String::from_utf8(out.stdout).unwrap();

    // Same value under the topology-driven schedule.
    let out = dynflow(
        &[
            "solve", "--graph", "g.max", "--verify", "--schedule", "topology",
            "--kernel-cycles", "2",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), flow);
}

#[test]
fn plain_format_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    write(
        &dir.path().join("g1.txt"),
        "4 5 1 4\n1 2 4\n1 3 2\n2 3 3\n2 4 1\n3 4 6\n",
    );
    let out = dynflow(&["solve", "--graph", "g1.txt"], dir.path());
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "flow 6");
}

#[test]
fn distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    // Malformed file -> 1.
    write(&dir.path().join("bad.max"), "p max 4 1\nn 1 s\nn 4 t\na 1 9 5\n");
    let out = dynflow(&["solve", "--graph", "bad.max"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    // Missing file -> 1.
    let out = dynflow(&["solve", "--graph", "nope.max"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    // Unknown flag -> 2 (usage).
    let out = dynflow(&["solve", "--bogus"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    // Update targeting a missing edge -> 1 with a diagnostic.
    write(&dir.path().join("g1.max"), G1_DIMACS);
    write(&dir.path().join("bad.upd"), "u 1 mix\n1 4 5\n");
    let out = dynflow(
        &["bench", "--graph", "g1.max", "--updates", "bad.upd"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing edge"));
}
