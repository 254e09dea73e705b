use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_rankwidth"));
    c.env_remove("RANKWIDTH_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_complete(dir: &Path, n: usize) -> PathBuf {
    let mut text = format!("{n} {}\n", n * (n - 1) / 2);
    for u in 0..n {
        for v in u + 1..n {
            text.push_str(&format!("{u} {v}\n"));
        }
    }
    let path = dir.join(format!("k{n}.edgelist"));
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn rank_width_of_k5() {
    let dir = tempfile::tempdir().unwrap();
    let k5 = write_complete(dir.path(), 5);
    let o = run(&["rw", k5.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "rank-width: 1\n");
    assert!(stderr(&o).contains("config:"));
}

#[test]
fn tail_threshold_closed_form_case() {
    let o = run(&["tail-threshold", "--c", "2", "--eps", "100"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().next() == Some("M = 1"), "{}", stdout(&o));
}

#[test]
fn capacity_error_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g40.edgelist");
    let o = run(&["gnp", "--n", "40", "--p", "0.2", "--seed", "1", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["rw", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cap of 20"), "{}", stderr(&o));
}

#[test]
fn usage_and_io_errors() {
    assert_eq!(run(&["rw", "--no-such-flag", "x"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["rw", "/definitely/not/here"]).status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.edgelist");
    std::fs::write(&bad, "3 1\n0 0\n").unwrap();
    let o = run(&["tw", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn seed_comes_from_environment_unless_given() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    let o = bin()
        .args(["gnp", "--n", "30", "--p", "0.3", "-o", a.to_str().unwrap()])
        .env("RANKWIDTH_SEED", "17")
        .output()
        .unwrap();
    assert!(stderr(&o).contains("seed: 17"), "{}", stderr(&o));
    run(&["gnp", "--n", "30", "--p", "0.3", "--seed", "17", "-o", b.to_str().unwrap()]);
    bin()
        .args(["gnp", "--n", "30", "--p", "0.3", "--seed", "18", "-o", c.to_str().unwrap()])
        .env("RANKWIDTH_SEED", "17")
        .output()
        .unwrap();
    let (a, b, c) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap(), std::fs::read(c).unwrap());
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn experiment_csv_is_reproducible_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for workers in ["1", "3"] {
        let path = dir.path().join(format!("w{workers}.csv"));
        let o = run(&[
            "experiment", "--regime", "supercritical", "--n", "300", "--c", "3", "--samples", "4", "--seed", "5",
            "--workers", workers, "-o", path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        files.push(std::fs::read_to_string(path).unwrap());
    }
    assert_eq!(files[0], files[1]);
    assert!(files[0].starts_with("regime,n,p,seed,sample_index,rw,tw,ceil_n3,gap,"));
    assert_eq!(files[0].lines().count(), 5);
}

#[test]
fn machine_readable_formats() {
    let dir = tempfile::tempdir().unwrap();
    let k4 = write_complete(dir.path(), 4);
    let o = run(&["--format", "csv", "cheeger", k4.to_str().unwrap()]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("phi,witness,cut_edges,d_s,d_comp"));
    assert!(lines.next().unwrap().starts_with("2/3,"));
    let o = run(&["--format", "json-lines", "cutrank", k4.to_str().unwrap(), "--v1", "0,1", "--v2", "2,3"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["cutrank"], 1);
    let o = run(&["--format", "json-lines", "experiment", "--regime", "subcritical", "--n", "1000", "--c", "0.5", "--samples", "2"]);
    assert_eq!(stdout(&o).lines().count(), 2);
    let o = run(&["--format", "csv", "matrix-stats", "--mode", "dense", "--n", "9,12", "--samples", "3"]);
    assert!(stdout(&o).starts_with("n,p,C,alpha,samples,empirical_freq,clopper_pearson_ucl,paper_bound\n"));
}

#[test]
fn decomposition_and_separation_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c6.edgelist");
    std::fs::write(&path, "6 6\n0 1\n1 2\n2 3\n3 4\n4 5\n0 5\n").unwrap();
    let dec = dir.path().join("c6.dec");
    let o = run(&["rw", path.to_str().unwrap(), "--decomposition", dec.to_str().unwrap(), "--report"]);
    assert_eq!(stdout(&o), "rank-width: 2\ntree-width: 2\nclique-width: between 2 and 7\n");
    let text = std::fs::read_to_string(dec).unwrap();
    let parsed: rankwidth::width::RankDecomposition = text.parse().unwrap();
    assert_eq!(parsed.vertex_count(), 6);
    let o = run(&["separate", path.to_str().unwrap()]);
    assert!(stdout(&o).contains("V1: "), "{}", stdout(&o));
    let o = run(&["certify", path.to_str().unwrap(), "--core", "0,1,2,3,4,5", "--cap", "3"]);
    assert!(stdout(&o).contains("bound: 1\n"), "{}", stdout(&o));
}
