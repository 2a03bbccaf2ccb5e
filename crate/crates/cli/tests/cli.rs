use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mets(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mets")).args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn gen_oracle_solve_validate() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(mets(&["gen", "--profile", "tiny", "--n", "4", "--seed", "3", "--out", "t.txt"], d).status.success());

    let oracle = mets(&["oracle", "--instance", "t.txt"], d);
    assert!(oracle.status.success());
    let optimum: f64 = stdout(&oracle).lines().next().unwrap().trim_start_matches("best_td: ").parse().unwrap();

    let solve = mets(&["solve", "--instance", "t.txt", "--seed", "1", "--out", "s.txt"], d);
    assert!(solve.status.success());
    let best: f64 = stdout(&solve)
        .lines()
        .find_map(|l| l.strip_prefix("best_td: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((best - optimum).abs() <= 1e-6);

    let check = mets(&["validate", "--instance", "t.txt", "--solution", "s.txt"], d);
    assert!(check.status.success());
    assert!(stdout(&check).contains("feasible: true"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("bad.txt"), "NAME: x\nN: two\n").unwrap();
    let out = mets(&["solve", "--instance", "bad.txt"], d);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    assert_eq!(mets(&["solve", "--instance", "missing.txt"], d).status.code(), Some(2));
    assert_eq!(mets(&["gen", "--profile", "paris", "--out", "p.txt"], d).status.code(), Some(2));

    // a customer 100 miles out cannot be served within a 75-mile range
    let far = "NAME: far\nN: 1\nS: 1\nM: 1\nSPEED: 40\nTMAX: 8\nEF: 75\nCR: 1\nTAU_S: 0.5\nETA: 1\nTAU_C: 0.5\nNODES\n0 DEPOT 0 0\n1 CUST 100 0\n2 AFS 1 0\n";
    fs::write(d.join("far.txt"), far).unwrap();
    assert_eq!(mets(&["solve", "--instance", "far.txt"], d).status.code(), Some(1));
}

#[test]
fn infeasible_solution_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(mets(&["gen", "--profile", "s_central", "--seed", "2", "--out", "c.txt"], d).status.success());
    // every customer on one route breaks the duration limit
    let route: Vec<String> = (1..=15).map(|c| c.to_string()).collect();
    fs::write(d.join("one.txt"), format!("0 {} 16 0\n", route.join(" "))).unwrap();
    let out = mets(&["validate", "--instance", "c.txt", "--solution", "one.txt"], d);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("duration_ok: false"));
}

#[test]
fn bench_writes_runs_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::create_dir(d.join("set")).unwrap();
    // runs are grouped by the NAME field, which for tiny files is tiny<n>
    for n in ["4", "5"] {
        let out = format!("set/tiny{n}.txt");
        assert!(mets(&["gen", "--profile", "tiny", "--n", n, "--seed", "1", "--out", &out], d).status.success());
    }
    let out = mets(&["bench", "--dir", "set", "--runs", "2", "--max-iter", "50", "--out", "runs.csv"], d);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let runs = fs::read_to_string(d.join("runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 5);
    assert!(runs.starts_with("instance,seed,best_td"));
    let summary = fs::read_to_string(d.join("runs.summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);
}
