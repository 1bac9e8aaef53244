use std::path::Path;
use std::process::{Command, Output};

fn tlsrand(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tlsrand")).args(args).output().expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn parse_column(text: &str) -> Vec<f64> {
    text.lines().filter(|l| !l.trim().is_empty()).map(|l| l.trim().parse().unwrap()).collect()
}

#[test]
fn generate_then_solve_example2() {
    let dir = tempfile::tempdir().unwrap();
    let out = tlsrand(&["problems", "--name", "example2", "--m", "12", "--out", path_str(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for file in ["A.csv", "b.csv", "x_true.csv"] {
        assert!(dir.path().join(file).exists(), "{file} missing");
    }
    let a = dir.path().join("A.csv");
    let b = dir.path().join("b.csv");
    for method in ["tls", "tls-closed"] {
        let out = tlsrand(&["solve", "--method", method, "--A", path_str(&a), "--b", path_str(&b)]);
        assert!(out.status.success());
        let x = parse_column(&String::from_utf8(out.stdout).unwrap());
        assert_eq!(x.len(), 10);
        assert!(x.iter().all(|v| (v + 1.0).abs() < 1e-10), "{method}: {x:?}");
    }
}

#[test]
fn truncated_solvers_write_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = path_str(dir.path());
    assert!(tlsrand(&["problems", "--name", "shaw", "--m", "40", "--noise", "1e-3", "--out", d]).status.success());
    let a = dir.path().join("A.csv");
    let b = dir.path().join("b.csv");
    let x_out = dir.path().join("x.csv");
    let args = ["--A", path_str(&a), "--b", path_str(&b), "--out", path_str(&x_out)];
    for extra in [&["--method", "ttls", "--k", "5"][..], &["--method", "rttls", "--k", "5"], &["--method", "arttls", "--eps", "0.5"]] {
        let out = tlsrand(&[&["solve"], extra, &args[..]].concat());
        assert!(out.status.success(), "{extra:?}: {}", String::from_utf8_lossy(&out.stderr));
        let x = parse_column(&std::fs::read_to_string(&x_out).unwrap());
        assert_eq!(x.len(), 40);
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    let out = tlsrand(&["solve", "--method", "tls", "--A", path_str(&missing), "--b", path_str(&missing)]);
    assert_eq!(out.status.code(), Some(3));

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "1,2\n3,x\n").unwrap();
    let out = tlsrand(&["solve", "--method", "tls", "--A", path_str(&bad), "--b", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(3));

    // A = I with b orthogonal to its range is not generic
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    std::fs::write(&a, "1,0\n0,1\n0,0\n").unwrap();
    std::fs::write(&b, "0\n0\n1\n").unwrap();
    let out = tlsrand(&["solve", "--method", "tls", "--A", path_str(&a), "--b", path_str(&b)]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bench_without_config_file() {
    let out = tlsrand(&["bench", "--experiment", "rttls", "--problem", "shaw", "--m", "60"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("problem,m,n,noise,k"));
    assert_eq!(lines.count(), 1);
}

#[test]
fn bench_config_file_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("perturb.cfg");
    std::fs::write(&cfg, "experiment = perturb\nproblem = example1\nm = 30\nn = 8\nrepetitions = 2\nformat = json\n")
        .unwrap();
    let mut outputs = Vec::new();
    for name in ["one.json", "two.json"] {
        let path = dir.path().join(name);
        let out = tlsrand(&["bench", "--config", path_str(&cfg), "--out", path_str(&path)]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    let rows: Vec<tlsrand::perturb::PerturbReport> = tlsrand::bench::load_table(dir.path().join("one.json")).unwrap();
    assert_eq!(rows.len(), 2);
}

#[test]
fn perturb_respects_size_cap_variable() {
    let capped = Command::new(env!("CARGO_BIN_EXE_tlsrand"))
        .args(["perturb", "--problem", "example2", "--m", "20"])
        .env("TLSRAND_SIZE_CAP", "10")
        .output()
        .unwrap();
    assert!(capped.status.success());
    let text = String::from_utf8(capped.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row.len(), 9);
    assert!(row[2].is_empty() && row[4].is_empty(), "{row:?}");

    let full = tlsrand(&["perturb", "--problem", "example2", "--m", "20"]);
    let text = String::from_utf8(full.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert!(!row[2].is_empty() && !row[4].is_empty());

    let bad = Command::new(env!("CARGO_BIN_EXE_tlsrand"))
        .args(["perturb", "--problem", "example2", "--m", "20"])
        .env("TLSRAND_SIZE_CAP", "lots")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(3));
}

#[test]
fn unknown_problem_is_a_solver_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = tlsrand(&["problems", "--name", "laplace", "--m", "10", "--out", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}
