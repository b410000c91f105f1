use std::fs;
use std::path::Path;
use std::process::Command;

use solwave::cli_io::{parse_config, run, Command as Cmd};

fn solwave(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_solwave"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solve_benchmark_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "sech.toml",
        "[problem]\ns = 2\nr = 0\nmu = 0.4\n",
    );
    let out = dir.path().join("run");
    let o = solwave(&[
        "solve",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--quiet",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let rec = json(&out.join("solution.json"));
    assert!((rec["nu"].as_f64().unwrap() - 0.96).abs() < 1e-4);
    assert_eq!(rec["grid"]["N"].as_u64().unwrap(), 4096);
    for key in [
        "mu",
        "residual_l2",
        "iterations",
        "Q",
        "L",
        "N",
        "E",
        "method",
    ] {
        assert!(rec.get(key).is_some(), "{key}");
    }
    let echo = fs::read_to_string(out.join("config.toml")).unwrap();
    let again = parse_config(&echo).unwrap();
    assert_eq!(again.grid.points, 4096);
    assert!(echo.contains("tol_residual"));
    let csv = fs::read_to_string(out.join("solution.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "x,u");
    assert_eq!(csv.lines().count(), 4097);
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "[problem]\ns = 0.5\nr = 0\n");
    let o = solwave(&["solve", "--config", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("r < s - 1"));
    let typo = write(
        dir.path(),
        "typo.toml",
        "[problem]\ns = 2\nr = 0\n[solver]\ntol_residul = 1e-9\n",
    );
    let o = solwave(&["solve", "--config", &typo]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("tol_residul") && err.contains("line"), "{err}");
    let ok = write(dir.path(), "low.toml", "[problem]\ns = 0.5\nr = -0.6\n");
    assert!(parse_config(&fs::read_to_string(ok).unwrap()).is_ok());
}

#[test]
fn scaling_with_too_few_records_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "p.toml",
        "[problem]\ns = 2\nr = 0\n[solver]\ncontinuation = [0.2, 0.4]\n[probe]\nkind = \"scaling\"\n",
    );
    let out = dir.path().join("run");
    let o = solwave(&["probe", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("at least"));
    let v = json(&out.join("verdict.json"));
    assert_eq!(v["pass"], false);
    assert!(out.join("solution_001.json").exists());
}

#[test]
fn sweep_writes_one_record_per_mass() {
    let dir = tempfile::tempdir().unwrap();
    let text = "[problem]\ns = 2\nr = 0\nmu = 0.1\n[grid]\nL = 1280\nN = 2048\n[solver]\n\
                continuation = [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5]\n";
    let cfg = parse_config(text).unwrap();
    let out = dir.path().join("sweep");
    let outcome = run(&cfg, Cmd::Sweep, &out).unwrap();
    assert!(outcome.pass, "{}", outcome.summary);
    let records = json(&out.join("sweep.json"));
    assert_eq!(records.as_array().unwrap().len(), 10);
    for i in 0..10 {
        assert!(out.join(format!("solution_{i:03}.json")).exists());
    }
    assert_eq!(
        fs::read_to_string(out.join("sweep.csv"))
            .unwrap()
            .lines()
            .count(),
        11
    );
}

#[test]
fn runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let text = "seed = 5\n[problem]\ns = 1.5\nr = 0.2\n[probe]\nkind = \"nonlinear_bound\"\nensemble_size = 200\n";
    let cfg = parse_config(text).unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run(&cfg, Cmd::Probe, &a).unwrap();
    run(&cfg, Cmd::Probe, &b).unwrap();
    assert_eq!(
        fs::read(a.join("verdict.json")).unwrap(),
        fs::read(b.join("verdict.json")).unwrap()
    );

    let text = "[problem]\ns = 2\nr = 0\nmu = 0.3\n[grid]\nL = 400\nN = 1024\n";
    let cfg = parse_config(text).unwrap();
    run(&cfg, Cmd::Solve, &a).unwrap();
    run(&cfg, Cmd::Solve, &b).unwrap();
    for f in ["solution.csv", "solution.json", "solution_spectrum.csv"] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn evolve_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let text =
        "[problem]\ns = 2\nr = 0\nmu = 0.8\n[grid]\nL = 160\nN = 512\n[evolve]\nT = 5\ndt = 0.01\n";
    let cfg = parse_config(text).unwrap();
    let out = dir.path().join("ev");
    let outcome = run(&cfg, Cmd::Evolve, &out).unwrap();
    assert!(outcome.pass, "{}", outcome.summary);
    let v = json(&out.join("verdict.json"));
    assert!(v["metrics"]["frame_error"].as_f64().unwrap() < 1e-3);
    assert!(out.join("trajectory/manifest.json").exists());
}

#[test]
fn probe_kinds_produce_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    for (kind, r, grid) in [
        ("commutator", -0.5, "L = 400\nN = 4096\n"),
        ("gamma_upper", 0.0, ""),
        ("infimum", 0.0, ""),
        ("smoothness", 0.0, "L = 400\nN = 1024\n"),
    ] {
        let text = format!(
            "[problem]\ns = 2\nr = {r}\nmu = 0.3\n[grid]\n{grid}[probe]\nkind = \"{kind}\"\n"
        );
        let cfg = parse_config(&text).unwrap();
        let out = dir.path().join(kind);
        let outcome = run(&cfg, Cmd::Probe, &out).unwrap();
        assert!(outcome.pass, "{kind}: {}", outcome.summary);
        assert_eq!(json(&out.join("verdict.json"))["probe"], kind);
    }
}
