use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const FIG1: &str = "problem = \"mpp\"\nvertices = 4\nedges = [[0, 1], [1, 2], [1, 3]]\nstarts = [0, 2]\ngoals = [2, 3]\nk = 2\n";

fn pathip(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pathip"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

#[test]
fn solve_then_verify() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "fig1.toml", FIG1);
    let sol = s(&dir.path().join("sol.toml"));
    let out = pathip(&[
        "solve",
        "--problem",
        "mpp",
        "--instance",
        &inst,
        "--out",
        &sol,
    ]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&sol).unwrap();
    assert!(text.contains("makespan = 3"), "{text}");
    let out = pathip(&["verify", "--instance", &inst, "--solution", &sol]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "valid");
}

#[test]
fn tampered_solution_is_rejected() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "fig1.toml", FIG1);
    let sol = write(
        &dir,
        "bad.toml",
        "status = \"optimal\"\nmakespan = 2\npaths = [[0, 1, 2], [2, 1, 3]]\n",
    );
    let out = pathip(&["verify", "--instance", &inst, "--solution", &sol]);
    assert_eq!(code(&out), 3);
    assert!(
        stdout(&out).contains("both occupy vertex 1"),
        "{}",
        stdout(&out)
    );
}

#[test]
fn k_override_shortens_makespan() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "fig1.toml", FIG1);
    let out = pathip(&["solve", "--instance", &inst, "--k", "1"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("makespan = 2"));
}

#[test]
fn pruning_without_fallback_reports_feasible() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "fig1.toml", FIG1);
    let out = pathip(&[
        "solve",
        "--instance",
        &inst,
        "--heuristic",
        "tube=0",
        "--no-fallback",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("status = \"feasible\""));
}

#[test]
fn tiny_time_limit_times_out() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "fig1.toml", FIG1);
    let out = pathip(&["--time-limit", "1e-9", "solve", "--instance", &inst]);
    assert_eq!(code(&out), 4);
}

#[test]
fn unreachable_goal_is_infeasible() {
    let dir = TempDir::new().unwrap();
    let inst = write(
        &dir,
        "q.toml",
        "problem = \"qcop\"\nvertices = 3\nedges = [[0, 1], [1, 2]]\nstarts = [0]\ngoals = [2]\nrewards = [1.0, 1.0, 1.0]\nbudget = 0.5\n",
    );
    let out = pathip(&["solve", "--problem", "qcop", "--instance", &inst]);
    assert_eq!(code(&out), 3);
    let out = pathip(&["oracle", "--instance", &inst]);
    assert_eq!(code(&out), 3);
    assert_eq!(stdout(&out).trim(), "none");
    // a larger budget on the command line makes it solvable
    let out = pathip(&["solve", "--instance", &inst, "--budget", "2"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("reward = 3.0"), "{}", stdout(&out));
}

#[test]
fn oracle_agrees_on_figure_one() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "fig1.toml", FIG1);
    let out = pathip(&["oracle", "--problem", "mpp", "--instance", &inst]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "makespan 3");
}

#[test]
fn generator_is_deterministic() {
    let args = [
        "--seed",
        "9",
        "gen",
        "--problem",
        "mmcr",
        "--rows",
        "6",
        "--cols",
        "5",
        "--n",
        "2",
        "--obstacles",
        "4",
    ];
    let a = pathip(&args);
    let b = pathip(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("problem = \"mmcr\""));
}

#[test]
fn generated_instance_solves_and_verifies() {
    let dir = TempDir::new().unwrap();
    let inst = s(&dir.path().join("g.toml"));
    let sol = s(&dir.path().join("s.toml"));
    let out = pathip(&[
        "--seed",
        "4",
        "gen",
        "--problem",
        "mmcr",
        "--rows",
        "5",
        "--cols",
        "5",
        "--n",
        "2",
        "--obstacles",
        "3",
        "--out",
        &inst,
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        code(&pathip(&["solve", "--instance", &inst, "--out", &sol])),
        0
    );
    assert_eq!(
        code(&pathip(&[
            "verify",
            "--instance",
            &inst,
            "--solution",
            &sol
        ])),
        0
    );
}

#[test]
fn bench_writes_csv() {
    let dir = TempDir::new().unwrap();
    let suite = write(
        &dir,
        "suite.toml",
        "[[run]]\nid = \"small\"\ninstances = 2\nmethods = [\"exact\", \"tube=1\"]\noracle = true\n[run.generator]\nproblem = \"mpp\"\nrows = 3\ncols = 3\nremoval = 0.0\nn = 2\n",
    );
    let csv = s(&dir.path().join("out.csv"));
    let out = pathip(&["bench", "--suite", &suite, "--out", &csv]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "instance_id,method,variable_count,constraint_count,objective,nodes,wall_time,status,oracle"
    );
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("small-0,exact,"));
}

#[test]
fn lpsolve_reads_lp_text() {
    let dir = TempDir::new().unwrap();
    let lp = write(
        &dir,
        "k.lp",
        "Maximize\n obj: 3 a + 4 b + 5 c\nSubject To\n cap: 2 a + 3 b + 4 c <= 6\nBinary\n a b c\nEnd\n",
    );
    let out = pathip(&["lpsolve", &lp]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.starts_with("status optimal\nobjective 8\n"), "{text}");
    assert!(text.contains("a 1\nb 0\nc 1\n"));
}

#[test]
fn external_backend_round_trip() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "fig1.toml", FIG1);
    let backend = format!("external:{} lpsolve", env!("CARGO_BIN_EXE_pathip"));
    let out = pathip(&["--backend", &backend, "solve", "--instance", &inst]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("makespan = 3"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&pathip(&["frobnicate"])), 1);
    assert_eq!(
        code(&pathip(&["--backend", "gurobi", "lpsolve", "x.lp"])),
        1
    );
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "fig1.toml", FIG1);
    assert_eq!(
        code(&pathip(&["solve", "--problem", "otp", "--instance", &inst])),
        1
    );
    assert_eq!(
        code(&pathip(&["solve", "--instance", "/nonexistent.toml"])),
        1
    );
    assert_eq!(code(&pathip(&["--help"])), 0);
}
