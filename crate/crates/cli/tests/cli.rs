use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const FORMULA: &str = "p cnf 4 3\n1 3 0\n-1 2 4 0\n1 -2 4 0\n";
const CONTRADICTION: &str = "p cnf 1 2\n1 0\n-1 0\n";

fn klncc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_klncc"))
        .args(args)
        .env_remove("KLNCC_BUDGET")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn reduce_then_detect_then_verify_then_decode() {
    let dir = TempDir::new().unwrap();
    let cnf = write(&dir, "f.cnf", FORMULA);
    let graph = dir.path().join("g.graph");
    let witness = dir.path().join("w.txt");

    let o = klncc(&["reduce", "--kind", "3o3sat", "--cnf", s(&cnf), "--out", s(&graph)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "kind=3o3sat-simple vertices=18 edges=29 k=3\n");
    assert!(dir.path().join("g.graph.provenance.json").exists());

    let o = klncc(&["detect", "--graph", s(&graph), "--k", "3", "--witness-out", s(&witness)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("found cost="));
    let text = fs::read_to_string(&witness).unwrap();
    assert!(text.lines().last().unwrap().starts_with("# cost=-"));

    let o = klncc(&["verify", "--graph", s(&graph), "--witness", s(&witness), "--k", "3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("valid cost=-"));

    let o = klncc(&["decode", "--graph", s(&graph), "--witness", s(&witness)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).ends_with("satisfies\n"));
}

#[test]
fn multigraph_trail_through_the_fixed_point() {
    let dir = TempDir::new().unwrap();
    let cnf = write(&dir, "f.cnf", FORMULA);
    let graph = dir.path().join("g.graph");
    let o = klncc(&["reduce", "--kind", "3sat-multi", "--cnf", s(&cnf), "--out", s(&graph)]);
    assert_eq!(code(&o), 0);
    let report = stdout(&o);
    assert!(report.starts_with("kind=3sat-multi vertices=14 edges=27"));
    let p = report.trim_end().rsplit("fixed-point=").next().unwrap().to_string();

    let witness = dir.path().join("w.txt");
    let o = klncc(&["detect", "--graph", s(&graph), "--k", "3", "--fixed-point", &p, "--witness-out", s(&witness)]);
    assert_eq!(code(&o), 0);
    let o = klncc(&["verify", "--graph", s(&graph), "--witness", s(&witness), "--k", "3", "--fixed-point", &p]);
    assert_eq!(code(&o), 0);
    let o = klncc(&["decode", "--graph", s(&graph), "--witness", s(&witness)]);
    assert_eq!(code(&o), 0);
}

#[test]
fn unsatisfiable_formula_gives_no_cycle() {
    let dir = TempDir::new().unwrap();
    let cnf = write(&dir, "f.cnf", CONTRADICTION);
    let graph = dir.path().join("g.graph");
    assert_eq!(code(&klncc(&["solve-sat", "--cnf", s(&cnf)])), 1);
    assert_eq!(code(&klncc(&["reduce", "--kind", "3o3sat", "--cnf", s(&cnf), "--out", s(&graph)])), 0);
    let o = klncc(&["detect", "--graph", s(&graph), "--k", "3"]);
    assert_eq!(code(&o), 1);
    assert_eq!(stdout(&o), "none\n");
}

#[test]
fn nonnegative_graph_has_no_cycle() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.graph", "mode simple\nv a\nv b\nv c\ne a b 1\ne b c 0\ne c a 2\n");
    assert_eq!(code(&klncc(&["detect", "--graph", s(&g), "--k", "3"])), 1);
}

#[test]
fn verify_rejects_a_nonnegative_cycle_with_a_reason() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.graph", "mode simple\nv a\nv b\nv c\ne a b 1\ne b c 0\ne c a -1\n");
    let w = write(&dir, "w.txt", "0\n1\n2\n");
    let o = klncc(&["verify", "--graph", s(&g), "--witness", s(&w), "--k", "3"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("cost not negative"), "{}", stdout(&o));
}

#[test]
fn budget_exhaustion_exits_2() {
    let dir = TempDir::new().unwrap();
    let cnf = write(&dir, "f.cnf", FORMULA);
    let graph = dir.path().join("g.graph");
    assert_eq!(code(&klncc(&["reduce", "--kind", "3o3sat", "--cnf", s(&cnf), "--out", s(&graph)])), 0);
    let o = klncc(&["detect", "--graph", s(&graph), "--k", "3", "--budget", "1"]);
    assert_eq!(code(&o), 2);

    let o = Command::new(env!("CARGO_BIN_EXE_klncc"))
        .args(["detect", "--graph", s(&graph), "--k", "3"])
        .env("KLNCC_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn malformed_and_missing_inputs() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.graph", "mode simple\ne a b 1\n");
    assert_eq!(code(&klncc(&["detect", "--graph", s(&bad), "--k", "3"])), 65);
    let bad_cnf = write(&dir, "bad.cnf", "p cnf 1 1\n1 2 0\n");
    assert_eq!(code(&klncc(&["solve-sat", "--cnf", s(&bad_cnf)])), 65);
    let missing = dir.path().join("nope.graph");
    assert_eq!(code(&klncc(&["export-dot", "--graph", s(&missing)])), 66);
    assert_eq!(code(&klncc(&["detect", "--graph", s(&bad), "--k", "1"])), 64);
    assert_eq!(code(&klncc(&["frobnicate"])), 64);

    // a variable occurring four times is rejected by the 3-occurrence reduction
    let four = write(&dir, "four.cnf", "p cnf 1 4\n1 0\n1 0\n1 0\n1 0\n");
    let out = dir.path().join("g.graph");
    assert_eq!(code(&klncc(&["reduce", "--kind", "3o3sat", "--cnf", s(&four), "--out", s(&out)])), 65);
    let cnf = write(&dir, "f.cnf", FORMULA);
    let args = ["reduce", "--kind", "3o3sat-undirected", "--cnf", s(&cnf), "--out", s(&out), "--k", "3"];
    assert_eq!(code(&klncc(&args)), 64);
}

#[test]
fn gen_and_roundtrip_are_reproducible() {
    let a = klncc(&["gen", "--vars", "6", "--clauses", "7", "--seed", "11"]);
    let b = klncc(&["gen", "--vars", "6", "--clauses", "7", "--seed", "11"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("p cnf 6 7"));

    let dir = TempDir::new().unwrap();
    let report = dir.path().join("r.json");
    let args = ["roundtrip", "--trials", "12", "--k", "3", "--kind", "3o3sat", "--seed", "5"];
    let first = klncc(&[&args[..], &["--report-out", s(&report)]].concat());
    let second = klncc(&args);
    assert_eq!(code(&first), 0, "{}", stdout(&first));
    assert_eq!(first.stdout, second.stdout);
    assert!(stdout(&first).contains("summary trials=12 agreements=12 disagreements=0"));
    assert!(fs::read_to_string(&report).unwrap().contains("\"trials\": 12"));
}

#[test]
fn mutated_roundtrip_reports_disagreements() {
    let o = klncc(&["roundtrip", "--trials", "10", "--k", "3", "--kind", "3o3sat", "--mutation", "flip-closing-edge"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("disagreement trial="));
}

#[test]
fn detect_output_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let cnf = write(&dir, "f.cnf", FORMULA);
    let graph = dir.path().join("g.graph");
    klncc(&["reduce", "--kind", "3o3sat-undirected", "--cnf", s(&cnf), "--out", s(&graph), "--k", "4"]);
    let a = klncc(&["detect", "--graph", s(&graph), "--k", "4"]);
    let b = klncc(&["detect", "--graph", s(&graph), "--k", "4"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("start "));
}

#[test]
fn export_dot_renders_the_graph() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.graph", "mode undirected\nv a\nv b\ne a b -1/2\n");
    let o = klncc(&["export-dot", "--graph", s(&g)]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "graph G {\n  \"a\" [label=\"a\"];\n  \"b\" [label=\"b\"];\n  \"a\" -- \"b\" [label=\"-1/2\"];\n}\n");
}
