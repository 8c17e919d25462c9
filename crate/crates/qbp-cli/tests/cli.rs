//! End-to-end tests of the `qbp` binary: document pipelines, printed
//! output and the 0/1/2 exit-code contract.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn qbp<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_qbp"))
        .args(args)
        .output()
        .expect("binary must launch")
}

fn out(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn err(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("no exit code")
}

/// Generate a document into `dir` and return its path.
fn gen(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.path().join(name);
    let mut full: Vec<&std::ffi::OsStr> = vec!["gen".as_ref()];
    full.extend(args.iter().map(|a| -> &std::ffi::OsStr { a.as_ref() }));
    full.push("-o".as_ref());
    full.push(path.as_os_str());
    let o = qbp(full);
    assert_eq!(code(&o), 0, "gen {args:?} failed: {}", err(&o));
    path
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_validate_run_pipeline() {
    let dir = TempDir::new().unwrap();
    let maj3 = gen(&dir, "maj3.json", &["maj3"]);

    let v = qbp(["validate", path_str(&maj3)]);
    assert_eq!(code(&v), 0);
    assert_eq!(out(&v).trim(), "ok");

    let r = qbp(["run", path_str(&maj3), "--input", "110"]);
    assert_eq!(code(&r), 0);
    assert_eq!(out(&r).trim(), "1.000000000000");

    let r = qbp(["run", path_str(&maj3), "--input", "100"]);
    assert_eq!(out(&r).trim(), "0.000000000000");
}

#[test]
fn parity_run_and_table_rows() {
    let dir = TempDir::new().unwrap();
    let p4 = gen(&dir, "p4.json", &["parity", "--n", "4"]);

    let r = qbp(["run", path_str(&p4), "--input", "0110"]);
    assert_eq!(out(&r).trim(), "0.000000000000");

    let t = qbp(["table", path_str(&p4)]);
    assert_eq!(code(&t), 0);
    let text = out(&t);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 16);
    assert!(rows.contains(&"1000 1.000000000000"));
    assert!(rows.contains(&"1111 0.000000000000"));
}

#[test]
fn table_json_feeds_degree() {
    let dir = TempDir::new().unwrap();
    let p4 = gen(&dir, "p4.json", &["parity", "--n", "4"]);

    let t = qbp(["table", path_str(&p4), "--json"]);
    assert_eq!(code(&t), 0);
    let table_path = dir.path().join("p4.table.json");
    std::fs::write(&table_path, out(&t)).unwrap();

    let d = qbp(["degree", "--table", path_str(&table_path)]);
    assert_eq!(code(&d), 0);
    assert_eq!(out(&d).trim(), "degree=4 length_lower_bound=2");
}

#[test]
fn degree_of_program_document() {
    let dir = TempDir::new().unwrap();
    let maj3 = gen(&dir, "maj3.json", &["maj3"]);
    let d = qbp(["degree", path_str(&maj3)]);
    assert_eq!(code(&d), 0);
    assert_eq!(out(&d).trim(), "degree=3 length_lower_bound=2");
}

#[test]
fn degree_source_flags_are_exclusive() {
    let dir = TempDir::new().unwrap();
    let maj3 = gen(&dir, "maj3.json", &["maj3"]);
    let both = qbp(["degree", path_str(&maj3), "--table", path_str(&maj3)]);
    assert_eq!(code(&both), 2);
    let neither = qbp(["degree"]);
    assert_eq!(code(&neither), 2);
}

#[test]
fn run_rejects_wrong_input_length() {
    let dir = TempDir::new().unwrap();
    let maj3 = gen(&dir, "maj3.json", &["maj3"]);
    let r = qbp(["run", path_str(&maj3), "--input", "11"]);
    assert_eq!(code(&r), 2);
    assert!(err(&r).contains("3"), "message should name the expected length");
}

#[test]
fn malformed_json_exits_2_with_position() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"kind\": \"gqbp\", ").unwrap();
    let v = qbp(["validate", path_str(&bad)]);
    assert_eq!(code(&v), 2);
    assert!(err(&v).contains("line"), "expected parser position, got: {}", err(&v));
}

#[test]
fn validate_prints_violations_and_exits_1() {
    let dir = TempDir::new().unwrap();
    let maj3 = gen(&dir, "maj3.json", &["maj3"]);
    let text = std::fs::read_to_string(&maj3).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc["transitions"][0]["amp"] = serde_json::json!([0.5, 0.0]);
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, serde_json::to_string(&doc).unwrap()).unwrap();

    let v = qbp(["validate", path_str(&broken)]);
    assert_eq!(code(&v), 1);
    assert!(out(&v).contains("well-behaved"), "got: {}", out(&v));
}

#[test]
fn validate_reports_unknown_node_names() {
    let dir = TempDir::new().unwrap();
    let maj3 = gen(&dir, "maj3.json", &["maj3"]);
    let text = std::fs::read_to_string(&maj3).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc["transitions"][0]["from"] = serde_json::json!("ghost");
    let broken = dir.path().join("ghost.json");
    std::fs::write(&broken, serde_json::to_string(&doc).unwrap()).unwrap();

    let v = qbp(["validate", path_str(&broken)]);
    assert_eq!(code(&v), 1);
    assert!(out(&v).contains("ghost"), "got: {}", out(&v));
}

#[test]
fn transpile_chain_preserves_semantics() {
    let dir = TempDir::new().unwrap();
    let maj3 = gen(&dir, "maj3.json", &["maj3"]);
    let nqbp = dir.path().join("maj3.nqbp.json");
    let t = qbp(["transpile", path_str(&maj3), "--to", "nqbp", "-o", path_str(&nqbp)]);
    assert_eq!(code(&t), 0);
    assert!(out(&t).contains("claim:"), "certificate expected on stdout, got: {}", out(&t));

    let r = qbp(["run", path_str(&nqbp), "--input", "110"]);
    let lines: Vec<String> = out(&r).lines().map(str::to_owned).collect();
    assert_eq!(lines[0], "1.000000000000");
    assert!(lines[1].contains("p_residual=0.000000000000"), "got: {lines:?}");

    let back = dir.path().join("maj3.back.json");
    let t = qbp(["transpile", path_str(&nqbp), "--to", "gqbp", "-o", path_str(&back)]);
    assert_eq!(code(&t), 0);

    let e = qbp(["equiv", path_str(&maj3), path_str(&back)]);
    assert_eq!(code(&e), 0);
    assert!(out(&e).contains("equivalent"));
}

#[test]
fn transpile_to_oracle_circuit_runs_identically() {
    let dir = TempDir::new().unwrap();
    let p4 = gen(&dir, "p4.json", &["parity", "--n", "4"]);
    let circ = dir.path().join("p4.circuit.json");
    let t = qbp(["transpile", path_str(&p4), "--to", "circuit-oracle", "-o", path_str(&circ)]);
    assert_eq!(code(&t), 0);
    assert!(out(&t).contains("qubits=5 queries=4"), "got: {}", out(&t));

    let v = qbp(["validate", path_str(&circ)]);
    assert_eq!(code(&v), 0);

    let e = qbp(["equiv", path_str(&p4), path_str(&circ)]);
    assert_eq!(code(&e), 0);
}

#[test]
fn transpile_without_output_prints_document_and_certificate_apart() {
    let dir = TempDir::new().unwrap();
    let maj3 = gen(&dir, "maj3.json", &["maj3"]);
    let t = qbp(["transpile", path_str(&maj3), "--to", "circuit-oracle"]);
    assert_eq!(code(&t), 0);
    let doc: serde_json::Value = serde_json::from_str(&out(&t)).expect("stdout must be the document");
    assert_eq!(doc["kind"], "circuit");
    assert!(err(&t).contains("claim:"), "certificate expected on stderr");
}

#[test]
fn transpile_unsupported_direction_explains_and_exits_2() {
    let dir = TempDir::new().unwrap();
    let maj3 = gen(&dir, "maj3.json", &["maj3"]);
    let t = qbp(["transpile", path_str(&maj3), "--to", "circuit-qram"]);
    assert_eq!(code(&t), 2);
    assert!(err(&t).contains("aqbp"), "explanation expected, got: {}", err(&t));
}

#[test]
fn remove_dummies_is_gqbp_only() {
    let dir = TempDir::new().unwrap();
    let maj3 = gen(&dir, "maj3.json", &["maj3"]);
    let t = qbp(["transpile", path_str(&maj3), "--to", "nqbp", "--remove-dummies"]);
    assert_eq!(code(&t), 2);
    assert!(err(&t).contains("--to gqbp"));
}

#[test]
fn equiv_reports_witness_on_mismatch() {
    let dir = TempDir::new().unwrap();
    let p4 = gen(&dir, "p4.json", &["parity", "--n", "4"]);
    let dj4 = gen(&dir, "dj4.json", &["dj", "--n", "4"]);
    let e = qbp(["equiv", path_str(&p4), path_str(&dj4)]);
    assert_eq!(code(&e), 1);
    assert!(out(&e).contains("NOT equivalent"));
    assert!(out(&e).contains("witness="), "got: {}", out(&e));
}

#[test]
fn equiv_rejects_mismatched_input_sizes() {
    let dir = TempDir::new().unwrap();
    let maj3 = gen(&dir, "maj3.json", &["maj3"]);
    let p4 = gen(&dir, "p4.json", &["parity", "--n", "4"]);
    let e = qbp(["equiv", path_str(&maj3), path_str(&p4)]);
    assert_eq!(code(&e), 2);
}

#[test]
fn generators_are_seed_reproducible() {
    let dir = TempDir::new().unwrap();
    let a = gen(&dir, "a.json", &["random-aqbp", "--d", "3", "--l", "2", "--n", "3", "--seed", "5"]);
    let b = gen(&dir, "b.json", &["random-aqbp", "--d", "3", "--l", "2", "--n", "3", "--seed", "5"]);
    let c = gen(&dir, "c.json", &["random-aqbp", "--d", "3", "--l", "2", "--n", "3", "--seed", "6"]);
    let (a, b, c) = (
        std::fs::read(&a).unwrap(),
        std::fs::read(&b).unwrap(),
        std::fs::read(&c).unwrap(),
    );
    assert_eq!(a, b, "equal seeds must give identical documents");
    assert_ne!(a, c, "different seeds should differ");
}

#[test]
fn gen_rejects_bad_parameters() {
    let o = qbp(["gen", "parity", "--n", "3"]);
    assert_eq!(code(&o), 2, "odd parity size must fail");
    let o = qbp(["gen", "random-gqbp", "--w", "0", "--l", "1", "--n", "1"]);
    assert_eq!(code(&o), 2);
    let o = qbp(["gen", "dj", "--n", "3"]);
    assert_eq!(code(&o), 2, "non-power-of-two size must fail");
}

#[test]
fn random_gqbp_document_validates_and_caps_enforced() {
    let dir = TempDir::new().unwrap();
    let g = gen(
        &dir,
        "g.json",
        &["random-gqbp", "--w", "4", "--l", "3", "--n", "4", "--seed", "7"],
    );
    let v = qbp(["validate", path_str(&g)]);
    assert_eq!(code(&v), 0);

    let p30 = gen(&dir, "p30.json", &["parity", "--n", "30"]);
    let t = qbp(["table", path_str(&p30)]);
    assert_eq!(code(&t), 2, "enumeration cap must stop 2^30 tables");
    assert!(err(&t).contains("QBP_MAX_N"));
}

#[test]
fn usage_errors_exit_2() {
    let o = qbp(["transpile", "x.json", "--to", "bogus"]);
    assert_eq!(code(&o), 2);
    let o = qbp(["no-such-command"]);
    assert_eq!(code(&o), 2);
}
