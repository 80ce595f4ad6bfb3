use std::process::{Command, Output};

fn mlcoh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlcoh"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone())
        .unwrap()
        .trim_end()
        .to_string()
}

#[test]
fn check_prints_the_type() {
    let o = mlcoh(&["check", "--system", "qds", "(iota-all x {P(x)})"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "all x. P(x) |- P(x)");
}

#[test]
fn eq_reads_files_and_reports_equal() {
    let dir = std::env::temp_dir().join(format!("mlcoh-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let lhs = dir.join("lhs.trm");
    let rhs = dir.join("rhs.trm");
    std::fs::write(&lhs, "(comp (gamma-all x {P(y)}) (iota-all x {P(y)}))\n").unwrap();
    std::fs::write(&rhs, "(id {all x. P(y)})").unwrap();
    let o = mlcoh(&[
        "eq",
        "--system",
        "qds",
        lhs.to_str().unwrap(),
        rhs.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), r#"{"verdict":"equal"}"#);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn eq_reports_unequal_with_witness() {
    let o = mlcoh(&["eq", "--system", "qds", "(chat {P} {P})", "(id {P & P})"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "unequal");
    assert_eq!(v["witness"]["at"], "S0");
}

#[test]
fn exit_codes() {
    let type_error = mlcoh(&["check", "--system", "qds", "(comp (id {P}) (id {Q}))"]);
    assert_eq!(type_error.status.code(), Some(2));
    let proviso = mlcoh(&["check", "--system", "qds", "(gamma-all x {P(x)})"]);
    assert_eq!(proviso.status.code(), Some(2));
    let parse = mlcoh(&["check", "--system", "qds", "(id {P &)"]);
    assert_eq!(parse.status.code(), Some(3));
    let missing = mlcoh(&["check", "--system", "qds", "no-such-file.trm"]);
    assert_eq!(missing.status.code(), Some(3));
    let system = mlcoh(&["check", "--system", "qds", "(mix {P} {Q})"]);
    assert_eq!(system.status.code(), Some(2));
    let impure = "(gren u y (allL x {all y. R(x,y)} u (allL y {R(u,y)} z (gid {R(u,z)}))))";
    let o = mlcoh(&["cutelim", "--system", "qds", impure]);
    assert_eq!(
        o.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let no_system = mlcoh(&["check", "(id {P})"]);
    assert_eq!(no_system.status.code(), Some(4));
}

#[test]
fn graph_and_dot() {
    let o = mlcoh(&["graph", "--system", "qds", "--loops", "(chat {P} {Q})"]);
    assert_eq!(stdout(&o), "2 2 | S0-T1 S1-T0 loops=0");
    let o = mlcoh(&["dot", "--system", "qds", "(chat {P} {Q})"]);
    assert!(stdout(&o).starts_with("digraph"));
}

#[test]
fn normalizers_print_terms() {
    let o = mlcoh(&[
        "cutelim",
        "--system",
        "qds",
        "(comp (iota-all x {all x. P(x)}) (gamma-all x {all x. P(x)}))",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("(cut"));
    let o = mlcoh(&[
        "develop",
        "--system",
        "qds",
        "(and (chat {P} {Q}) (iota-all x {S(x)}))",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("(comp"));
    let o = mlcoh(&["develop", "--system", "qpn", "(id {P})"]);
    assert_eq!(o.status.code(), Some(4));
    let o = mlcoh(&["nnf", "--system", "qpn-neg", "(id {~(P & ~Q)})"]);
    assert_eq!(stdout(&o), "(id {~P | Q})");
    let o = mlcoh(&["negate", "--system", "qpn-neg", "(id {P})"]);
    assert_eq!(o.status.code(), Some(0));
    let check = mlcoh(&["check", "--system", "qpn-neg", &stdout(&o)]);
    assert_eq!(stdout(&check), "~P |- ~P");
}

#[test]
fn selftest_is_deterministic() {
    let args = [
        "selftest", "--system", "qmpn-neg", "--count", "3", "--seed", "7",
    ];
    let a = mlcoh(&args);
    let b = mlcoh(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let last = stdout(&a).lines().last().unwrap().to_string();
    let v: serde_json::Value = serde_json::from_str(&last).unwrap();
    assert_eq!(v["failing"], 0);
}

#[test]
fn out_writes_a_file() {
    let path = std::env::temp_dir().join(format!("mlcoh-out-{}.txt", std::process::id()));
    let o = mlcoh(&[
        "check",
        "--system",
        "qds",
        "--out",
        path.to_str().unwrap(),
        "(id {P})",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "P |- P\n");
    std::fs::remove_file(path).unwrap();
}
