//! End-to-end runs of the `permclass` binary.

use std::io::Write;
use std::process::{Command, Output, Stdio};

use permclass::automata::data;
use permclass::classes::{basis_a_prime, for_each_level};
use permclass::glue::{membership, Domain};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_permclass"))
        .args(args)
        .output()
        .unwrap()
}

fn run_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_permclass"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn counts_the_larger_class() {
    let o = run(&[
        "count",
        "--basis",
        "52341,53241,52431,35142,42513,351624",
        "--max-n",
        "9",
        "--format",
        "text",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1,1,2,6,24,115,607,3370,19235,111571");
    let o = run(&["count", "--basis", "231", "--max-n", "5"]);
    assert_eq!(
        stdout(&o).trim(),
        r#"{"basis":["231"],"counts":[1,1,2,5,14,42]}"#
    );
}

#[test]
fn encodes_and_decodes_single_words() {
    let o = run(&["encode", "--class", "aprime", "2413"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), r#""d d d dl""#);
    let o = run(&[
        "decode",
        "--class",
        "aprime",
        "--format",
        "text",
        r#"["d","d","d","dl"]"#,
    ]);
    assert_eq!(stdout(&o).trim(), "2413");
    let o = run(&[
        "decode",
        "--class",
        "a",
        "--format",
        "text",
        "d d b c a d b a c d c a d b a b d b a b d dl",
    ]);
    assert_eq!(stdout(&o).trim().split(' ').count(), 22);
}

#[test]
fn batch_decode_inverts_encode() {
    let mut members = Vec::new();
    for_each_level(&basis_a_prime(), 8, |_, level| {
        members.extend(
            level
                .iter()
                .filter(|p| membership(p, Domain::HPrime))
                .map(|p| p.to_string()),
        );
    });
    let input = members.join("\n") + "\n";
    let words = run_with_stdin(&["encode", "--format", "text"], &input);
    assert!(words.status.success());
    let back = run_with_stdin(&["decode", "--format", "text"], &stdout(&words));
    assert!(back.status.success());
    assert_eq!(stdout(&back), input);
}

#[test]
fn batch_mode_reports_bad_lines_and_fails() {
    let o = run_with_stdin(&["encode", "--format", "text"], "2413\n3142\n");
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "d d d dl\nerror: 3142 is not in H'\n");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["count", "--max-n", "3"]).status.code(), Some(2));
    assert_eq!(run(&["encode", "3142"]).status.code(), Some(1));
    assert_eq!(run(&["decode", "d x dl"]).status.code(), Some(1));
    assert_eq!(run(&["gf", "--name", "nope"]).status.code(), Some(1));
    assert_eq!(
        run(&["glue", "2413", "NW9-9", "3142"]).status.code(),
        Some(1)
    );
}

#[test]
fn other_verbs() {
    let text = |args: &[&str]| {
        let mut v = args.to_vec();
        v.extend(["--format", "text"]);
        let o = run(&v);
        assert!(o.status.success(), "{args:?}");
        stdout(&o).trim().to_string()
    };
    assert_eq!(text(&["contains", "--patterns", "231,321", "2413"]), "231");
    assert!(text(&["simple", "25314"]).starts_with("simple"));
    assert_eq!(
        text(&["simple", "2143"]),
        "not simple skeleton 12 parts 21 21"
    );
    assert_eq!(text(&["glue", "2413", "NW1-0", "3142"]), "24153");
    assert_eq!(text(&["decompose", "24153"]), "2413 NW1-0 3142");
    assert_eq!(
        text(&["automaton", "run", "--name", "m", "d dl"]),
        "accepted"
    );
    assert_eq!(
        text(&["automaton", "run", "--initial", "A''", "dl"]),
        "rejected"
    );
    assert_eq!(
        text(&[
            "automaton",
            "series",
            "--name",
            "example",
            "--from",
            "A",
            "--to",
            "C",
            "--order",
            "4"
        ]),
        "0,1,2,4,8"
    );
    assert_eq!(
        text(&["decode", "--check", "L_prime", "d d c d dl"]),
        "rejected: condition 9 (no aa, bb, cc, da or cdd_l)"
    );
    assert!(text(&["automaton", "dump", "--name", "m"]).contains("D ; dl ; Dl"));
}

#[test]
fn series_output_is_deterministic() {
    let args = [
        "gf", "--name", "f_Aprime", "--order", "12", "--route", "closed",
    ];
    let a = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, run(&args).stdout);
    let o = run(&["gf", "--name", "f_A", "--order", "8", "--format", "text"]);
    assert_eq!(stdout(&o).trim(), "1,1,2,6,23,101,477,2343,11762");
}

#[test]
fn verify_passes_on_shipped_tables() {
    let o = run(&[
        "verify",
        "--max-n",
        "8",
        "--samples",
        "100",
        "--seed",
        "7",
        "--format",
        "text",
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("all rows agree"));
}

#[test]
fn verify_fails_on_a_corrupted_table() {
    let dir = tempfile::tempdir().unwrap();
    for name in data::builtin_names() {
        let mut text = data::builtin(name).unwrap().to_string();
        if name == "m_prime.txt" {
            let line = text
                .lines()
                .find(|l| l.starts_with("A ; b ;"))
                .unwrap()
                .to_string();
            text = text.replace(&format!("{line}\n"), "");
        }
        std::fs::write(dir.path().join(name), text).unwrap();
    }
    let o = Command::new(env!("CARGO_BIN_EXE_permclass"))
        .args(["verify", "--max-n", "7", "--samples", "0"])
        .env(data::DATA_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert_eq!(
        o.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["all_ok"], false);
    assert_eq!(report["series"]["all_agree"], false);
}
