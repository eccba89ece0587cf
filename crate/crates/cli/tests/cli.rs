use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn muse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_muse")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("muse-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

#[test]
fn gen_is_deterministic_per_seed() {
    let a = muse(&["gen", "--topology", "tree", "--seed", "7"]);
    let b = muse(&["gen", "--topology", "tree", "--seed", "7"]);
    let c = muse(&["gen", "--topology", "tree", "--seed", "8"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert!(stdout(&a).starts_with("NODES "));
}

#[test]
fn ac_output_parses_and_is_stable() {
    let gen = muse(&["gen", "--topology", "lattice", "--seed", "3", "--p", "0.6"]);
    let input = scratch("lattice.muse", &stdout(&gen));
    let once = muse(&["ac", input.to_str().unwrap()]);
    assert!(once.status.success());
    let filtered = scratch("lattice_ac.muse", &stdout(&once));
    let twice = muse(&["ac", filtered.to_str().unwrap()]);
    assert_eq!(once.stdout, twice.stdout);
}

#[test]
fn ac_trace_goes_to_stderr() {
    let gen = muse(&["gen", "--seed", "1", "--p", "0.5"]);
    let input = scratch("traced.muse", &stdout(&gen));
    let out = muse(&["ac", "--trace", input.to_str().unwrap()]);
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(err.lines().any(|l| l.starts_with("POP ")), "{err}");
    assert!(stdout(&out).starts_with("NODES "));
}

#[test]
fn solve_prints_assignments_and_fails_on_wipe_out() {
    let ok = scratch("two.csp", "NODES 2\nLABELS 2 a b\nR2 0 a 1 a: 0\nR2 0 b 1 b: 0\n");
    let out = muse(&["solve", ok.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut lines: Vec<String> = stdout(&out).lines().map(String::from).collect();
    lines.sort();
    assert_eq!(lines, vec!["0=a 1=b", "0=b 1=a"]);

    let none = scratch("none.csp", "NODES 2\nLABELS 1 a\nR2 0 a 1 a: 0\n");
    let out = muse(&["solve", none.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn parse_sentence_prints_the_dependency_parse() {
    let out = muse(&["parse", "-g", "g1", "--sentence", "the:det dog:noun eats:verb"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        stdout(&out),
        "pos=(1,2) the det governor=det-(2,3)\n\
         pos=(2,3) dog noun governor=subj-(3,4)\n\
         pos=(3,4) eats verb governor=root-nil\n"
    );
}

#[test]
fn parse_lattice_lists_copy_strings() {
    let out = muse(&["parse", "-g", "ww", "--lattice", "4", "--strings"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().map(str::trim).collect();
    assert_eq!(lines.len(), 9);
    assert!(lines.contains(&"a b a b"));
}

#[test]
fn parse_without_a_parse_exits_one() {
    let out = muse(&["parse", "-g", "abc", "--lattice", "4"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_input_exits_two() {
    let out = muse(&["ac", "/nonexistent/file.muse"]);
    assert_eq!(out.status.code(), Some(2));
    let bad = scratch("bad.muse", "NODES 2\nBOGUS 1\n");
    let out = muse(&["ac", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("2:"), "{err}");
    let out = muse(&["parse", "-g", "nosuchgrammar", "--lattice", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn combine_merges_segments_on_shared_names() {
    let a = scratch("s1.csp", "NODES 2\nLABELS 2 a b\nNAME 0 x\nNAME 1 y\n");
    let b = scratch("s2.csp", "NODES 2\nLABELS 2 a b\nNAME 0 y\nNAME 1 z\n");
    let out = muse(&["combine", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("NODES 3\n"), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("EDGE")).count(), 2);
}

#[test]
fn profile_csv_has_seed_header_and_one_row_per_probability() {
    let out = muse(&["profile", "--instances", "1", "--seed", "5", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().contains("seed=5"));
    let rest: Vec<&str> = lines.collect();
    assert!(rest.len() > 10, "{text}");
}

#[test]
fn oracle_check_reports_full_agreement_on_path_consistency() {
    let out = muse(&["oracle-check", "--instances", "30", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("pc1_vs_path_fixpoint,30,30"), "{text}");
    assert!(text.contains("ac1_vs_pair_fixpoint,30,30"), "{text}");
}
