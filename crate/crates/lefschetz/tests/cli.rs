//! End-to-end tests of the command-line interface: exit codes, output
//! round-trips, and determinism across runs.

use std::path::Path;
use std::process::Output;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_lefschetz")
}

fn run(args: &[&str]) -> Output {
    std::process::Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path.display().to_string()
}

const DICT_N3: &str = "\
surface N 3
curve c1 lift 1 0 0 0
curve c2 lift 0 1 0 0
curve s null waist
";

const WORD_4: &str = "\
base S2
letter c1 + +1
letter c2 - +1
letter c1 + +1
letter c2 - +1
";

#[test]
fn validate_accepts_well_formed_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let dict = write(dir.path(), "dict.txt", DICT_N3);
    let word = write(dir.path(), "w.txt", WORD_4);
    let out = run(&["validate", "--dict", &dict, "--word", &word]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("dict: ok (N3, 3 curves"));
    assert!(stdout(&out).contains("word w: ok (4 letters, base S2)"));
}

#[test]
fn validate_rejects_non_primitive_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let dict = write(
        dir.path(),
        "dict.txt",
        "surface N 3\ncurve c lift 2 0 0 0\n",
    );
    let out = run(&["validate", "--dict", &dict]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("line 2"));
    assert!(stderr(&out).contains("not primitive"));
}

#[test]
fn validate_rejects_meeting_disjoint_pair_with_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let dict = write(
        dir.path(),
        "dict.txt",
        "surface N 3\ncurve c1 lift 1 0 0 0\ncurve c2 lift 0 1 0 0\ndisjoint c1 c2\n",
    );
    let out = run(&["validate", "--dict", &dict]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("pairing"));
}

#[test]
fn validate_rejects_syntax_with_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let dict = write(dir.path(), "dict.txt", "surfaces N 3\n");
    let out = run(&["validate", "--dict", &dict]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_is_deterministic_and_validates() {
    let dir = tempfile::tempdir().unwrap();
    let d1 = run(&["gen", "--seed", "0", "--genus", "5", "--emit-dict"]);
    assert_eq!(d1.status.code(), Some(0));
    let d2 = run(&["gen", "--seed", "0", "--genus", "5", "--emit-dict"]);
    assert_eq!(stdout(&d1), stdout(&d2));
    let dict = write(dir.path(), "dict.txt", &stdout(&d1));

    let w1 = run(&["gen", "--seed", "9", "--genus", "5", "--length", "5"]);
    let w2 = run(&["gen", "--seed", "9", "--genus", "5", "--length", "5"]);
    assert_eq!(stdout(&w1), stdout(&w2));
    let word = write(dir.path(), "w.txt", &stdout(&w1));

    let out = run(&["validate", "--dict", &dict, "--word", &word]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
}

#[test]
fn lift_emits_reparseable_achiral_word() {
    let dir = tempfile::tempdir().unwrap();
    let dict = write(dir.path(), "dict.txt", DICT_N3);
    let word = write(dir.path(), "w.txt", WORD_4);
    let out = run(&["lift", "--dict", &dict, "--word", &word]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("surface O 2\n"));
    // 2n letter lines alternating +1 / -1.
    let letters: Vec<&str> = text.lines().filter(|l| l.starts_with("letter ")).collect();
    assert_eq!(letters.len(), 8);
    for (i, line) in letters.iter().enumerate() {
        let want = if i % 2 == 0 { "+1" } else { "-1" };
        assert!(line.ends_with(want), "line {i}: {line}");
    }
    // Byte-stable and accepted back by the tooling.
    let again = run(&["lift", "--dict", &dict, "--word", &word]);
    assert_eq!(text, stdout(&again));
    let lifted = write(dir.path(), "lifted.txt", &text);
    let out = run(&["validate", "--dict", &dict, "--word", &lifted]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
}

#[test]
fn lift_requires_genus_three_with_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let dict = write(dir.path(), "dict.txt", "surface N 2\ncurve c lift 1 0\n");
    let word = write(dir.path(), "w.txt", "base D2\nletter c + +1\n");
    let out = run(&["lift", "--dict", &dict, "--word", &word]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("genus >= 3"));
}

#[test]
fn invariants_block_has_stable_keys() {
    let dir = tempfile::tempdir().unwrap();
    let dict = write(dir.path(), "dict.txt", DICT_N3);
    let word = write(dir.path(), "w.txt", WORD_4);
    let out = run(&["invariants", "--dict", &dict, "--word", &word]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let keys: Vec<&str> = text.lines().map(|l| l.split('=').next().unwrap()).collect();
    assert_eq!(
        keys,
        vec![
            "fiber",
            "base",
            "letters_raw",
            "letters_reduced",
            "chi_total",
            "chi_cover",
            "cover_genus",
            "trace",
            "char_poly",
            "monodromy",
            "closure"
        ]
    );
    assert!(text.contains("chi_total=2\n"));
    assert!(text.contains("chi_cover=4\n"));
    assert!(text.contains("cover_genus=2\n"));
}

#[test]
fn normalize_makes_exponents_positive() {
    let dir = tempfile::tempdir().unwrap();
    let dict = write(dir.path(), "dict.txt", DICT_N3);
    let word = write(
        dir.path(),
        "w.txt",
        "base D2\nletter c1 + -1\nletter c2 - +1\n",
    );
    let out = run(&["normalize", "--dict", &dict, "--word", &word]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(
        text,
        "surface N 3\nbase D2\nletter c1 - +1\nletter c2 - +1\n"
    );
}

#[test]
fn apply_empty_script_echoes_word() {
    let dir = tempfile::tempdir().unwrap();
    let dict = write(dir.path(), "dict.txt", DICT_N3);
    let word = write(dir.path(), "w.txt", WORD_4);
    let script = write(dir.path(), "s.txt", "# nothing\n");
    let out = run(&[
        "apply", "--dict", &dict, "--word", &word, "--script", &script,
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), format!("surface N 3\n{WORD_4}"));
}

#[test]
fn apply_reports_failing_step() {
    let dir = tempfile::tempdir().unwrap();
    let dict = write(dir.path(), "dict.txt", DICT_N3);
    let word = write(dir.path(), "w.txt", WORD_4);
    let script = write(dir.path(), "s.txt", "flip 0\ndelete 99\n");
    let out = run(&[
        "apply", "--dict", &dict, "--word", &word, "--script", &script,
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("step 2"));
}

#[test]
fn search_emits_replayable_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let dict_out = run(&["gen", "--seed", "0", "--genus", "5", "--emit-dict"]);
    let dict = write(dir.path(), "dict.txt", &stdout(&dict_out));
    let w1_out = run(&["gen", "--seed", "4", "--genus", "5", "--length", "3"]);
    let w1 = write(dir.path(), "w1.txt", &stdout(&w1_out));
    let script = write(dir.path(), "s.txt", "insert 1 a1 + left\n");
    let w2_out = run(&["apply", "--dict", &dict, "--word", &w1, "--script", &script]);
    assert_eq!(w2_out.status.code(), Some(0));
    let w2 = write(dir.path(), "w2.txt", &stdout(&w2_out));

    let search = run(&["search", "--dict", &dict, "--word", &w1, "--word", &w2]);
    assert_eq!(search.status.code(), Some(0), "stderr: {}", stderr(&search));
    let cert_text = stdout(&search);
    assert!(cert_text.starts_with("start sha256:"));
    let cert = write(dir.path(), "cert.txt", &cert_text);

    let replayed = run(&["replay", "--dict", &dict, "--word", &w1, "--cert", &cert]);
    assert_eq!(
        replayed.status.code(),
        Some(0),
        "stderr: {}",
        stderr(&replayed)
    );
    assert_eq!(stdout(&replayed), stdout(&w2_out));

    // Determinism across runs.
    let search2 = run(&["search", "--dict", &dict, "--word", &w1, "--word", &w2]);
    assert_eq!(cert_text, stdout(&search2));
}

#[test]
fn search_reports_inconclusive_with_exit_5() {
    let dir = tempfile::tempdir().unwrap();
    let dict_out = run(&["gen", "--seed", "0", "--genus", "5", "--emit-dict"]);
    let dict = write(dir.path(), "dict.txt", &stdout(&dict_out));
    // Same letters in an order no single move reaches; with commute/flip
    // only and depth 2 the search must give up honestly.
    let w1 = write(
        dir.path(),
        "w1.txt",
        "base D2\nletter a1 + +1\nletter b1 + +1\nletter a1 + +1\nletter b1 + +1\n",
    );
    let w2 = write(
        dir.path(),
        "w2.txt",
        "base D2\nletter b1 + +1\nletter a1 + +1\nletter b1 + +1\nletter a1 + +1\n",
    );
    let out = run(&[
        "search",
        "--dict",
        &dict,
        "--word",
        &w1,
        "--word",
        &w2,
        "--moves",
        "commute,flip",
        "--depth",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(5), "stdout: {}", stdout(&out));
    assert!(stdout(&out).starts_with("inconclusive"));
}

#[test]
fn search_distinguishes_by_invariants() {
    let dir = tempfile::tempdir().unwrap();
    let dict = write(dir.path(), "dict.txt", DICT_N3);
    let w1 = write(
        dir.path(),
        "w1.txt",
        "base D2\nletter c1 + +1\nletter c2 + +1\n",
    );
    let w2 = write(dir.path(), "w2.txt", "base D2\nletter c1 + +1\n");
    let out = run(&["search", "--dict", &dict, "--word", &w1, "--word", &w2]);
    assert_eq!(out.status.code(), Some(0));
    assert!(
        stdout(&out).starts_with("distinguished "),
        "stdout: {}",
        stdout(&out)
    );
}

#[test]
fn null_curves_flow_through_lift_and_invariants() {
    let dir = tempfile::tempdir().unwrap();
    let dict = write(dir.path(), "dict.txt", DICT_N3);
    let word = write(
        dir.path(),
        "w.txt",
        "base S2\nletter s + +1\nletter s - +1\n",
    );
    let lifted = run(&["lift", "--dict", &dict, "--word", &word]);
    assert_eq!(lifted.status.code(), Some(0), "stderr: {}", stderr(&lifted));
    assert!(stdout(&lifted).contains("letter null waist"));
    let inv = run(&["invariants", "--dict", &dict, "--word", &word]);
    assert_eq!(inv.status.code(), Some(0));
    assert!(stdout(&inv).contains("closure=true"));
    // The two letters are mutually inverse, so the reduced count is zero.
    assert!(stdout(&inv).contains("letters_reduced=0"));
}
