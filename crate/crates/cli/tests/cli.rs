use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn treeshift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treeshift"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn with_fixtures(verb: &[&str], files: &[&str]) -> Output {
    let paths: Vec<String> = files
        .iter()
        .map(|f| fixture(f).display().to_string())
        .collect();
    let mut args: Vec<&str> = verb.to_vec();
    args.extend(paths.iter().map(String::as_str));
    treeshift(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn golden_equals_its_codeterminization() {
    let o = with_fixtures(&["equal"], &["golden.ura", "goldencod.ura"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "yes\n");
}

#[test]
fn golden_to_even_is_surjective() {
    let o = with_fixtures(&["surjective"], &["goldeneven.ca", "even.ura"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn xor_is_not_injective() {
    let o = with_fixtures(&["injective"], &["xor.ca"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    let pair: Vec<&str> = text
        .lines()
        .nth(1)
        .unwrap()
        .strip_prefix("witness states ")
        .unwrap()
        .split(' ')
        .collect();
    assert_eq!(pair.len(), 2);
    assert_ne!(pair[0], pair[1]);
}

#[test]
fn golden_and_even_differ() {
    let o = with_fixtures(&["equal"], &["golden.ura", "even.ura"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.starts_with("no\nwitness (1 (1)) only in "), "{text}");
    assert!(text.trim_end().ends_with("even.ura"));
}

#[test]
fn constructions_print_parseable_automata() {
    let o = with_fixtures(&["codeterminize"], &["golden.ura"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        std::fs::read_to_string(fixture("goldencod.ura")).unwrap()
    );
    let image = with_fixtures(&["image"], &["goldeneven.ca"]);
    let f = temp_file(&stdout(&image));
    let o = treeshift(&[
        "equal",
        f.path().to_str().unwrap(),
        fixture("even.ura").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let complement = with_fixtures(&["complement"], &["golden.ura"]);
    let f = temp_file(&stdout(&complement));
    let o = treeshift(&["accept", f.path().to_str().unwrap(), "-e", "(0 (1 (1)))"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn acceptance_and_blocks() {
    let golden = fixture("golden.ura");
    let g = golden.to_str().unwrap();
    let o = treeshift(&["accept", g, "-e", "(0 (1 (0)))"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "accepted\nrun 0 1 0 0\n");
    assert_eq!(
        treeshift(&["accept", g, "-e", "(1 (1))"]).status.code(),
        Some(1)
    );
    let o = treeshift(&["blocks", g, "-n", "3"]);
    assert_eq!(stdout(&o).lines().count(), 5);
    let p = temp_file("arity 1\nalphabet 0 1\n(1 (0))\n");
    assert_eq!(
        treeshift(&["accept", g, p.path().to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn emptiness_and_fullness_with_and_without_the_oracle() {
    for extra in [&[][..], &["--oracle"][..]] {
        let mut args = vec!["full"];
        args.extend_from_slice(extra);
        let o = with_fixtures(&args, &["golden.ura"]);
        assert_eq!(o.status.code(), Some(1));
        assert_eq!(stdout(&o), "no\nwitness (1 (1)) is not in the shift\n");
    }
    let empty = temp_file("arity 2\nalphabet a\nstates s\n");
    let e = empty.path().to_str().unwrap();
    assert_eq!(treeshift(&["empty", e]).status.code(), Some(0));
    assert_eq!(treeshift(&["empty", "--oracle", e]).status.code(), Some(0));
    assert_eq!(
        with_fixtures(&["empty"], &["golden.ura"]).status.code(),
        Some(1)
    );
}

#[test]
fn regular_configurations() {
    let g = fixture("golden.ura");
    let g = g.to_str().unwrap();
    let o = treeshift(&["regularize", g, "-e", "(1 (0))"]);
    assert_eq!(
        stdout(&o),
        "root 0\nstate 0 1 1\nstate 1 0 2\nstate 2 0 2\n"
    );
    let o = treeshift(&["unroll", g, "--state", "1", "--height", "3"]);
    assert_eq!(stdout(&o), "(1 (0 (0)))\n");
}

#[test]
fn gluing_blocks() {
    let g = fixture("golden.ura");
    let p = temp_file("arity 1\nalphabet 0 1\n(1 (0))\n");
    let q = temp_file("arity 1\nalphabet 0 1\n(1)\n");
    let o = treeshift(&[
        "glue",
        g.to_str().unwrap(),
        p.path().to_str().unwrap(),
        q.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("(1 (0"), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("anchor ")).count(), 1);
}

#[test]
fn graph_output() {
    let o = with_fixtures(&["graph"], &["golden.ura"]);
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph automaton {"));
    assert_eq!(dot.matches("shape=point").count(), 3);
    assert_eq!(dot.lines().filter(|l| l.contains("->")).count(), 6);
    // byte-for-byte stable
    assert_eq!(stdout(&with_fixtures(&["graph"], &["golden.ura"])), dot);
}

#[test]
fn parse_errors_name_the_file_and_line() {
    let bad = temp_file("arity 1\nalphabet 0 1\nstates a\nbundle a 2 a\n");
    let o = treeshift(&["essentialize", bad.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains(bad.path().to_str().unwrap()), "{err}");
    assert!(err.contains("line 4") && err.contains("`2`"), "{err}");
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(treeshift(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(treeshift(&["equal", "only-one"]).status.code(), Some(2));
    assert_eq!(
        treeshift(&["essentialize", "/nonexistent/file.ura"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        with_fixtures(&["graph"], &["xor.ca"]).status.code(),
        Some(2)
    );
}
