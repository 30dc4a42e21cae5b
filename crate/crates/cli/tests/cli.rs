use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use tempfile::TempDir;

fn uniseg(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_uniseg"))
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
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn ok(args: &[&str], stdin: &str) -> String {
    let out = uniseg(args, stdin);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = path(dir, name);
    std::fs::write(&p, text).unwrap();
    p
}

const TOY_CORPUS: &str = "the the the\nmother father\nfewer fewer\n";

#[test]
fn toy_corpus_first_merges() {
    let out = ok(&["train-bpe", "--merges", "2"], TOY_CORPUS);
    assert_eq!(out, "#uniseg-bpe v1 marker=_\nt h 5\nth e 5\n");
}

#[test]
fn segment_and_osr() {
    let dir = TempDir::new().unwrap();
    let merges = ok(&["train-bpe", "--merges", "5"], TOY_CORPUS);
    let m = write(&dir, "m.bpe", &merges);
    assert_eq!(ok(&["segment", "--merges", &m], "the\n"), "the_\n");
    assert_eq!(
        ok(&["segment", "--merges", &m], "the fewer, x\n"),
        "the_ f e w e r_ , _ x _\n"
    );

    let empty = write(&dir, "empty.bpe", "#uniseg-bpe v1 marker=_\n");
    let report = ok(&["osr", "--merges", &empty], "some words here\n");
    assert!(
        report.starts_with("rate: 1.000000\nwords_total: 3\n"),
        "{report}"
    );

    let json = ok(
        &["osr", "--merges", &m, "--report", "json", "--types"],
        "the the fewer\n",
    );
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["words_total"], 2);
    assert!(v.get("per_word_detail").is_none());
}

#[test]
fn pipes_match_files() {
    let dir = TempDir::new().unwrap();
    let raw = "Москва и Киев\nЁлка ёлка ёлка\nмама мыла раму\n";
    let src = write(&dir, "raw.txt", raw);
    let rom = path(&dir, "rom.txt");
    let bpe = path(&dir, "m.bpe");
    let seg = path(&dir, "seg.txt");
    ok(
        &[
            "romanize",
            "--table",
            "builtin:cyrillic",
            "--input",
            &src,
            "--out",
            &rom,
        ],
        "",
    );
    ok(
        &[
            "train-bpe",
            "--merges",
            "20",
            "--min-frequency",
            "1",
            "--input",
            &rom,
            "--out",
            &bpe,
        ],
        "",
    );
    ok(
        &["segment", "--merges", &bpe, "--input", &rom, "--out", &seg],
        "",
    );

    let piped_rom = ok(&["romanize", "--table", "builtin:cyrillic"], raw);
    assert_eq!(piped_rom, std::fs::read_to_string(&rom).unwrap());
    assert_eq!(piped_rom.lines().next(), Some("Moskva i Kiev"));
    let piped_bpe = ok(
        &["train-bpe", "--merges", "20", "--min-frequency", "1"],
        &piped_rom,
    );
    assert_eq!(piped_bpe, std::fs::read_to_string(&bpe).unwrap());
    let piped_seg = ok(&["segment", "--merges", &bpe], &piped_rom);
    assert_eq!(piped_seg, std::fs::read_to_string(&seg).unwrap());
}

#[test]
fn sample_and_concat() {
    let dir = TempDir::new().unwrap();
    let tsv: String = (0..10).map(|i| format!("s{i}\tt{i}\n")).collect();
    let a = write(&dir, "a.tsv", &tsv);
    assert_eq!(
        ok(&["sample", "--n", "2", "--input", &a], ""),
        "s0\tt0\ns1\tt1\n"
    );
    let r1 = ok(
        &["sample", "--n", "4", "--mode", "random", "--seed", "3"],
        &tsv,
    );
    let r2 = ok(
        &[
            "sample", "--n", "4", "--mode", "random", "--seed", "3", "--input", &a,
        ],
        "",
    );
    assert_eq!(r1, r2);
    assert_eq!(r1.lines().count(), 4);

    let clipped = uniseg(&["sample", "--n", "50", "--input", &a], "");
    assert!(clipped.status.success());
    assert_eq!(String::from_utf8(clipped.stdout).unwrap(), tsv);

    let b = write(&dir, "b.tsv", "x\ty\n");
    assert_eq!(
        ok(&["concat", "--input", &b, "--input", &b], ""),
        "x\ty\nx\ty\n"
    );

    let src = write(&dir, "src.txt", "a\nb\n");
    let tgt = write(&dir, "tgt.txt", "A\nB\n");
    assert_eq!(
        ok(
            &["sample", "--n", "5", "--input", &src, "--target", &tgt],
            ""
        ),
        "a\tA\nb\tB\n"
    );
}

#[test]
fn ablate_round_trip_and_sides() {
    let dir = TempDir::new().unwrap();
    let map = path(&dir, "map");
    let text = "Le chat, 42 fois.\n";
    let scrambled = ok(&["cjk-ablate", "--seed", "9", "--map-out", &map], text);
    assert!(!scrambled.chars().any(|c| c.is_ascii_alphabetic()));
    assert_eq!(
        ok(&["cjk-ablate", "--map", &map, "--invert"], &scrambled),
        text
    );

    let tsv = ok(&["cjk-ablate", "--sides", "target"], "keep\tswap\n");
    let (s, t) = tsv.trim_end().split_once('\t').unwrap();
    assert_eq!(s, "keep");
    assert!(t.chars().all(|c| ('\u{4E00}'..='\u{9FFF}').contains(&c)));
}

#[test]
fn share_and_hist() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.bpe", &ok(&["train-bpe", "--merges", "5"], TOY_CORPUS));
    let v = path(&dir, "v.tsv");
    ok(
        &[
            "train-bpe",
            "--merges",
            "5",
            "--vocab-out",
            &v,
            "--out",
            &path(&dir, "x.bpe"),
        ],
        TOY_CORPUS,
    );
    let same = ok(
        &["share", "--input", &v, "--input", &v, "--report", "json"],
        "",
    );
    let parsed: serde_json::Value = serde_json::from_str(&same).unwrap();
    assert_eq!(parsed["jaccard"], 1.0);
    let mixed = ok(&["share", "--input", &m, "--input", &v], "");
    assert!(mixed.contains("shared: "), "{mixed}");

    let hist = ok(&["hist", "--merges", &m], "the fewer\n");
    assert!(hist.starts_with("words: 2\n"), "{hist}");
    assert!(hist.contains("pieces_1: 1\n"), "{hist}");
}

#[test]
fn transfer_and_diff() {
    let dir = TempDir::new().unwrap();
    let parent = write(&dir, "p.emb", "2 2\na 0.5 -1.0\nb 2.0 3.0\n");
    let child = write(&dir, "child.txt", "b\nz\n");
    let out = path(&dir, "c.emb");
    ok(
        &[
            "transfer-embed",
            "--input",
            &parent,
            "--strategy",
            "union",
            "--child-vocab",
            &child,
            "--out",
            &out,
        ],
        "",
    );
    let table = std::fs::read_to_string(&out).unwrap();
    assert!(
        table.starts_with("3 2\na 0.5 -1.0\nb 2.0 3.0\nz "),
        "{table}"
    );
    let diff = ok(&["diff-embed", "--before", &parent, "--after", &out], "");
    assert!(
        diff.starts_with("preserved: 2\nreassigned: 0\nfresh: 1\ndropped: 0\n"),
        "{diff}"
    );

    let universal = ok(&["transfer-embed", "--input", &parent], "");
    assert_eq!(universal, std::fs::read_to_string(&parent).unwrap());

    let zero = ok(
        &[
            "transfer-embed",
            "--input",
            &parent,
            "--strategy",
            "frequency",
            "--child-vocab",
            &write(&dir, "k", "x\ny\nq\n"),
            "--init",
            "zero",
        ],
        "",
    );
    assert_eq!(zero, "3 2\nx 0.5 -1.0\ny 2.0 3.0\nq 0.0 0.0\n");
}

#[test]
fn error_exit_codes() {
    let out = uniseg(&["no-such-command"], "");
    assert_eq!(out.status.code(), Some(2));

    let out = uniseg(&["train-bpe", "--merges", "3"], "a_b\n");
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(
        err.starts_with("uniseg: bpe error [marker-collision]"),
        "{err}"
    );

    let out = uniseg(&["segment", "--merges", "/nonexistent/m.bpe"], "x\n");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[read]"));

    let out = uniseg(&["romanize", "--table", "builtin:klingon"], "x");
    assert_eq!(out.status.code(), Some(1));

    let out = uniseg(&["train-bpe", "--vocab-size", "2"], "abc\n");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[target-too-small]"));

    let out = uniseg(&["share", "--input", "a"], "");
    assert_eq!(out.status.code(), Some(2));

    let out = uniseg(
        &["transfer-embed", "--input", "-", "--strategy", "union"],
        "1 1\na 1.0\n",
    );
    assert_eq!(out.status.code(), Some(2));

    let mut child = Command::new(env!("CARGO_BIN_EXE_uniseg"))
        .args(["segment", "--merges", "-"])
        .stdin(Stdio::piped())
        .stderr(Stdio::piped())
        .stdout(Stdio::null())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"\xff\xfe").unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[encoding]"));
    assert!(Path::new(env!("CARGO_BIN_EXE_uniseg")).exists());
}
