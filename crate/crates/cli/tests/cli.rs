use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ucca-convert"))
        .args(args)
        .env_remove("UCCA_CONVERT_LEXICONS")
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// A two-sentence document: the running example and the second example.
fn corpus(dir: &Path) -> PathBuf {
    let text = fs::read_to_string(data("running_example.conllulex")).unwrap()
        + "\n"
        + &fs::read_to_string(data("fig2.conllulex")).unwrap();
    let path = dir.join("dev.conllulex");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn convert_then_self_evaluate() {
    let dir = TempDir::new().unwrap();
    let input = corpus(dir.path());
    let out = dir.path().join("dev.xml");
    let o = run(&["convert", "--in", s(&input), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let xml = fs::read_to_string(&out).unwrap();
    assert_eq!(xml.matches("<root").count(), 2);

    let o = run(&["evaluate", "--gold", s(&out), "--pred", s(&out)]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("primary F1 100.0"));
    let tsv = String::from_utf8(o.stdout).unwrap();
    assert!(tsv.starts_with("stratum\t"));
    assert_eq!(tsv.lines().count(), 5);
}

#[test]
fn output_independent_of_jobs() {
    let dir = TempDir::new().unwrap();
    let input = corpus(dir.path());
    let mut outputs = Vec::new();
    for jobs in ["1", "4"] {
        for cmd in ["convert", "convert-alt"] {
            let out = dir.path().join(format!("{cmd}-{jobs}.json"));
            let o = run(&[
                "--jobs",
                jobs,
                cmd,
                "--in",
                s(&input),
                "--out",
                s(&out),
                "--format",
                "json",
            ]);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            outputs.push(fs::read(&out).unwrap());
        }
    }
    assert_eq!(outputs[0], outputs[2]);
    assert_eq!(outputs[1], outputs[3]);
}

#[test]
fn train_mapping_and_convert_alt() {
    let dir = TempDir::new().unwrap();
    let input = corpus(dir.path());
    let gold = dir.path().join("gold.xml");
    assert!(run(&["convert", "--in", s(&input), "--out", s(&gold)]).status.success());
    let mapping = dir.path().join("mapping.tsv");
    let o = run(&[
        "train-mapping",
        "--in",
        s(&input),
        "--gold",
        s(&gold),
        "--out",
        s(&mapping),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(&mapping).unwrap();
    assert!(table.lines().any(|l| l.starts_with("det\tF\t")), "{table}");

    let pred = dir.path().join("alt.txt");
    let o = run(&[
        "convert-alt",
        "--in",
        s(&input),
        "--out",
        s(&pred),
        "--mapping",
        s(&mapping),
        "--format",
        "bracket",
    ]);
    assert!(o.status.success());
    let lines = fs::read_to_string(&pred).unwrap();
    assert!(lines.contains("[R of]") && lines.contains("[F aa]"), "{lines}");
}

#[test]
fn confusion_and_report() {
    let dir = TempDir::new().unwrap();
    let input = corpus(dir.path());
    let gold = dir.path().join("gold.json");
    let pred = dir.path().join("pred.json");
    assert!(
        run(&["convert", "--in", s(&input), "--out", s(&gold), "--format", "json"])
            .status
            .success()
    );
    assert!(
        run(&["convert-alt", "--in", s(&input), "--out", s(&pred), "--format", "json"])
            .status
            .success()
    );

    let matrix = dir.path().join("confusion.tsv");
    assert!(
        run(&["confusion", "--gold", s(&gold), "--pred", s(&pred), "--out", s(&matrix)])
            .status
            .success()
    );
    let m = fs::read_to_string(&matrix).unwrap();
    assert!(m.starts_with("pred\\gold\t") && m.contains("∅"));

    let o = run(&["report", "--gold", s(&gold), "--pred", s(&pred), "--format", "json"]);
    assert!(o.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 2);
}

#[test]
fn manifest_tracks_lexicons() {
    let a = run(&["manifest"]);
    let b = run(&["manifest"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let dir = TempDir::new().unwrap();
    let lex = dir.path().join("lex");
    fs::create_dir(&lex).unwrap();
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/lexicons");
    for e in fs::read_dir(&src).unwrap() {
        let e = e.unwrap();
        fs::copy(e.path(), lex.join(e.file_name())).unwrap();
    }
    let same = run(&["--lex", s(&lex), "manifest"]);
    let fp = |o: &Output| {
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v["lexicons"]["fingerprint"].as_str().unwrap().to_string()
    };
    assert_eq!(fp(&same), fp(&a));
    let kin = lex.join("kinship_terms.txt");
    let mut text = fs::read_to_string(&kin).unwrap();
    text.push_str("godparent\n");
    fs::write(&kin, text).unwrap();
    let changed = run(&["--lex", s(&lex), "manifest"]);
    assert_ne!(fp(&changed), fp(&a));
}

#[test]
fn evaluation_json_embeds_manifest() {
    let dir = TempDir::new().unwrap();
    let input = corpus(dir.path());
    let out = dir.path().join("dev.xml");
    assert!(run(&["convert", "--in", s(&input), "--out", s(&out)]).status.success());
    let o = run(&["evaluate", "--gold", s(&out), "--pred", s(&out), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["labeled"]["primary"]["f1"], 1.0);
    assert!(v["manifest"]["version"].is_string());
    assert!(v["manifest"]["lexicons"]["fingerprint"].as_str().unwrap().len() == 64);
}

#[test]
fn error_exit_codes() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.conllulex");
    let out = dir.path().join("x.xml");
    let o = run(&["convert", "--in", s(&missing), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());

    let input = corpus(dir.path());
    let a = dir.path().join("a.xml");
    assert!(run(&["convert", "--in", s(&input), "--out", s(&a)]).status.success());
    let b = dir.path().join("b.json");
    fs::write(&b, "[]").unwrap();
    let o = run(&["evaluate", "--gold", s(&a), "--pred", s(&b)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("gold only"));

    let broken = dir.path().join("broken.json");
    fs::write(
        &broken,
        r#"[{"passage_id":"p","terminals":[{"text":"x"}],"units":{"1.1":{"id":"1.1"}},"edges":[],"root":"1.1"}]"#,
    )
    .unwrap();
    let o = run(&["--strict", "evaluate", "--gold", s(&broken), "--pred", s(&broken)]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["evaluate", "--gold", s(&broken), "--pred", s(&broken)]);
    assert_eq!(o.status.code(), Some(0));
}
