use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rstknn::dataset::{dataset_to_jsonl, parse_dataset};

fn rstknn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rstknn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn write_line_dataset(dir: &Path) -> String {
    let path = dir.join("line.jsonl");
    fs::write(
        &path,
        concat!(
            "{\"id\":\"c\",\"x\":10,\"y\":0,\"terms\":{\"t1\":1}}\n",
            "{\"id\":\"a\",\"x\":0,\"y\":0,\"terms\":{\"t1\":1}}\n",
            "{\"id\":\"b\",\"x\":1,\"y\":0,\"terms\":{\"t1\":1}}\n",
        ),
    )
    .unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn gen_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    for p in [&a, &b] {
        let o = rstknn(&[
            "gen",
            "--seed",
            "7",
            "--n",
            "25",
            "--vocab",
            "5",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    let bytes = fs::read_to_string(&a).unwrap();
    assert_eq!(bytes, fs::read_to_string(&b).unwrap());
    assert_eq!(bytes.lines().count(), 25);
    assert_eq!(dataset_to_jsonl(&parse_dataset(&bytes).unwrap()), bytes);
}

#[test]
fn gen_rejects_empty_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.jsonl");
    let o = rstknn(&["gen", "--n", "0", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn query_prints_sorted_ids() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_line_dataset(dir.path());
    for mode in ["correct", "oracle"] {
        let o = rstknn(&[
            "query", "--data", &data, "--qx", "0.4", "--qy", "0", "--k", "1", "--alpha", "1",
            "--mode", mode,
        ]);
        assert_eq!(o.status.code(), Some(0), "{mode}");
        assert_eq!(stdout(&o), "a b\n", "{mode}");
    }
}

#[test]
fn query_file_and_inline_terms_agree() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_line_dataset(dir.path());
    let qf = dir.path().join("q.json");
    fs::write(&qf, r#"{"x": -2, "y": 3, "terms": {"t1": 2, "t2": 5}}"#).unwrap();
    let inline = rstknn(&[
        "query",
        "--data",
        &data,
        "--qx",
        "-2",
        "--qy",
        "3",
        "--qterms",
        "t1=2,t2=5",
        "--alpha",
        "0.4",
    ]);
    let file = rstknn(&[
        "query",
        "--data",
        &data,
        "--query-file",
        qf.to_str().unwrap(),
        "--alpha",
        "0.4",
    ]);
    assert_eq!(inline.status.code(), Some(0));
    assert_eq!(stdout(&inline), stdout(&file));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let data = write_line_dataset(dir.path());
    let cases: &[&[&str]] = &[
        &[
            "query", "--data", &data, "--qx", "0", "--qy", "0", "--k", "0",
        ],
        &[
            "query", "--data", &data, "--qx", "0", "--qy", "0", "--alpha", "1.5",
        ],
        &[
            "query", "--data", &data, "--qx", "0", "--qy", "0", "--fanout", "1",
        ],
        &["query", "--data", &data, "--qx", "0"],
        &[
            "query", "--data", &data, "--qx", "0", "--qy", "0", "--mode", "fast",
        ],
        &[
            "query", "--data", &data, "--qx", "0", "--qy", "0", "--qterms", "t1",
        ],
        &["frobnicate"],
    ];
    for args in cases {
        let o = rstknn(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stdout(&o).is_empty(), "{args:?}");
    }
}

#[test]
fn bad_input_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.jsonl");
    fs::write(&bad, "{\"id\":\"a\",\"x\":0,\"y\":0}\nnot json\n").unwrap();
    let dup = dir.path().join("dup.jsonl");
    fs::write(
        &dup,
        "{\"id\":\"a\",\"x\":0,\"y\":0}\n{\"id\":\"a\",\"x\":1,\"y\":0}\n",
    )
    .unwrap();
    let missing = dir.path().join("nope.jsonl");
    for path in [&bad, &dup, &missing] {
        let o = rstknn(&[
            "query",
            "--data",
            path.to_str().unwrap(),
            "--qx",
            "0",
            "--qy",
            "0",
        ]);
        assert_eq!(o.status.code(), Some(3), "{path:?}");
    }
    let o = rstknn(&[
        "query",
        "--data",
        bad.to_str().unwrap(),
        "--qx",
        "0",
        "--qy",
        "0",
    ]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn trace_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.jsonl");
    rstknn(&[
        "gen",
        "--seed",
        "3",
        "--n",
        "40",
        "--out",
        data.to_str().unwrap(),
    ]);
    let mut runs = Vec::new();
    for i in 0..2 {
        let t = dir.path().join(format!("t{i}.jsonl"));
        let o = rstknn(&[
            "query",
            "--data",
            data.to_str().unwrap(),
            "--qx",
            "64",
            "--qy",
            "64",
            "--qterms",
            "t0=3,t4=1",
            "--k",
            "2",
            "--alpha",
            "0.4",
            "--fanout",
            "2",
            "--trace",
            "--out",
            t.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        runs.push((o.stdout, fs::read(&t).unwrap()));
    }
    assert_eq!(runs[0], runs[1]);
    let table = String::from_utf8(runs[0].0.clone()).unwrap();
    assert!(table.contains("Steps | Actions"));
    for line in String::from_utf8(runs[0].1.clone()).unwrap().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        for key in ["step", "action", "u", "col", "rol", "pel"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}

#[test]
fn compare_reports_legacy_differences() {
    let o = rstknn(&["compare", "--fixture", &fixture("nested6")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("oracle      P0 P1\n"));
    assert!(text.contains("correct     P0 P1  missing: -  extra: -\n"));
    assert!(text.contains("faulty2011  P0 P1 P2 P3 P4 P5  missing: -  extra: P2 P3 P4 P5\n"));
}

#[test]
fn fixture_conflicts_with_explicit_inputs() {
    let o = rstknn(&["query", "--fixture", &fixture("nested6"), "--k", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn search_writes_a_replayable_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cx");
    let o = rstknn(&[
        "search",
        "--mode",
        "faulty2011",
        "--seed",
        "0",
        "--trials",
        "200",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = rstknn(&[
        "query",
        "--fixture",
        out.to_str().unwrap(),
        "--mode",
        "faulty2011",
    ]);
    let legacy = stdout(&o);
    let o = rstknn(&[
        "query",
        "--fixture",
        out.to_str().unwrap(),
        "--mode",
        "oracle",
    ]);
    assert_ne!(legacy, stdout(&o));
}
