//! Acceptance checks. Runs as a plain binary and prints one PASS/FAIL line
//! per criterion; exits non-zero if any criterion fails.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rstknn::dataset::Fixture;
use rstknn::engine::{rstknn_query_with, to_json_lines, ChildOrder, Evaluation};
use rstknn::generate::{random_fixture, rng_for, InstanceConfig};
use rstknn::oracle::{
    check_bound_sandwich, counterexample_search, kth_nn_sim, lemma1_refutation_check,
    rknn_bruteforce_tree,
};
use rstknn::similarity::{extended_jaccard, fdim_ratio};
use rstknn::{rstknn_query, IurTree, Mode, TermVector};

const EJ_TOLERANCE: f64 = 1e-3;
const RANDOM_INSTANCES: u64 = 500;
const RANDOM_SEED: u64 = 20_240_601;
const INSTANCE_BUDGET: Duration = Duration::from_secs(60);
const SANDWICH_TREES: u64 = 50;
const SANDWICH_MAX_N: usize = 128;
const SANDWICH_BUDGET: Duration = Duration::from_secs(30);
const KNN_BOUND_INSTANCES: u64 = 100;
const SEARCH_TRIALS: u64 = 2_000;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn vector(ws: &[f64]) -> TermVector {
    ws.iter()
        .enumerate()
        .map(|(i, &w)| (format!("t{i}"), w))
        .collect()
}

fn extended_jaccard_values() -> Verdict {
    let p = vector(&[100.0, 30.0]);
    let ej1 = extended_jaccard(&p, &vector(&[1.0, 40.0]));
    let ej2 = extended_jaccard(&p, &vector(&[1.0, 50.0]));
    let close = (ej1 - 0.116).abs() <= EJ_TOLERANCE && (ej2 - 0.135).abs() <= EJ_TOLERANCE;
    let dominance = fdim_ratio(100.0, 1.0).unwrap() >= fdim_ratio(100.0, 1.0).unwrap()
        && fdim_ratio(30.0, 40.0).unwrap() >= fdim_ratio(30.0, 50.0).unwrap();
    let refuted = lemma1_refutation_check();
    verdict(
        close && dominance && refuted,
        format!("EJ = {ej1:.4}, {ej2:.4}; fdim dominance {dominance}; ordering reversed {refuted}"),
    )
}

fn instance(seed: u64, trial: u64, cfg: &InstanceConfig) -> (Fixture, IurTree) {
    let f = random_fixture(&mut rng_for(seed, trial), cfg);
    let tree = f.tree().expect("generated fixtures build");
    (f, tree)
}

/// Criteria 2 and 5 share the same runs.
fn random_instances() -> (Verdict, Verdict) {
    let cfg = InstanceConfig::default();
    let start = Instant::now();
    let mut mismatches = Vec::new();
    let (mut checks, mut failures) = (0, 0);
    for trial in 0..RANDOM_INSTANCES {
        let (f, tree) = instance(RANDOM_SEED, trial, &cfg);
        let out = rstknn_query(&tree, &f.query, f.params, Mode::Correct);
        if out.result != rknn_bruteforce_tree(&tree, &f.query, f.params) {
            mismatches.push(trial);
        }
        checks += out.stats.completeness_checks;
        failures += out.stats.completeness_failures;
    }
    let elapsed = start.elapsed();
    let agree = verdict(
        mismatches.is_empty() && elapsed < INSTANCE_BUDGET,
        format!(
            "{RANDOM_INSTANCES} instances, {} mismatches {:?}, {:.1}s",
            mismatches.len(),
            mismatches,
            elapsed.as_secs_f64()
        ),
    );
    let complete = verdict(
        checks > 0 && failures == 0,
        format!("{checks} completeness checks, {failures} failed"),
    );
    (agree, complete)
}

fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn modes_on(dir: &Path, mode: Mode) -> Option<(bool, bool)> {
    let f = Fixture::read_dir(dir).ok()?;
    let tree = f.tree().ok()?;
    let oracle = rknn_bruteforce_tree(&tree, &f.query, f.params);
    let legacy = rstknn_query(&tree, &f.query, f.params, mode).result;
    let correct = rstknn_query(&tree, &f.query, f.params, Mode::Correct).result;
    Some((legacy != oracle, correct == oracle))
}

fn fault_reproduction() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, mode) in [
        ("faulty2011_seed0", Mode::Faulty2011),
        ("faulty2014_seed2", Mode::Faulty2014),
    ] {
        let found =
            counterexample_search(mode, 0, SEARCH_TRIALS, &InstanceConfig::default()).is_some();
        let committed = modes_on(&fixtures_dir().join(name), mode);
        let ok = found && committed == Some((true, true));
        pass &= ok;
        parts.push(format!(
            "{mode}: search found {found}, fixture {name} {}",
            if ok { "ok" } else { "bad" }
        ));
    }
    let bonus = Fixture::read_dir(&fixtures_dir().join("nested6"))
        .ok()
        .and_then(|f| {
            let tree = f.tree().ok()?;
            let oracle = rknn_bruteforce_tree(&tree, &f.query, f.params);
            let correct = rstknn_query(&tree, &f.query, f.params, Mode::Correct).result;
            let legacy = rstknn_query(&tree, &f.query, f.params, Mode::Faulty2011).result;
            let n2 = tree.entry_by_label("N2")?;
            let n2_inside = tree
                .subtree_objects(n2)
                .into_iter()
                .all(|o| legacy.contains(&tree.object(o).id));
            Some(oracle == ["P0", "P1"] && correct == oracle && n2_inside)
        });
    parts.push(format!(
        "nested six-point fixture {}",
        if bonus == Some(true) { "ok" } else { "bad" }
    ));
    verdict(pass, parts.join("; "))
}

fn bound_sandwich() -> Verdict {
    let cfg = InstanceConfig {
        min_n: 2,
        max_n: SANDWICH_MAX_N,
        ..InstanceConfig::default()
    };
    let start = Instant::now();
    let (mut pairs, mut violations) = (0, Vec::new());
    for trial in 0..SANDWICH_TREES {
        let (f, tree) = instance(RANDOM_SEED ^ 0x5a5a, trial, &cfg);
        let report = check_bound_sandwich(&tree, Some(&f.query), f.params.alpha);
        pairs += report.pairs_checked;
        violations.extend(
            report
                .violations
                .into_iter()
                .map(|v| format!("tree {trial}: {v}")),
        );
    }
    let elapsed = start.elapsed();
    verdict(
        violations.is_empty() && elapsed < SANDWICH_BUDGET,
        format!(
            "{SANDWICH_TREES} trees, {pairs} pairs, {} violations{}, {:.1}s",
            violations.len(),
            violations
                .first()
                .map(|v| format!(" (first: {v})"))
                .unwrap_or_default(),
            elapsed.as_secs_f64()
        ),
    )
}

fn knn_bound_sandwich() -> Verdict {
    let cfg = InstanceConfig::default();
    let (mut lower_checks, mut upper_checks, mut bad) = (0usize, 0usize, Vec::new());
    for trial in 0..KNN_BOUND_INSTANCES {
        let (f, tree) = instance(RANDOM_SEED ^ 0xa5a5, trial, &cfg);
        let (k, alpha) = (f.params.k, f.params.alpha);
        let stats = *tree.stats();
        let kth: Vec<f64> = tree
            .objects()
            .iter()
            .map(|o| kth_nn_sim(o, tree.objects(), k, alpha, &stats))
            .collect();
        let n = tree.len();
        let mut observer = |ev: &Evaluation<'_>| {
            let lower = ev.lists.knn_lower(k);
            let upper = ev.lists.knn_upper(k, n);
            for o in tree.subtree_objects(ev.owner) {
                let exact = kth[o.0];
                if let Some(lo) = lower {
                    lower_checks += 1;
                    if lo > exact {
                        bad.push(format!(
                            "trial {trial} {}: lower {lo} > {exact}",
                            tree.object(o).id
                        ));
                    }
                }
                if let Some(hi) = upper {
                    upper_checks += 1;
                    if hi < exact {
                        bad.push(format!(
                            "trial {trial} {}: upper {hi} < {exact}",
                            tree.object(o).id
                        ));
                    }
                }
            }
        };
        rstknn_query_with(
            &tree,
            &f.query,
            f.params,
            Mode::Correct,
            ChildOrder::Forward,
            &mut observer,
        );
    }
    verdict(
        bad.is_empty() && lower_checks > 0 && upper_checks > 0,
        format!(
            "{KNN_BOUND_INSTANCES} instances, {lower_checks} lower and {upper_checks} upper checks, {} violations{}",
            bad.len(),
            bad.first().map(|v| format!(" (first: {v})")).unwrap_or_default()
        ),
    )
}

fn listing(seed: u64) -> String {
    let cfg = InstanceConfig::default();
    let mut out = String::new();
    for trial in 0..50 {
        let (f, tree) = instance(seed, trial, &cfg);
        for mode in Mode::ALL {
            let o = rstknn_query(&tree, &f.query, f.params, mode);
            out.push_str(&format!("{trial} {mode}: {}\n", o.result.join(" ")));
            out.push_str(&to_json_lines(&o.trace));
        }
    }
    out
}

fn cli_run(dir: &Path, tag: &str) -> Option<Vec<u8>> {
    let bin = env!("CARGO_BIN_EXE_rstknn");
    let data = dir.join(format!("{tag}.jsonl"));
    let trace = dir.join(format!("{tag}.trace.jsonl"));
    let gen = Command::new(bin)
        .args(["gen", "--seed", "99", "--n", "48", "--out"])
        .arg(&data)
        .status()
        .ok()?;
    let query = Command::new(bin)
        .args(["query", "--data"])
        .arg(&data)
        .args([
            "--qx",
            "40",
            "--qy",
            "90",
            "--qterms",
            "t1=4,t3=2",
            "--k",
            "3",
            "--alpha",
            "0.7",
        ])
        .args(["--fanout", "2", "--trace", "--out"])
        .arg(&trace)
        .output()
        .ok()?;
    if !(gen.success() && query.status.success()) {
        return None;
    }
    let mut bytes = std::fs::read(&data).ok()?;
    bytes.extend(query.stdout);
    bytes.extend(std::fs::read(&trace).ok()?);
    Some(bytes)
}

fn determinism() -> Verdict {
    let in_process = listing(RANDOM_SEED) == listing(RANDOM_SEED);
    let dir = std::env::temp_dir().join(format!("rstknn-acceptance-{}", std::process::id()));
    let cli = std::fs::create_dir_all(&dir).is_ok() && {
        let (a, b) = (cli_run(&dir, "a"), cli_run(&dir, "b"));
        a.is_some() && a == b
    };
    let _ = std::fs::remove_dir_all(&dir);
    verdict(
        in_process && cli,
        format!("library listings identical {in_process}; CLI dataset, results and traces identical {cli}"),
    )
}

fn main() -> ExitCode {
    let (agree, complete) = random_instances();
    let verdicts = [
        ("1 extended Jaccard values", extended_jaccard_values()),
        ("2 correct mode equals brute force", agree),
        ("3 legacy faults reproduced", fault_reproduction()),
        ("4 node-pair bound sandwich", bound_sandwich()),
        ("5 list completeness", complete),
        ("6 k-th neighbor bound sandwich", knn_bound_sandwich()),
        ("7 determinism", determinism()),
    ];
    let mut all = true;
    for (name, v) in &verdicts {
        all &= v.pass;
        println!(
            "{} criterion {name}: {}",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
