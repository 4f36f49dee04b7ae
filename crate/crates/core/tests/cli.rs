mod common;

use std::path::Path;

use omega_sct::cli::run;
use omega_sct::formats::{has_suffix_closed_stamp, parse_ba};

fn corpus(name: &str) -> String {
    common::corpus_dir().join(name).display().to_string()
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("omega-sct").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn sct_check_engines() {
    let fig3 = corpus("fig3.sct");
    let stall = corpus("stall.sct");
    for engine in ["ljb", "dgs", "sgs", "rank"] {
        let (code, out, _) = cli(&["sct", "check", &fig3, "--engine", engine]);
        assert_eq!((code, out.as_str()), (0, "Terminating\n"), "{engine}");
        let (code, out, _) = cli(&["sct", "check", &stall, "--engine", engine, "--witness"]);
        assert_eq!(code, 1, "{engine}");
        assert!(out.lines().any(|l| l == "NotTerminating"), "{out}");
        assert!(out.contains("witness: (c)^ω"), "{engine}: {out}");
    }
}

#[test]
fn buchi_universal() {
    let (code, out, _) = cli(&["buchi", "universal", &corpus("fig1.ba"), "--witness"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("NotUniversal\nwitness: "));
    let (code, out, _) = cli(&["buchi", "universal", &corpus("fig1.ba"), "--engine", "rank", "--no-subsumption"]);
    assert_eq!((code, out.as_str()), (1, "NotUniversal\n"));
}

#[test]
fn reduce_then_contains() {
    let dir = tempfile::tempdir().unwrap();
    let flow = dir.path().join("flow.ba");
    let desc = dir.path().join("desc.ba");
    let (f, d) = (flow.to_str().unwrap(), desc.to_str().unwrap());
    let (code, _, _) = cli(&["sct", "reduce", &corpus("fig3.sct"), "--out-flow", f, "--out-desc", d, "--optimized"]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&desc).unwrap();
    assert!(has_suffix_closed_stamp(&text));
    assert_eq!(parse_ba(&text).unwrap().num_states(), 5);
    for engine in ["dgs", "sgs", "rank"] {
        let (code, out, _) = cli(&["buchi", "contains", f, d, "--engine", engine]);
        assert_eq!((code, out.as_str()), (0, "Contained\n"), "{engine}");
    }
    // without the stamp the single-graph search refuses
    let bare = dir.path().join("bare.ba");
    std::fs::write(&bare, text.replace("# suffix-closed-wrt-flow: yes\n", "")).unwrap();
    let b = bare.to_str().unwrap();
    let (code, _, err) = cli(&["buchi", "contains", f, b, "--engine", "sgs"]);
    assert_eq!(code, 2);
    assert!(err.contains("precondition"), "{err}");
    let (code, _, _) = cli(&["buchi", "contains", f, b, "--engine", "sgs", "--assert-suffix-closed"]);
    assert_eq!(code, 0);
}

#[test]
fn complement_output_parses() {
    let (code, out, _) = cli(&["buchi", "complement", &corpus("fig1.ba"), "--max-rank", "2"]);
    assert_eq!(code, 0);
    let c = parse_ba(&out).unwrap();
    assert_eq!(c.alphabet(), ["a", "b"]);
}

#[test]
fn mcs_project_modes() {
    let (code, out, _) = cli(&["mcs", "project", &corpus("chain.mcs"), "--implied", "none"]);
    assert_eq!(code, 0);
    assert!(out.contains("call p: f -> g { b > u }"), "{out}");
}

#[test]
fn errors_exit_with_two() {
    assert_eq!(cli(&["sct", "check", "/no/such/file.sct"]).0, 2);
    assert_eq!(cli(&["frobnicate"]).0, 2);
    let (code, out, _) = cli(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("Usage"));
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["fig1.ba", "fig3.sct", "stall.sct", "gcd.mcs"] {
        std::fs::copy(corpus(name), dir.path().join(name)).unwrap();
    }
    let csv = dir.path().join("out.csv");
    let (code, out, err) = cli(&[
        "bench",
        dir.path().to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
        "--timeout-ms",
        "20000",
        "--jobs",
        "1",
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.starts_with("4 problems, 21 cells, 0 timeouts"), "{out}");
    let mut reader = csv::Reader::from_path(Path::new(&csv)).unwrap();
    assert_eq!(
        reader.headers().unwrap(),
        vec!["problem", "engine", "verdict", "time_ms", "work", "timeout"]
    );
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 21);
    for r in rows.iter().filter(|r| &r[0] == "stall.sct") {
        assert!(&r[2] == "refuted" || &r[2] == "skipped", "{r:?}");
    }
}

#[test]
fn reduced_reverse_deterministic_problems_need_rank_two() {
    let dir = tempfile::tempdir().unwrap();
    let flow = dir.path().join("flow.ba");
    let desc = dir.path().join("desc.ba");
    let (f, d) = (flow.to_str().unwrap(), desc.to_str().unwrap());
    for name in ["fig3.sct", "descent.sct", "stall.sct", "swap.sct"] {
        let file = corpus(name);
        let (check, _, _) = cli(&["sct", "check", &file]);
        let (code, _, _) = cli(&["sct", "reduce", &file, "--out-flow", f, "--out-desc", d, "--optimized"]);
        assert_eq!(code, 0);
        let (contains, _, _) = cli(&["buchi", "contains", f, d, "--engine", "rank", "--max-rank", "2"]);
        assert_eq!(contains, check, "{name}");
    }
}
