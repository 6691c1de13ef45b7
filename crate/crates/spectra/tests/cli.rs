use std::path::{Path, PathBuf};
use std::process::Command;

use spectra::cli::{run, BUDGET_EXHAUSTED, DISTINGUISHED, EQUIVALENT, INPUT_ERROR};

const PQ: &str = "nplts pq
trans p a -> p1:1
trans p1 b -> p2:1
trans p1 c -> p3:1
trans q a -> q1:1
trans q a -> q2:1
trans q1 b -> q3:1
trans q2 c -> q4:1
";

const R1R2: &str = "nplts split
trans s a -> t:1/2, u:1/2
trans t b -> x:1
trans u c -> y:1
trans r a -> t2:1
trans r a -> u2:1
trans t2 b -> x:1
trans u2 c -> y:1
";

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("spectra-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn spectra(args: &[&str], budget: Option<&str>) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("spectra").chain(args.iter().copied());
    let code = run(argv, budget, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

#[test]
fn check_reports_verdicts_through_exit_codes() {
    let model = scratch("pq.nplts", PQ);
    let m = model.to_str().unwrap();
    let (code, out, _) = spectra(&["check", "--model", m, "--left", "p", "--right", "q", "--equiv", "ptr"], None);
    assert_eq!((code, out.as_str()), (EQUIVALENT, "verdict ptr equivalent\n"));

    let (code, out, _) = spectra(&["check", "--model", m, "--left", "p", "--right", "q", "--equiv", "pf"], None);
    assert_eq!(code, DISTINGUISHED);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("verdict pf distinguished w1"));
    let witness = lines.next().unwrap();
    assert!(witness.starts_with("witness w1 values event=FailurePair(a,{"), "{witness}");
}

#[test]
fn single_trace_witness_names_the_trace_and_value_sets() {
    let model = scratch("split.nplts", R1R2);
    let (code, out, _) =
        spectra(&["check", "--model", model.to_str().unwrap(), "--left", "s", "--right", "r", "--equiv", "ptr"], None);
    assert_eq!(code, DISTINGUISHED);
    assert!(out.contains("witness w1 values event=Trace(a.b) left={0,1/2} right={0,1}"), "{out}");
}

#[test]
fn states_may_come_from_two_files() {
    let left = scratch("left.nplts", "nplts l\ntrans s a -> t:1\n");
    let right = scratch("right.nplts", "nplts r\ntrans s a -> t:1/3, u:2/3\n");
    let (code, out, _) = spectra(
        &[
            "check",
            "--model",
            left.to_str().unwrap(),
            "--right-model",
            right.to_str().unwrap(),
            "--left",
            "s",
            "--right",
            "s",
            "--equiv",
            "pb",
        ],
        None,
    );
    assert_eq!((code, out.as_str()), (EQUIVALENT, "verdict pb equivalent\n"));
}

#[test]
fn testing_equivalences_use_test_files() {
    let model = scratch("split-tests.nplts", R1R2);
    let test = scratch("ab.npt", "npt ab\nroot o\ntrans o a -> o1:1\ntrans o1 b -> omega:1\n");
    let args = |equiv: &'static str| {
        vec![
            "check".to_string(),
            "--model".into(),
            model.to_str().unwrap().into(),
            "--left".into(),
            "s".into(),
            "--right".into(),
            "r".into(),
            "--equiv".into(),
            equiv.into(),
            "--tests".into(),
            test.to_str().unwrap().into(),
        ]
    };
    let call = |equiv| {
        let a = args(equiv);
        spectra(&a.iter().map(String::as_str).collect::<Vec<_>>(), None)
    };
    let (code, out, _) = call("pte-supinf");
    assert_eq!(code, DISTINGUISHED);
    assert!(out.contains("test index=0 name=ab success-extrema left=(sup=1/2,inf=1/2) right=(sup=1,inf=0)"), "{out}");
}

#[test]
fn input_errors_exit_with_two() {
    let model = scratch("pq-errors.nplts", PQ);
    let m = model.to_str().unwrap();
    let (code, _, err) = spectra(&["check", "--model", m, "--left", "p", "--right", "nope", "--equiv", "ptr"], None);
    assert_eq!(code, INPUT_ERROR);
    assert!(err.contains("nope"), "{err}");
    let (code, _, err) = spectra(&["check", "--model", m, "--left", "p", "--right", "q", "--equiv", "pxx"], None);
    assert_eq!(code, INPUT_ERROR);
    assert!(err.contains("pxx"), "{err}");
    let decimal = scratch("decimal.nplts", "nplts d\ntrans s a -> t:0.5, u:0.5\n");
    let (code, _, err) = spectra(&["classify", "--model", decimal.to_str().unwrap()], None);
    assert_eq!(code, INPUT_ERROR);
    assert!(err.contains("2:16"), "{err}");
    let (code, _, _) = spectra(&["check", "--model", "/nonexistent/x.nplts", "--left", "a", "--right", "b", "--equiv", "pb"], None);
    assert_eq!(code, INPUT_ERROR);
    assert_eq!(spectra(&["frobnicate"], None).0, INPUT_ERROR);
    assert_eq!(spectra(&["check", "--model", m], None).0, INPUT_ERROR);
    let (code, _, _) = spectra(&["check", "--model", m, "--left", "p", "--right", "q", "--equiv", "ptr"], Some("lots"));
    assert_eq!(code, INPUT_ERROR);
}

#[test]
fn budget_exhaustion_exits_with_three() {
    let model = scratch("pq-budget.nplts", PQ);
    let m = model.to_str().unwrap();
    let (code, _, err) = spectra(&["check", "--model", m, "--left", "p", "--right", "q", "--equiv", "ptr"], Some("1"));
    assert_eq!(code, BUDGET_EXHAUSTED);
    assert!(err.starts_with("budget exhausted"), "{err}");
    let (code, _, _) = spectra(&["check", "--model", m, "--left", "p", "--right", "q", "--equiv", "ptr"], Some("1000"));
    assert_eq!(code, EQUIVALENT);
}

#[test]
fn compare_prints_every_equivalence_in_order() {
    let model = scratch("pq-compare.nplts", PQ);
    let args = ["compare", "--model", model.to_str().unwrap(), "--left", "p", "--right", "q", "--gen-tests", "depth=2,transitions=2,grid=1,1/2"];
    let (code, out, _) = spectra(&args, None);
    assert_eq!(code, EQUIVALENT, "{out}");
    let verdicts: Vec<&str> = out.lines().filter(|l| l.starts_with("verdict")).map(|l| l.split(' ').nth(1).unwrap()).collect();
    let expected: Vec<&str> = spectra_core::EquivalenceId::ALL.iter().map(|id| id.as_str()).collect();
    assert_eq!(verdicts, expected);
    assert!(out.starts_with("pair p-vs-q\nclass fully-nondeterministic=true fully-probabilistic=false depth=2\n"));
    assert_eq!(spectra(&args, None).1, out, "output is deterministic");
}

#[test]
fn classify_and_dot() {
    let model = scratch("split-dot.nplts", R1R2);
    let m = model.to_str().unwrap();
    let (code, out, _) = spectra(&["classify", "--model", m], None);
    assert_eq!(code, EQUIVALENT);
    assert!(out.contains("fully-nondeterministic false\nfully-probabilistic false\n"), "{out}");
    let (code, out, _) = spectra(&["dot", "model", "--model", m], None);
    assert_eq!(code, EQUIVALENT);
    assert!(out.starts_with("digraph \"split\" {") && out.contains("\"s\" -> \"t0\" [label=\"a\", arrowhead=none];"), "{out}");
    let (code, out, _) = spectra(&["dot", "resolutions", "--model", m, "--state", "r"], None);
    assert_eq!(code, EQUIVALENT);
    assert_eq!(out.matches("subgraph").count(), 5, "{out}");
    let (code, out, _) = spectra(&["dot", "spectrum", "--expected"], None);
    assert_eq!(code, EQUIVALENT);
    assert!(out.contains("\"pb-dis\" -> \"pte-tbt-dis\";"));
}

#[test]
fn search_output_is_a_verified_witness() {
    let dir = std::env::temp_dir().join(format!("spectra-search-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("found.wit");
    let (code, _, err) = spectra(
        &["search", "--finer", "pctr", "--coarser", "ptr", "--seed", "7", "--budget", "5000", "--out", out.to_str().unwrap()],
        None,
    );
    assert_eq!(code, EQUIVALENT, "{err}");
    let (code, text, _) = spectra(&["corpus", "--dir", dir.to_str().unwrap()], None);
    assert_eq!((code, text.as_str()), (EQUIVALENT, "ok found.wit\ncorpus 1 verified 0 failed\n"));
    let (code, _, _) = spectra(&["search", "--finer", "ptr", "--coarser", "ptr", "--budget", "50"], None);
    assert_eq!(code, BUDGET_EXHAUSTED);
}

#[test]
fn shipped_corpus_verifies() {
    let dir = corpus_dir();
    let (code, first, _) = spectra(&["corpus", "--dir", dir.to_str().unwrap()], None);
    assert_eq!(code, EQUIVALENT, "{first}");
    let (_, second, _) = spectra(&["corpus", "--dir", dir.to_str().unwrap()], None);
    assert_eq!(first, second);
}

#[test]
fn binary_exit_codes_and_budget_variable() {
    let bin = env!("CARGO_BIN_EXE_spectra");
    let model = scratch("pq-bin.nplts", PQ);
    let m = model.to_str().unwrap();
    let status = |budget: Option<&str>, equiv: &str| {
        let mut cmd = Command::new(bin);
        cmd.args(["check", "--model", m, "--left", "p", "--right", "q", "--equiv", equiv]);
        match budget {
            Some(b) => cmd.env("SPECTRA_BUDGET", b),
            None => cmd.env_remove("SPECTRA_BUDGET"),
        };
        cmd.output().unwrap().status.code().unwrap()
    };
    assert_eq!(status(None, "ptr"), 0);
    assert_eq!(status(None, "pf"), 1);
    assert_eq!(status(None, "nonsense"), 2);
    assert_eq!(status(Some("1"), "ptr"), 3);
}
