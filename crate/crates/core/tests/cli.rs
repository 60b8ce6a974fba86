use hk_exact::cli::run;
use hk_exact::solver::{replay_certificate, Certificate};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("hk-exact").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

const SUBCOMMANDS: [&str; 7] =
    ["simulate", "f-of", "enumerate-graphs", "verify-lemma", "equidistant-report", "build-milp", "solve-f"];

#[test]
fn every_subcommand_has_help() {
    for sub in SUBCOMMANDS {
        let (code, out, _) = call(&[sub, "--help"]);
        assert_eq!(code, 0, "{sub}");
        assert!(out.contains("Usage"), "{sub}: {out}");
    }
    let (code, out, _) = call(&["--help"]);
    assert_eq!(code, 0);
    assert!(SUBCOMMANDS.iter().all(|s| out.contains(s)));
}

#[test]
fn simulate_two_agents() {
    let (code, out, _) = call(&["simulate", "--equidistant", "2"]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "t,agent,numerator,denominator\n0,1,1,1\n0,2,2,1\n1,1,3,2\n1,2,3,2\n# termination,FixedPoint(1),Consensus(1)\n"
    );
}

#[test]
fn f_of_and_enumeration() {
    assert_eq!(call(&["f-of", "--equidistant", "4"]), (0, "f = 5\n".into(), String::new()));
    assert_eq!(call(&["enumerate-graphs", "--n", "5", "--count-only"]).1, "14\n");
    let (code, out, _) = call(&["enumerate-graphs", "--n", "3"]);
    assert_eq!(code, 0);
    let parsed: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(parsed.as_array().unwrap().len(), 2);
}

#[test]
fn solve_f_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    let (code, out, _) = call(&["solve-f", "--n", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("f(3) = 2"), "{out}");
    assert!(out.contains("certificate:"));
    let cert = Certificate::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(replay_certificate(&cert), Ok(()));
}

#[test]
fn exit_codes() {
    assert_eq!(call(&["simulate", "--bogus"]).0, 2);
    assert_eq!(call(&["simulate"]).0, 2);
    assert_eq!(call(&["simulate", "--equidistant", "2", "--lower-bound", "4"]).0, 2);
    assert_eq!(call(&[]).0, 2);
    let (code, _, err) = call(&["build-milp", "--n", "3", "--T", "1", "--eps", "0.01", "--out", "/tmp/unused.lp"]);
    assert_eq!(code, 1);
    assert!(!err.is_empty());
    assert_eq!(call(&["verify-lemma", "--k", "3"]).0, 1);
    assert_eq!(call(&["enumerate-graphs", "--n", "20"]).0, 1);
}

#[test]
fn outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec!["simulate", "--lower-bound", "5", "--approx"],
        vec!["verify-lemma", "--k", "7"],
        vec!["equidistant-report", "--from", "2", "--to", "12"],
        vec!["--format", "json", "solve-f", "--n", "4"],
    ];
    for args in runs {
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        let (a_str, b_str) = (a.to_str().unwrap(), b.to_str().unwrap());
        let first = call(&[args.as_slice(), &["--out", a_str]].concat());
        let second = call(&[args.as_slice(), &["--out", b_str]].concat());
        assert_eq!(first.0, 0, "{args:?}: {}", first.2);
        assert_eq!(first.1.replace(a_str, ""), second.1.replace(b_str, ""));
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap(), "{args:?}");
    }
}

#[test]
fn build_milp_writes_lp_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.lp");
    let (code, out, _) =
        call(&["build-milp", "--n", "3", "--T", "1", "--eps", "-1/100", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    let lp = std::fs::read_to_string(&path).unwrap();
    assert!(lp.contains("100 x_0_2 - 100 x_0_1 + 300 u_0_0 <= 399"));
    assert!(dir.path().join("m.json").exists());
}
