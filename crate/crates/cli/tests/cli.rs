use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn ltbe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ltbe")).args(args).output().unwrap()
}

fn d(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn coin_loop_finite_trace_csv() {
    let o = ltbe(&["behaviour", "--system", &d("coin_loop.json"), "--spec", &d("coin_spec_finite.json")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("state,z2,z1,z0\nc,0.125000000,0.250000000,0.500000000\n"), "{text}");
    assert!(text.contains("# converged=true"));
}

#[test]
fn bool_a_loop_renders_zero_one() {
    let o = ltbe(&["behaviour", "--system", &d("a_loop_exit.json"), "--spec", &d("a_spec.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("c,1,1\n"));
}

#[test]
fn non_convergence_exits_three_with_matrix() {
    let o = ltbe(&["behaviour", "--system", &d("coin_loop.json"), "--spec", &d("coin_spec_omega.json")]);
    assert_eq!(o.status.code(), Some(3));
    let text = stdout(&o);
    assert!(text.contains("c,0.000000954"), "{text}");
    assert!(text.contains("# converged=false"));
}

#[test]
fn threshold_flag() {
    let o = ltbe(&[
        "behaviour", "--system", &d("coin_loop.json"), "--spec", &d("coin_spec_omega.json"), "--threshold", "0.1",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("# iterations=4"));
    let bad = ltbe(&[
        "behaviour", "--system", &d("coin_loop.json"), "--spec", &d("coin_spec_omega.json"), "--threshold", "lots",
    ]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn bisim_and_common_pairs() {
    let o = ltbe(&["bisim", "--a", &d("loop.json"), "--b", &d("loop_exit.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("c,0,0\n"));
    let o = ltbe(&["common", "--a", &d("w1.json"), "--b", &d("w2.json")]);
    assert!(stdout(&o).contains("c,5\n"));
    let o = ltbe(&["bisim", "--a", &d("w1.json"), "--b", &d("w2.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("kind"));
}

#[test]
fn oracle_json() {
    let o = ltbe(&[
        "oracle", "--system", &d("two_paths.json"), "--spec", &d("a_stop_spec.json"), "--depth", "2", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["depth"], 2);
    assert_eq!(doc["kind"], "tropical");
    let first = &doc["records"][0];
    assert_eq!((first["row"].as_str(), first["col"].as_str(), first["value"].as_str()), (Some("c"), Some("z1"), Some("2")));
    let o = ltbe(&["oracle", "--system", &d("two_paths.json"), "--depth", "2"]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.csv");
    let o = ltbe(&["common", "--a", &d("w1.json"), "--b", &d("w2.json"), "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().contains("c,5\n"));
    let o = ltbe(&["common", "--a", &d("w1.json"), "--b", &d("w2.json"), "--out", "/nonexistent/dir/m.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn input_errors() {
    let o = ltbe(&["behaviour", "--system", &d("missing.json"), "--spec", &d("a_spec.json")]);
    assert_eq!(o.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let heavy = dir.path().join("heavy.json");
    std::fs::write(
        &heavy,
        r#"{"kind": "prob", "stack": ["T", "{*} + {a} * Id"], "states": ["c"],
            "transitions": {"c": [{"term": {"inj": 0, "of": {"atom": "*"}}, "weight": 0.5},
                                  {"term": {"inj": 1, "of": {"pair": [{"atom": "a"}, {"state": "c"}]}}, "weight": 0.6}]}}"#,
    )
    .unwrap();
    let o = ltbe(&["behaviour", "--system", heavy.to_str().unwrap(), "--spec", &d("coin_spec_omega.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("heavy.json"));

    let o = ltbe(&["behaviour", "--system", &d("coin_loop.json"), "--spec", &d("a_loop_exit.json")]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn enum_cap_env() {
    let o = Command::new(env!("CARGO_BIN_EXE_ltbe"))
        .args(["behaviour", "--system", &d("coin_loop.json"), "--spec", &d("coin_spec_finite.json")])
        .env("LTBE_ENUM_CAP", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap of 1"));
    let o = Command::new(env!("CARGO_BIN_EXE_ltbe"))
        .args(["check-laws", "--kind", "bool"])
        .env("LTBE_ENUM_CAP", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn check_laws_prob() {
    let o = ltbe(&["check-laws", "--kind", "prob", "--samples", "10000", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(!text.contains("FAIL"), "{text}");
    assert!(text.contains("witness"));
}
