use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bosonic")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn tmp(name: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("bosonic-cli-{}-{}", std::process::id(), name))
}

#[test]
fn reduce_applies_the_boson_relation() {
    let o = run(&["reduce", "f[1,0]*f[1,1]"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "q^2*f[1,1]*f[1,0] + (1 - q^2)");
    assert_eq!(stdout(&run(&["reduce", "f[1,0] - f[1,0]"])).trim(), "0");
    assert_eq!(stdout(&run(&["reduce", "q^(1/2)*f[1,0]"])).trim(), "q^(1/2)*f[1,0]");
}

#[test]
fn pbw_prints_cuspidal_elements() {
    let o = run(&["pbw", "--preset", "A2", "--seq", "1,2,1", "--u", "0,0,1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "q^(1/2)*f[2,0]");
    let o = run(&["pbw", "--preset", "A2", "--word", "1,2,1", "--expand", "q*f[2,0]*f[1,0]"]);
    let text = stdout(&o);
    assert!(text.contains("residual: 0"), "{}", text);
}

#[test]
fn act_accepts_inverse_letters() {
    let o = run(&["act", "--word", "1,-1", "f[2,0]*f[1,1]"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), stdout(&run(&["reduce", "f[2,0]*f[1,1]"])).trim());
    assert_eq!(stdout(&run(&["act", "--word", "1", "f[1,0]"])).trim(), "f[1,1]");
}

#[test]
fn pairing_prints_both_forms() {
    let text = stdout(&run(&["pairing", "f[1,0]", "f[1,0]"]));
    assert_eq!(text, "hform: 1 - q^2\npair: q^-1 - q\n");
}

#[test]
fn global_basis_element() {
    let o = run(&["global", "--seq", "1,2,1", "--u", "1,0,1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("(1,0,1): 1"), "{}", text);
    assert!(text.contains("(0,1,0): -q"), "{}", text);
}

#[test]
fn verify_emits_a_json_report() {
    let o = run(&["verify", "braid", "--preset", "A2"]);
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["pass"], true);
    assert_eq!(r["parameters"]["window"], serde_json::json!([-1, 1]));
    let one = stdout(&run(&["verify", "orth", "--preset", "A2", "--threads", "1"]));
    let eight = stdout(&run(&["verify", "orth", "--preset", "A2", "--threads", "8"]));
    assert_eq!(one, eight);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["reduce", "f[1,0"]).status.code(), Some(2));
    assert_eq!(run(&["reduce", "f[4,0]"]).status.code(), Some(2));
    assert_eq!(run(&["--preset", "X9", "reduce", "1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "nothing"]).status.code(), Some(2));
    assert_eq!(run(&["--max-height", "2", "reduce", "f[1,0]*f[1,0]*f[2,0]"]).status.code(), Some(3));

    let bad = tmp("bad.json");
    std::fs::write(&bad, r#"{"cartan": [[2,-1],[-2,2]], "symmetrizers": [1,1]}"#).unwrap();
    let o = run(&["--config", bad.to_str().unwrap(), "reduce", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("symmetrizability"));

    // Imaginary roots are invisible to the real-root partition oracle.
    let affine = tmp("affine.json");
    std::fs::write(&affine, r#"{"cartan": [[2,-2],[-2,2]], "symmetrizers": [1,1]}"#).unwrap();
    let o = run(&["--config", affine.to_str().unwrap(), "verify", "serre-dims", "--budget", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["pass"], false);
    assert_eq!(r["findings"].as_array().unwrap().len(), 1);
}

#[test]
fn cache_round_trip() {
    let path = tmp("cache.json");
    let p = path.to_str().unwrap();
    assert_eq!(run(&["--preset", "B2", "cache", "export", p, "--height", "4"]).status.code(), Some(0));
    let o = run(&["--preset", "B2", "cache", "import", p, "--check"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("identical to recomputation"));
    assert_eq!(run(&["--preset", "A2", "cache", "import", p]).status.code(), Some(2));
}
