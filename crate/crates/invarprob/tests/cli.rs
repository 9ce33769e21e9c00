use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invarprob")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn gamma_prints_the_bare_value() {
    let o = run(&["gamma", "--A", "finite:[5]", "--B", "finite:[5,9]"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1/2\n");
}

#[test]
fn skew_values() {
    let b = "Lm:0 | sparse:double-exp";
    assert_eq!(stdout(&run(&["skew", "--A", "Lm:0", "--B", b])), "0\n");
    assert_eq!(stdout(&run(&["skew", "--A", "sparse:double-exp", "--B", b])), "1\n");
}

#[test]
fn compare_verdicts() {
    let o = run(&["qual", "compare", "--A", "Lm:0", "--B", "sparse:double-exp"]);
    assert_eq!(stdout(&o), "less\n");
    let o = run(&["qual", "compare", "--oracle", "lexmax", "--A", "finite:[1]", "--B", "finite:[2]"]);
    assert_eq!(stdout(&o), "less\n");
}

#[test]
fn undetermined_fails_only_when_strict() {
    let args = ["qual", "compare", "--A", "sparse:squares ~ sparse:double-exp", "--B", "sparse:double-exp shift:1"];
    let o = run(&args);
    assert!(o.status.success());
    assert!(stdout(&o).contains("undetermined"));
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(run(&strict).status.code(), Some(1));
}

#[test]
fn orbit_without_generators_is_the_point() {
    let o = run(&["orbit", "--point", "int:3", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let out = &v["outcomes"][0];
    assert_eq!(out["values"]["closure"], "finite");
    assert_eq!(out["values"]["size"], "1");
}

#[test]
fn orbit_exceeding_the_budget() {
    let o = run(&["orbit", "-g", "translate:1", "--point", "0", "--budget", "50"]);
    let text = stdout(&o);
    assert!(text.contains("budget 50"), "{text}");
    assert!(text.contains("budget-exceeded"), "{text}");
}

#[test]
fn seed_is_in_the_header() {
    let o = run(&["--seed", "17", "scenario", "run", "--bundled", "coin-shifts"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("scenario coin-shifts  (seed 17, budget"));
}

#[test]
fn unknown_flags_are_rejected() {
    let o = run(&["gamma", "--A", "finite:[1]", "--B", "finite:[1]", "--tolerance", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["gamma", "--A", "finite:1", "--B", "finite:[1]"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot parse zset"));
}

#[test]
fn equidecomp_finds_pieces() {
    let o = run(&[
        "equidecomp", "-g", "translate:1", "--omega", "ints:0..9", "--a", "0", "--a", "1", "--b", "5", "--b", "6",
        "--word", "g0^5", "--format", "json",
    ]);
    // `g0^5` is not a word literal; words are products of letters
    assert_eq!(o.status.code(), Some(2));
    let w = "g0*g0*g0*g0*g0";
    let o = run(&[
        "equidecomp", "-g", "translate:1", "--omega", "ints:0..9", "--a", "0", "--a", "1", "--b", "5", "--b", "6",
        "--word", w,
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("equidecomposable = yes"), "{}", stdout(&o));
}

#[test]
fn localfinite_on_a_cycle() {
    let o = run(&["localfinite", "-g", "cycle:[0,1,2]", "--omega", "ints:0..4"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("locally-finite = yes"), "{}", stdout(&o));
}

#[test]
fn popper_build_and_verify() {
    let base = ["-g", "cycle:[0,1,2]", "--omega", "ints:0..3"];
    let mut build = vec!["popper", "build"];
    build.extend(base);
    build.extend(["--target", "0", "--format", "json"]);
    let o = run(&build);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["summary"]["levels"], "2");
    // P({0} | Ω): the first level spreads 1/3 over the cycle, nothing on 3
    let row = v["table"]["0b1111"].as_array().unwrap();
    assert_eq!(row[1], "1/3");
    assert_eq!(row[8], "0");

    let mut verify = vec!["popper", "verify"];
    verify.extend(base);
    let o = run(&verify);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("round-trip = yes"));
}

#[test]
fn qual_verify_lexmax() {
    let o = run(&[
        "qual", "verify", "--oracle", "lexmax", "--set", "finite:[0,2]", "--set", "cofinite-ex:[1]", "--set",
        "finite:[]", "--shift", "3", "--shift", "-1", "--pair", "0", "4",
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("weak = pass"));
    assert!(text.contains("pair-strong = fail"));
}

#[test]
fn out_writes_the_report() {
    let dir = std::env::temp_dir().join(format!("invarprob-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let o = run(&["scenario", "run", "--bundled", "skew-cone", "--format", "json", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["scenario"], "skew-cone");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn scenario_files_run_from_disk() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/finite-space.json");
    let a = run(&["scenario", "run", path]);
    let b = run(&["scenario", "run", "--bundled", "finite-space"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for args in [
        &["--seed", "3", "scenario", "run", "--bundled", "finite-space", "--format", "json"][..],
        &["table", "--format", "json"][..],
    ] {
        assert_eq!(run(args).stdout, run(args).stdout);
    }
}

#[test]
fn a_failing_expectation_exits_nonzero() {
    let dir = std::env::temp_dir().join(format!("invarprob-bad-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(
        &path,
        r#"{
  "name": "bad",
  "space": { "omega_star": "Z", "omega": "all" },
  "checks": [ { "id": "g", "op": "gamma", "params": { "a": "finite:[1]", "b": "finite:[1,2]" } } ],
  "expected": [ { "check": "g", "values": { "gamma": "1/3" } } ]
}"#,
    )
    .unwrap();
    let o = run(&["scenario", "run", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("[UNEXPECTED]"));
    std::fs::remove_dir_all(&dir).unwrap();
}
