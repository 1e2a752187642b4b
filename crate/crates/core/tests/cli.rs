use clftraj::cli::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["clftraj"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn unknown_case_exits_with_two() {
    let (code, _, err) = call(&["run", "--case", "Z"]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown case"), "{err}");
}

#[test]
fn unknown_flag_rejected() {
    let (code, _, _) = call(&["run", "--case", "A", "--bogus"]);
    assert_eq!(code, 2);
}

#[test]
fn help_lists_every_knob() {
    let (code, out, _) = call(&["run", "--help"]);
    assert_eq!(code, 0);
    for flag in [
        "--case", "--mode", "--runs", "--seed", "--out", "--epsilon", "--rel-tol", "--abs-tol",
        "--horizon-days", "--threads", "--max-steps", "--swarm-size", "--iterations", "--inertia",
        "--cognitive", "--social", "--velocity-clamp", "CLFTRAJ_OUT",
    ] {
        assert!(out.contains(flag), "--help is missing {flag}");
    }
    for default in ["1e-4", "1e-10", "1e-12", "0.7298", "1.49618"] {
        assert!(out.contains(default), "--help is missing default {default}");
    }
}

#[test]
fn bad_knob_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, _, err) = call(&["run", "--case", "C", "--epsilon=-1", "--out", out]);
    assert_eq!(code, 1);
    assert!(err.contains("epsilon"), "{err}");
}

#[test]
fn run_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, stdout, err) = call(&[
        "run", "--case", "C", "--mode", "both", "--runs", "2", "--seed", "42", "--out", out,
        "--swarm-size", "4", "--iterations", "1",
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(stdout.contains("K1 diag") && stdout.contains("K2 full"));
    for f in ["summary.csv", "summary.json", "C/diagonal/run1.json", "C/full/run2_history.csv"] {
        assert!(dir.path().join(f).exists(), "missing {f}");
    }
    let (code, report, _) = call(&["report", "--out", out]);
    assert_eq!(code, 0);
    assert!(stdout.ends_with(&format!("{report}summary written to {}\n", dir.path().join("summary.csv").display())));
}

#[test]
fn report_without_runs_fails() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = call(&["report", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("no run records"), "{err}");
}

#[test]
fn validate_passes() {
    let (code, out, _) = call(&["validate"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("9 passed, 0 failed"));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    std::env::set_var("CLFTRAJ_OUT", dir.path());
    let (code, _, err) = call(&[
        "run", "--case", "C", "--mode", "diagonal", "--runs", "1", "--swarm-size", "2", "--iterations", "1",
    ]);
    std::env::remove_var("CLFTRAJ_OUT");
    assert_eq!(code, 0, "{err}");
    assert!(dir.path().join("summary.csv").exists());
    assert!(dir.path().join("C/diagonal/run1.json").exists());
}
