use std::path::PathBuf;
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
}

fn star_forge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_star-forge"))
        .args(args)
        .output()
        .expect("run binary")
}

fn run(name: &str, extra: &[&str]) -> Output {
    let path = scenario(name);
    let mut args = vec!["run", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    star_forge(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn flat_fedosov_passes() {
    let o = run("flat_fedosov.scn", &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("\nclass_residual: 0 terms\n"), "{out}");
    assert!(out.contains("\nr: 0\n"));
    assert!(out.ends_with("overall: ok\n"));
    assert!(stderr(&o).contains("time fedosov:"));
}

#[test]
fn passing_scenarios_exit_zero() {
    for f in [
        "moyal.scn",
        "gauge.scn",
        "suites.scn",
        "jets_a.scn",
        "jets_b.scn",
    ] {
        let o = run(f, &[]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{f}: {}{}",
            stdout(&o),
            stderr(&o)
        );
        assert!(!stdout(&o).contains("FAILED"));
    }
}

#[test]
fn non_closed_b_names_first_term_of_db() {
    let o = run("non_closed_b.scn", &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("validation error: line 5"), "{err}");
    assert!(
        err.contains("not closed") && err.contains("dx(1,2,3) = 1/1+0/1*i h^0 x^(0,0,0)"),
        "{err}"
    );
    assert!(stdout(&o).is_empty());
}

#[test]
fn non_antisymmetric_pi_is_rejected() {
    let o = run("broken_pi.scn", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not antisymmetric"), "{}", stderr(&o));
}

#[test]
fn failed_check_exits_one_with_report() {
    let o = run("bad_cocycle.scn", &[]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("triple_phase: 1 terms; first:"), "{out}");
    assert!(out.ends_with("overall: FAILED\n"));
}

#[test]
fn parse_errors_exit_two() {
    let dir = std::env::temp_dir().join(format!("star-forge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cases = [
        (
            "unknown_kind.scn",
            "[kontsevich]\n",
            "unknown scenario kind",
        ),
        ("bad_series.scn", "[moyal]\npi 1 2 = 1 q^2\n", "line 2"),
        (
            "bad_key.scn",
            "[ode]\npi 1 2 = 1 h^1\n",
            "not used by [ode]",
        ),
        (
            "big_profile.scn",
            "[moyal]\nprofile = 6,9,6,2\npi 1 2 = 1 h^1\n",
            "Dx ≤ 8",
        ),
    ];
    for (name, text, needle) in cases {
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        let o = star_forge(&["run", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{name}");
        assert!(stderr(&o).contains(needle), "{name}: {}", stderr(&o));
    }
    let o = star_forge(&["run", dir.join("missing.scn").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn profile_override() {
    let o = run("moyal.scn", &["--profile", "4,3,4,2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("profile: 4,3,4,2"));
    let o = run("moyal.scn", &["--profile", "20,3,4,2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run("moyal.scn", &["--profile", "4,3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    let a = run("jets_a.scn", &[]);
    let b = run("jets_a.scn", &[]);
    assert_eq!(a.stdout, b.stdout);
    let a = run("suites.scn", &["--json"]);
    let b = run("suites.scn", &["--json"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_mirror() {
    let o = run("moyal.scn", &["--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    let secs = v["sections"].as_array().unwrap();
    assert_eq!(secs.len(), 3);
    assert_eq!(secs[0]["name"], "moyal");
    assert_eq!(secs[0]["checks"][0]["name"], "assoc_residual");
    assert_eq!(secs[0]["checks"][0]["terms"], 0);

    let o = run("bad_cocycle.scn", &["--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], false);
}

#[test]
fn selftest_passes_and_is_deterministic() {
    let a = star_forge(&["selftest"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    let out = stdout(&a);
    for name in ["moyal", "fedosov", "profile-stability"] {
        assert!(
            out.lines()
                .any(|l| l.starts_with(name) && l.ends_with("PASS")),
            "{out}"
        );
    }
    let err = stderr(&a);
    assert_eq!(
        err.lines().filter(|l| l.starts_with("time ")).count(),
        10,
        "{err}"
    );
    let b = star_forge(&["selftest"]);
    assert_eq!(a.stdout, b.stdout);
}
