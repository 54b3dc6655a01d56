//! Runs the `rwval` binary end to end.

use std::path::PathBuf;
use std::process::{Command, Output};

fn rwval(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rwval"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.json"))
        .display()
        .to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn check_binomial_is_efficient() {
    let o = rwval(&["check", &fixture("binomial")]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("efficient: yes"));
    assert!(s.contains("complete: yes"));
    assert!(s.contains("q: u=1/3 d=2/3"));
}

#[test]
fn price_binomial_call() {
    let s = stdout(&rwval(&["price", &fixture("binomial"), "--claim", "call1"]));
    assert!(s.contains("risk-neutral 1/3, real-world 1/3, equal"), "{s}");
}

#[test]
fn insider_is_not_sensitive() {
    let o = rwval(&["check", &fixture("insider"), "--strict"]);
    assert_eq!(o.status.code(), Some(2));
    let s = stdout(&o);
    assert!(
        s.contains("sensitive: no (t=0, information block {up-g, down-g}"),
        "{s}"
    );
}

#[test]
fn exit_codes() {
    assert_eq!(
        rwval(&["check", &fixture("binomial"), "--strict"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        rwval(&["check", &fixture("dominated"), "--strict"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        rwval(&["check", &fixture("dominated")]).status.code(),
        Some(0)
    );
    assert_eq!(
        rwval(&["check", "/nonexistent.json"]).status.code(),
        Some(1)
    );
    let o = rwval(&["price", &fixture("binomial"), "--claim", "put9"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown claim"));
    assert_eq!(
        rwval(&["check", &fixture("binomial"), "--numeraire", "gold"])
            .status
            .code(),
        Some(1)
    );
    assert_ne!(rwval(&["frobnicate"]).status.code(), Some(0));
}

#[test]
fn generated_crr_matches_fixture() {
    let s = stdout(&rwval(&[
        "generate",
        "crr",
        "--periods",
        "1",
        "--u",
        "2",
        "--d",
        "0.5",
        "--r",
        "0",
        "--p",
        "0.5",
    ]));
    assert_eq!(s, std::fs::read_to_string(fixture("binomial")).unwrap());
    let s = stdout(&rwval(&["generate", "insider", "--accuracy", "0.5"]));
    assert_eq!(
        s,
        std::fs::read_to_string(fixture("independent-signal")).unwrap()
    );
}

#[test]
fn json_is_deterministic_given_seed() {
    let gen = |seed: &str| {
        stdout(&rwval(&[
            "generate", "random", "--seed", seed, "--signal", "adapted",
        ]))
    };
    assert_eq!(gen("5"), gen("5"));
    let dir = std::env::temp_dir().join(format!("rwval-seed-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("random.json");
    std::fs::write(&path, gen("5")).unwrap();
    let p = path.display().to_string();
    let a = stdout(&rwval(&["check", &p, "--format", "json", "--seed", "5"]));
    let b = stdout(&rwval(&["check", &p, "--format", "json", "--seed", "5"]));
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["seed"], 5);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn float_mode_agrees() {
    let text = std::fs::read_to_string(fixture("binomial"))
        .unwrap()
        .replace("\"rational\"", "\"float\"");
    let dir = std::env::temp_dir().join(format!("rwval-float-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("binomial.json");
    std::fs::write(&path, text).unwrap();
    let s = stdout(&rwval(&["check", &path.display().to_string()]));
    assert!(
        s.contains("efficient: yes") && s.contains("complete: yes"),
        "{s}"
    );
    std::fs::remove_dir_all(dir).ok();
}
