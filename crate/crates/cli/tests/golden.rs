//! Committed reports for every fixture. Set `UPDATE_GOLDEN=1` to rewrite them.

use std::fs;
use std::path::PathBuf;

use rwval_cli::commands::{run, Command, Conditioning, Options};
use rwval_cli::report::Format;
use rwval_cli::scenario::parse_scenario;

const FIXTURES: [&str; 7] = [
    "binomial",
    "trinomial",
    "insider",
    "independent-signal",
    "dominated",
    "minimal",
    "crr2",
];

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn commands(has_claim: bool) -> Vec<(&'static str, Command)> {
    let mut v = vec![
        ("check", Command::Check),
        ("emm", Command::Emm),
        ("gop", Command::Gop),
        ("sensitivity", Command::Sensitivity),
        (
            "hypothesis",
            Command::Hypothesis {
                strategy: None,
                conditioning: Conditioning::Ambient,
            },
        ),
    ];
    if has_claim {
        v.push((
            "price",
            Command::Price {
                claim: "call1".into(),
                t: None,
            },
        ));
    }
    v
}

#[test]
fn reports_match_committed_output() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    let expected = dir().join("expected");
    let mut mismatches = Vec::new();
    for name in FIXTURES {
        let text = fs::read_to_string(dir().join(format!("{name}.json"))).unwrap();
        let scenario = parse_scenario(&text).unwrap();
        assert_eq!(
            scenario.emit(),
            text,
            "{name}.json is not in canonical form"
        );
        let has_claim = !scenario.claims.is_empty();
        for (label, command) in commands(has_claim) {
            let out = run(&command, &scenario, &Options::default()).unwrap();
            let mut docs = vec![("txt", out.render(Format::Text))];
            if label == "check" {
                docs.push(("json", out.render(Format::Json)));
            }
            for (ext, got) in docs {
                let path = expected.join(format!("{name}.{label}.{ext}"));
                if update {
                    fs::create_dir_all(&expected).unwrap();
                    fs::write(&path, &got).unwrap();
                    continue;
                }
                let want = fs::read_to_string(&path)
                    .unwrap_or_else(|_| panic!("missing {}", path.display()));
                if want != got {
                    mismatches.push(format!(
                        "{}\n--- expected\n{want}--- got\n{got}",
                        path.display()
                    ));
                }
            }
        }
    }
    assert!(mismatches.is_empty(), "{}", mismatches.join("\n"));
}
