//! Runs the built binary against the shared fixtures.
#![allow(dead_code)]

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

pub const NOW: &str = "2024-01-01T00:00:00Z";

pub fn cli_fixture(name: &str) -> String {
    path(&format!("tests/fixtures/{name}"))
}

pub fn core_fixture(name: &str) -> String {
    path(&format!("../core/tests/fixtures/{name}"))
}

fn path(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(rel).display().to_string()
}

/// Runs `kbqa` with `args`, feeding `stdin` when given. The config
/// variable is cleared unless set through `env`.
pub fn kbqa_with(args: &[&str], stdin: Option<&str>, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_kbqa"));
    cmd.args(args).env_remove("SYGMA_CONFIG");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
    let mut child = cmd.spawn().expect("binary starts");
    {
        let mut pipe = child.stdin.take().expect("stdin is piped");
        if let Some(text) = stdin {
            pipe.write_all(text.as_bytes()).expect("stdin accepts input");
        }
    }
    child.wait_with_output().expect("binary finishes")
}

pub fn kbqa(args: &[&str]) -> Output {
    kbqa_with(args, None, &[])
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

/// One invocation per subcommand and output format, all with a fixed now.
pub fn determinism_cases() -> Vec<Vec<String>> {
    let amr = cli_fixture("cold_war_president.amr");
    let lex = core_fixture("lexicon.json");
    let bad_lex = core_fixture("lexicon_corrupted.json");
    let store = core_fixture("kb.nt");
    let data = core_fixture("dataset.jsonl");
    let rq = cli_fixture("douglas_bravo.rq");
    let gold = cli_fixture("cold_war_president.gold.json");
    let mut cases: Vec<Vec<&str>> = vec![
        vec!["parse", "--amr", &amr],
        vec!["translate", "--amr", &amr],
        vec!["ground", "--amr", &amr, "--lexicon", &lex],
        vec!["ground", "--amr", &amr, "--gold", &gold],
        vec!["emit", "--amr", &amr, "--lexicon", &lex],
        vec!["run", "--amr", &amr, "--lexicon", &lex, "--store", &store],
        vec!["run", "--input", &rq, "--store", &store],
        vec!["eval", "--gold", &data, "--lexicon", &bad_lex, "--store", &store],
        vec!["eval", "--gold", &data, "--lexicon", &bad_lex, "--store", &store, "--override", "GT_EL,GT_RL,GT_KB_LAMBDA"],
        vec!["categorize", "--input", &rq],
        vec!["categorize", "--gold", &data],
    ];
    let mut json: Vec<Vec<&str>> = cases.iter().map(|c| [c.as_slice(), &["--format", "json"]].concat()).collect();
    cases.append(&mut json);
    cases
        .into_iter()
        .map(|c| c.iter().map(|s| s.to_string()).chain(["--now".into(), NOW.into()]).collect())
        .collect()
}
