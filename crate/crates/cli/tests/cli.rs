// SPDX-License-Identifier: Apache-2.0

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(ws: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xorpvss")).arg("--workspace").arg(ws).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

/// Toy group, keys a = (4, 7, 2), F(x) = 7 + 3x, reconstructor key 5.
fn toy_workspace() -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    let ws = dir.path();
    let o = run(ws, &["params", "--fixed-toy"]);
    assert_eq!(stdout(&o), "OK params p=0x17 q=0x0b g=0x02");
    for (i, sk) in [(1, "4"), (2, "7"), (3, "2")] {
        let o = run(ws, &["keygen", "--index", &i.to_string(), "--sk", sk]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(stdout(&run(ws, &["keygen", "--index", "1", "--sk", "4"])), "OK keygen pk=0x10");
    let recon = ws.join("recon.json");
    assert_eq!(code(&run(ws, &["keygen", "--out", recon.to_str().unwrap(), "--sk", "5"])), 0);
    let o = run(ws, &["deal", "--n", "3", "--coeffs", "7,3"]);
    assert!(stdout(&o).starts_with("OK dealt k=2 n=3 board="), "{}", stdout(&o));
    dir
}

#[test]
fn toy_workflow() {
    let dir = toy_workspace();
    let ws = dir.path();
    for (i, s) in [(1, 10), (2, 2), (3, 5)] {
        let o = run(ws, &["verify", "--index", &i.to_string()]);
        assert_eq!((code(&o), stdout(&o)), (0, format!("OK share={s} verified")));
        assert_eq!(stdout(&run(ws, &["decrypt", "--index", &i.to_string()])), format!("OK share={s}"));
    }

    let o = run(ws, &["membership", "--index", "2", "--challenge-seed", "1"]);
    assert_eq!((code(&o), stdout(&o)), (0, "OK membership index=2 accepted".into()));
    assert!(ws.join("transcripts/membership-2.json").exists());

    let recon = ws.join("recon.json");
    let recon = recon.to_str().unwrap();
    let o = run(ws, &["reconstruct", "--indices", "2,3", "--reconstructor-key", recon]);
    assert_eq!((code(&o), stdout(&o)), (0, "OK secret=7".into()));
    let o = run(ws, &["reconstruct", "--indices", "3", "--reconstructor-key", recon]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("REJECT"), "{}", stdout(&o));
}

#[test]
fn disputes_and_replay() {
    let dir = toy_workspace();
    let ws = dir.path();

    let o = run(ws, &["dispute", "--index", "1"]);
    assert_eq!((code(&o), stdout(&o)), (0, "VERDICT resolved".into()));

    let o = run(ws, &["dispute", "--index", "1", "--dealer-cheat", "lambda1:6"]);
    assert_eq!((code(&o), stdout(&o)), (1, "VERDICT dealer_lied".into()));
    let transcript = ws.join("transcripts/dispute-1.json");
    let o = run(ws, &["dispute", "--replay", transcript.to_str().unwrap()]);
    assert_eq!((code(&o), stdout(&o)), (1, "VERDICT dealer_lied".into()));

    // A forged verdict no longer matches the derivation.
    let text = fs::read_to_string(&transcript).unwrap().replace("dealer_lied", "participant_lied");
    fs::write(&transcript, text).unwrap();
    let o = run(ws, &["dispute", "--replay", transcript.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("REJECT replay derived=dealer_lied"), "{}", stdout(&o));

    let o = run(ws, &["dispute", "--index", "2", "--participant-cheat", "3"]);
    assert_eq!(stdout(&o), "VERDICT participant_lied");
    let o = run(ws, &["dispute", "--index", "3", "--dealer-cheat", "masked:4"]);
    assert_eq!(stdout(&o), "VERDICT dealer_lied");
    let o = run(ws, &["dispute", "--index", "3", "--participant-cheat", "masked:4"]);
    assert_eq!(stdout(&o), "VERDICT participant_lied");
}

#[test]
fn deal_is_reproducible() {
    let dir = toy_workspace();
    let ws = dir.path();
    let first = fs::read(ws.join("board.json")).unwrap();
    assert_eq!(code(&run(ws, &["deal", "--n", "3", "--coeffs", "7,3"])), 0);
    assert_eq!(fs::read(ws.join("board.json")).unwrap(), first);

    let seeded = |seed: &str| {
        assert_eq!(code(&run(ws, &["deal", "--n", "3", "--secret", "7", "--k", "2", "--seed", seed])), 0);
        fs::read(ws.join("board.json")).unwrap()
    };
    assert_eq!(seeded("11"), seeded("11"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ws = dir.path();
    assert_eq!(code(&run(ws, &["params", "--q-bits", "1", "--seed", "1"])), 2);
    assert_eq!(code(&run(ws, &["params", "--q-bits", "32"])), 2, "generation needs a seed");
    assert_eq!(code(&run(ws, &["verify", "--index", "1"])), 2, "no params or board yet");

    fs::write(ws.join(".xorpvss.lock"), "1\n").unwrap();
    let o = run(ws, &["params", "--fixed-toy"]);
    assert_eq!(code(&o), 4);
    fs::remove_file(ws.join(".xorpvss.lock")).unwrap();
    assert_eq!(code(&run(ws, &["params", "--fixed-toy"])), 0);
    assert!(!ws.join(".xorpvss.lock").exists());
}

#[test]
fn generated_params_workflow() {
    let dir = tempfile::tempdir().unwrap();
    let ws = dir.path();
    assert_eq!(code(&run(ws, &["params", "--q-bits", "64", "--seed", "3"])), 0);
    for i in 1..=4 {
        assert_eq!(code(&run(ws, &["keygen", "--index", &i.to_string(), "--seed", &(40 + i).to_string()])), 0);
    }
    let recon = ws.join("r.json");
    let recon = recon.to_str().unwrap();
    assert_eq!(code(&run(ws, &["keygen", "--out", recon, "--seed", "99"])), 0);
    let secret = "1234567890123";
    assert_eq!(code(&run(ws, &["deal", "--n", "4", "--secret", secret, "--k", "3", "--seed", "5"])), 0);
    for i in 1..=4 {
        assert_eq!(code(&run(ws, &["verify", "--index", &i.to_string()])), 0);
    }
    assert_eq!(stdout(&run(ws, &["dispute", "--index", "4"])), "VERDICT resolved");
    let o = run(ws, &["reconstruct", "--indices", "4,1,3", "--reconstructor-key", recon]);
    assert_eq!(stdout(&o), format!("OK secret={secret}"));
}

#[test]
fn simulate_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let ws = dir.path();
    let config = ws.join("honest.json");
    fs::write(
        &config,
        r#"{"params": {"source": "fixed_toy"}, "k": 2, "n": 3, "secret": {"explicit": "07"}, "seed": 1,
            "strategies": [{"strategy": "participant_fake_alpha", "target": 2, "substitution": "exhaust_all"}]}"#,
    )
    .unwrap();
    let o = run(ws, &["simulate", "--config", config.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("OK simulate disputes="), "{}", stdout(&o));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(ws.join("reports/honest.json")).unwrap()).unwrap();
    assert_eq!(report["reconstruction"]["matches"], true);
    assert_eq!(report["detection"]["disputes"], 10);
    // Small-group collisions may wrongly blame the dealer for some alpha'.
    let d = &report["detection"];
    let tally = ["correct", "false_accusations", "missed", "degenerate"].map(|k| d[k].as_u64().unwrap());
    assert_eq!(tally.iter().sum::<u64>(), 10, "{d}");
    assert!(tally[0] >= 8, "{d}");

    let out = ws.join("elsewhere.json");
    assert_eq!(code(&run(ws, &["simulate", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])), 0);
    assert_eq!(fs::read(&out).unwrap(), fs::read(ws.join("reports/honest.json")).unwrap());

    fs::write(&config, r#"{"params": {"source": "fixed_toy"}, "k": 4, "n": 3, "secret": "random", "seed": 1}"#)
        .unwrap();
    assert_eq!(code(&run(ws, &["simulate", "--config", config.to_str().unwrap()])), 2);
}
