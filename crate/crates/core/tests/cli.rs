use std::path::Path;
use std::process::{Command, Output};

use qkdlab::bell::TableEntry;
use qkdlab::verify::default_table;

fn qkdlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qkdlab")).args(args).output().expect("spawn qkdlab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn decompose_prints_the_regrouping() {
    let o = qkdlab(&["decompose", "--first", "phi+", "--second", "psi+", "--from", "seq", "--to", "crossed"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "|Φ⁺⟩12|Ψ⁺⟩34 =\n    +1/2 |Φ⁺⟩13|Ψ⁺⟩24\n    +1/2 |Φ⁻⟩13|Ψ⁻⟩24\n    +1/2 |Ψ⁺⟩13|Φ⁺⟩24\n    +1/2 |Ψ⁻⟩13|Φ⁻⟩24\n"
    );

    let same = qkdlab(&["decompose", "--first", "phi+", "--second", "psi+", "--from", "seq", "--to", "seq"]);
    assert_eq!(stdout(&same).lines().nth(1), Some("    +1 |Φ⁺⟩12|Ψ⁺⟩34"));
}

#[test]
fn decompose_all_as_json() {
    let o = qkdlab(&["decompose", "--all", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let entries: Vec<TableEntry> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(entries.len(), 16);
    for e in &entries {
        assert_eq!(e.decomposition.terms.len(), 4);
        for t in &e.decomposition.terms {
            assert_eq!(t.product.first.xor(t.product.second), e.first.xor(e.second));
        }
    }
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["decompose", "--first", "chi+", "--second", "psi+"][..],
        &["decompose", "--first", "phi+", "--second", "psi+", "--to", "diagonal"],
        &["verify", "--bogus"],
        &["simulate", "--protocol", "p2", "--n", "10"],
        &["simulate", "--protocol", "p9", "--seed", "1"],
        &["sweep", "--protocol", "p2", "--n", "10", "--seed", "1"],
    ] {
        assert_eq!(qkdlab(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn verify_passes_and_catches_a_sign_flip() {
    let o = qkdlab(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().all(|l| !l.starts_with("FAIL")));
    assert!(text.contains("psi+,psi-"));
    assert!(text.ends_with("40/40 cases pass\n"));

    let dir = tempfile::tempdir().unwrap();
    let mut table = default_table();
    let term = &mut table[9].decomposition.terms[1];
    term.coefficient = -term.coefficient;
    let file = dir.path().join("flipped.json");
    std::fs::write(&file, serde_json::to_vec(&table).unwrap()).unwrap();

    let o = qkdlab(&["verify", "--table", path(&file)]);
    assert_eq!(o.status.code(), Some(1));
    let fails: Vec<String> = stdout(&o).lines().filter(|l| l.starts_with("FAIL")).map(String::from).collect();
    assert_eq!(fails.len(), 1);
    assert!(fails[0].starts_with("FAIL psi+,phi- seq->crossed"), "{}", fails[0]);
}

#[test]
fn simulate_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let missing = qkdlab(&["report", "--out", path(&out)]);
    assert_eq!(missing.status.code(), Some(2));

    let o = qkdlab(&["simulate", "--protocol", "p2", "--n", "20000", "--f", "1", "--seed", "5", "--out", path(&out), "--transcript"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("REFUTED"));

    let transcript = std::fs::read_to_string(out.join("transcript.jsonl")).unwrap();
    assert_eq!(transcript.lines().count(), 20_000);
    let first: serde_json::Value = serde_json::from_str(transcript.lines().next().unwrap()).unwrap();
    let keys: Vec<&str> = first.as_object().unwrap().keys().map(String::as_str).collect();
    let mut expected = vec![
        "block_index", "alice_labels", "alice_pairing", "role", "eve_action", "eve_outcome", "bob_outcome", "detected",
    ];
    expected.sort();
    let mut keys = keys;
    keys.sort();
    assert_eq!(keys, expected);

    let r = qkdlab(&["report", "--out", path(&out)]);
    assert_eq!(r.status.code(), Some(0));
    let md = stdout(&r);
    assert!(md.contains("REFUTED"));
    assert!(md.contains("| GV_measure_resend | 26.00% |"));
    assert_eq!(std::fs::read_to_string(out.join("report.md")).unwrap(), md);
}

#[test]
fn attack_file_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let attack = dir.path().join("attack.toml");
    std::fs::write(&attack, "f = 1.0\nseed = 12\npolicy = \"seq\"\n").unwrap();
    let out = dir.path().join("a");
    let o = qkdlab(&["simulate", "--protocol", "p2", "--n", "5000", "--attack", path(&attack), "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["seed"], 12);
    assert_eq!(report["config"]["policy"], "seq");
    assert_eq!(report["attacked_blocks"], 5000);

    let config = dir.path().join("campaign.json");
    std::fs::write(&config, r#"{"protocol":"POP","n_blocks":3000,"f":1.0,"seed":3,"n_qubits":8}"#).unwrap();
    let out = dir.path().join("b");
    let o = qkdlab(&["simulate", "--config", path(&config), "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["pop"]["n_qubits"], 8);

    std::fs::write(&config, r#"{"protocol":"P2","n_blocks":10,"seed":3,"typo":1}"#).unwrap();
    assert_eq!(qkdlab(&["simulate", "--config", path(&config), "--out", path(&out)]).status.code(), Some(2));
}

#[test]
fn sweep_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = qkdlab(&[
        "sweep", "--protocol", "p2", "--n", "4000", "--seed", "2", "--f-grid", "0.25,0.5,1", "--out", path(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv, stdout(&o));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("param,detection_rate,ci_lo,ci_hi,eve_acc,i_ae_emp,i_ae_analytic,qber"));
    assert_eq!(lines.count(), 3);

    let pop = qkdlab(&[
        "sweep", "--protocol", "pop", "--n", "2000", "--f", "1", "--seed", "2", "--n-grid", "4,8", "--out", path(dir.path()),
    ]);
    assert_eq!(pop.status.code(), Some(0));
    let odd = qkdlab(&["sweep", "--protocol", "pop", "--n", "10", "--seed", "2", "--n-grid", "5", "--out", path(dir.path())]);
    assert_eq!(odd.status.code(), Some(2));
}

#[test]
fn analyze_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = qkdlab(&["analyze", "--points", "11", "--format", "csv", "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("f,i_ab,i_ae,margin\n0.0,1.0,0.0,1.0\n"));
    assert_eq!(text.lines().count(), 12);

    let j = qkdlab(&["analyze", "--format", "json", "--out", path(dir.path())]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert!((v["threshold"]["f_star"].as_f64().unwrap() - 0.493875).abs() < 1e-5);
    assert_eq!(v["reference"][0]["e_max"], 0.11);
    assert!(dir.path().join("threshold.json").exists());
}
