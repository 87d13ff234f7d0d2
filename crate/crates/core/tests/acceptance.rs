//! Acceptance suite. Runs without the libtest harness so that each criterion
//! prints exactly one PASS/FAIL line; exits non-zero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use qkdlab::analytics::{eve_ignorance_bits, margin, pop_eve_info, pop_eve_info_exact, security_threshold};
use qkdlab::bell::{swap_decompose, BellLabel, Pairing};
use qkdlab::harness::stats::Verdict;
use qkdlab::harness::{run_campaign, CampaignConfig, ProtocolKind};
use qkdlab::oracle::{build_pair_product, outcome_probabilities, BellProductBasis};
use qkdlab::verify::{check_table, default_table, reference_expansions, two_step_distribution, verify};
use qkdlab::Dyadic;

use BellLabel::{PhiMinus, PhiPlus, PsiMinus, PsiPlus};
use Pairing::{Crossed, Seq};

const SIGMAS: f64 = 4.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn c1_swap_identities() -> Outcome {
    let start = Instant::now();
    let table = check_table(&default_table());
    let table_pass = table.iter().filter(|c| c.pass).count();
    let reference = reference_expansions()
        .into_iter()
        .filter(|(_, p, expected)| {
            swap_decompose(p.first, p.second, p.pairing, p.pairing.other()).canonical() == *expected
        })
        .count();
    let suite = verify();
    let elapsed = start.elapsed();
    outcome(
        table.len() == 32 && table_pass == 32 && reference == 4 && suite.all_pass() && elapsed < Duration::from_secs(1),
        format!("{table_pass}/32 oracle cases, {reference}/4 expansions term-for-term, {:?}", elapsed),
    )
}

fn c2_forbidden_outcomes() -> Outcome {
    let eve: Vec<_> =
        outcome_probabilities(&build_pair_product(PhiPlus, PsiPlus, Seq), &BellProductBasis::new(Crossed));
    let p_eve = eve.iter().find(|(k, _)| *k == (PsiPlus, PsiMinus)).map_or(Dyadic::ZERO, |(_, p)| *p);
    let tree = two_step_distribution((PhiPlus, PsiPlus), Seq, Crossed, Seq);
    let p_bob = tree.get(&(PsiPlus, PhiMinus)).copied().unwrap_or(Dyadic::ZERO);
    let total: Dyadic = tree.values().copied().sum();
    outcome(
        p_eve.is_zero() && p_bob.is_zero() && total == Dyadic::ONE,
        format!("P(eve psi+,psi-) = {p_eve}, P(bob psi+,phi-) = {p_bob}, tree mass {total}"),
    )
}

fn c3_c4_protocol2() -> (Outcome, Outcome) {
    let start = Instant::now();
    let r = run_campaign(&CampaignConfig::new(ProtocolKind::P2, 1_000_000, 1.0, 20_240_601)).expect("campaign");
    let elapsed = start.elapsed();

    let d = r.detection_rate.expect("attacked decoys");
    let claim = r.claim_check.as_ref().expect("claim check");
    let c3 = outcome(
        d.within_sigmas(SIGMAS)
            && !d.contains(15.0 / 16.0)
            && claim.verdict == "REFUTED"
            && !claim.claimed_inside_ci
            && elapsed < Duration::from_secs(30),
        format!(
            "detection {:.6} (z = {:+.2}, n = {}), CI [{:.6}, {:.6}] excludes 15/16: {}, {:?}",
            d.value,
            d.z_score.unwrap(),
            d.trials,
            d.ci_lo,
            d.ci_hi,
            claim.verdict,
            elapsed
        ),
    );

    let e = r.eve_accuracy.expect("attacked blocks");
    let fit = r.histogram_fit.expect("histogram");
    let ignorance = eve_ignorance_bits();
    let c4 = outcome(
        e.within_sigmas(SIGMAS) && fit.pass && (ignorance - 1.54879).abs() <= 1e-4,
        format!(
            "accuracy {:.6} (z = {:+.2}), chi2 {:.3} < {:.3} off-support {}, ignorance {:.6} bits",
            e.value,
            e.z_score.unwrap(),
            fit.statistic,
            fit.critical,
            fit.off_support,
            ignorance
        ),
    );
    (c3, c4)
}

fn c5_threshold() -> Outcome {
    let t = security_threshold().expect("bracket has a sign change");
    let below = margin(t.f_star - 1e-3).unwrap();
    let above = margin(t.f_star + 1e-3).unwrap();
    outcome(
        (t.f_star - 0.493875).abs() <= 1e-5 && (t.e_max - 0.18520).abs() <= 1e-5 && below > 0.0 && above < 0.0,
        format!("f* = {:.6}, e_max = {:.6}, margin {:+.2e} / {:+.2e} around f*", t.f_star, t.e_max, below, above),
    )
}

fn c6_qber_sweep() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for f in [0.25, 0.5, 0.75, 1.0] {
        let r = run_campaign(&CampaignConfig::new(ProtocolKind::P2, 100_000, f, 606)).expect("campaign");
        let q = r.qber.expect("compared blocks");
        let ok = q.analytic == Some(3.0 * f / 8.0) && q.within_sigmas(SIGMAS);
        pass &= ok;
        parts.push(format!("f={f}: {:.5} (z {:+.2})", q.value, q.z_score.unwrap()));
    }
    outcome(pass, parts.join(", "))
}

fn c7_pop_scaling() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [4usize, 8, 16] {
        let mut c = CampaignConfig::new(ProtocolKind::Pop, 100_000, 1.0, 707);
        c.n_qubits = n;
        let r = run_campaign(&c).expect("campaign");
        let p = r.pop.expect("pop stats").target_pick;
        let expected = 4.0 / (n as f64 * (n as f64 - 1.0));
        let ok = p.analytic == Some(expected) && p.within_sigmas(SIGMAS);
        pass &= ok;
        parts.push(format!("N={n}: {:.5} vs {:.5} (z {:+.2})", p.value, expected, p.z_score.unwrap()));
    }
    for n in (4..=64).step_by(2) {
        for (num, den) in [(0u64, 1u64), (1, 3), (1, 2), (5, 8), (1, 1)] {
            let f = Ratio::new(num, den);
            let exact = pop_eve_info_exact(f, n).unwrap();
            pass &= exact == Ratio::new(5 * num, den * (n * (n - 1)) as u64);
            let float = pop_eve_info(num as f64 / den as f64, n).unwrap();
            pass &= (float - *exact.numer() as f64 / *exact.denom() as f64).abs() <= 1e-15;
        }
    }
    parts.push("closed form exact for N = 4..64".into());
    outcome(pass, parts.join(", "))
}

fn c8_soundness() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for protocol in [ProtocolKind::P1, ProtocolKind::P2, ProtocolKind::Bb84Epr, ProtocolKind::Pop] {
        let r = run_campaign(&CampaignConfig::new(protocol, 100_000, 0.0, 808)).expect("campaign");
        let k = &r.key_agreement;
        let ok = r.detection_events == 0 && k.exact && k.agreeing_blocks == k.data_blocks && k.data_blocks > 0;
        pass &= ok;
        parts.push(format!("{protocol:?}: {} detections, {}/{} agree", r.detection_events, k.agreeing_blocks, k.data_blocks));
    }
    outcome(pass, parts.join(", "))
}

fn run_simulate(out: &Path) -> std::io::Result<Vec<u8>> {
    let status = Command::new(env!("CARGO_BIN_EXE_qkdlab"))
        .args(["simulate", "--protocol", "p2", "--n", "50000", "--f", "0.5", "--seed", "909", "--out"])
        .arg(out)
        .output()?;
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    std::fs::read(out.join("report.json"))
}

fn c9_determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("tempdir");
    let a = run_simulate(&dir.path().join("a")).expect("first run");
    let b = run_simulate(&dir.path().join("b")).expect("second run");
    let mut c = CampaignConfig::new(ProtocolKind::P2, 50_000, 0.5, 909);
    c.compare_fraction = 0.5;
    let lib = run_campaign(&c).unwrap().to_json().unwrap();
    let verdicts_present = serde_json::from_slice::<serde_json::Value>(&a)
        .map(|v| v["detection_rate"]["verdict"] == serde_json::json!(Verdict::WithinCi))
        .unwrap_or(false);
    outcome(
        a == b && a == lib.as_bytes() && verdicts_present,
        format!("two CLI runs: {} bytes each, identical: {}", a.len(), a == b),
    )
}

fn main() {
    let (c3, c4) = c3_c4_protocol2();
    let results = [
        ("1 swap-identity exactness", c1_swap_identities()),
        ("2 forbidden outcomes", c2_forbidden_outcomes()),
        ("3 detection probability", c3),
        ("4 eve accuracy and ignorance", c4),
        ("5 security threshold", c5_threshold()),
        ("6 qber sweep", c6_qber_sweep()),
        ("7 pop scaling", c7_pop_scaling()),
        ("8 soundness", c8_soundness()),
        ("9 determinism", c9_determinism()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("criterion {name}: {} | {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += !o.pass as usize;
    }
    println!("acceptance: {}/{} criteria pass", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
