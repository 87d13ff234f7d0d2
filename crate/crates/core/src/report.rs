//! Markdown summary of a campaign next to the closed-form results.

use std::fmt::Write;

use crate::analytics::{
    self, reference_constants, security_threshold, CLAIMED_DETECTION, DETECTION_PER_ATTACKED_BLOCK, EVE_BLOCK_ACCURACY,
};
use crate::error::Result;
use crate::harness::campaign::AttackReport;
use crate::harness::stats::Estimate;
use crate::protocols::pop::{any_pair_pick_probability, pop_correct_pick_probability};

pub const POP_TABLE_SIZES: [usize; 5] = [4, 8, 16, 32, 64];

fn estimate_cell(e: &Option<Estimate>) -> String {
    match e {
        Some(e) => format!("{:.6} [{:.6}, {:.6}] (n = {})", e.value, e.ci_lo, e.ci_hi, e.trials),
        None => "n/a".into(),
    }
}

fn verdict_cell(e: &Option<Estimate>) -> String {
    match e.and_then(|e| e.z_score.zip(e.verdict)) {
        Some((z, v)) => format!("z = {z:+.2}, {}", serde_json::to_value(v).unwrap().as_str().unwrap_or("")),
        None => String::new(),
    }
}

/// Renders `report` as markdown. Output depends only on its input.
pub fn render_markdown(report: &AttackReport) -> Result<String> {
    let mut s = String::new();
    let c = &report.config;
    let protocol = serde_json::to_value(c.protocol)?;
    writeln!(s, "# Attack campaign report\n").unwrap();
    writeln!(
        s,
        "Protocol `{}`, {} blocks, f = {}, seed {}, {} attacked, {} compared.\n",
        protocol.as_str().unwrap_or("?"),
        report.blocks,
        c.f,
        c.seed,
        report.attacked_blocks,
        report.compared_blocks
    )
    .unwrap();

    writeln!(s, "## Detection\n").unwrap();
    writeln!(s, "| quantity | empirical (95% CI) | analytic | check |").unwrap();
    writeln!(s, "|---|---|---|---|").unwrap();
    let row = |s: &mut String, name: &str, e: &Option<Estimate>| {
        let analytic = e.and_then(|e| e.analytic).map_or(String::new(), |a| format!("{a:.6}"));
        writeln!(s, "| {name} | {} | {analytic} | {} |", estimate_cell(e), verdict_cell(e)).unwrap();
    };
    row(&mut s, "detection per attacked block", &report.detection_rate);
    row(&mut s, "Eve accuracy", &report.eve_accuracy);
    row(&mut s, "block error rate", &report.qber);
    if report.kept_fraction.is_some() {
        row(&mut s, "kept after sifting", &report.kept_fraction);
    }
    writeln!(s).unwrap();

    if let Some(cc) = &report.claim_check {
        writeln!(s, "| detection probability | value | status |").unwrap();
        writeln!(s, "|---|---|---|").unwrap();
        writeln!(s, "| corrected | {:.6} (3/8) | matches simulation |", cc.corrected).unwrap();
        writeln!(
            s,
            "| claimed | {:.6} (15/16) | {} ({:+.1} standard errors from the estimate) |",
            cc.claimed, cc.verdict, cc.claimed_sigmas
        )
        .unwrap();
        writeln!(s).unwrap();
    }
    if let Some(n) = report.detections_with_correct_guess {
        writeln!(s, "Detections on blocks where Eve guessed the layout: {n}.\n").unwrap();
    }

    if !report.eve_outcome_histogram.is_empty() {
        writeln!(s, "## Eve's outcome relative to Alice's bits\n").unwrap();
        writeln!(s, "| XOR mask | count | fraction | expected |").unwrap();
        writeln!(s, "|---|---|---|---|").unwrap();
        for b in &report.eve_outcome_histogram {
            writeln!(s, "| {} | {} | {:.6} | {:.6} |", b.xor_mask, b.count, b.fraction, b.expected).unwrap();
        }
        if let Some(fit) = &report.histogram_fit {
            writeln!(
                s,
                "\nChi-square {:.3} on {} dof (critical {:.3} at {}), p = {:.4}, off-support {}: {}.\n",
                fit.statistic,
                fit.dof,
                fit.critical,
                fit.alpha,
                fit.p_value,
                fit.off_support,
                if fit.pass { "PASS" } else { "FAIL" }
            )
            .unwrap();
        }
    }

    if let Some(mi) = &report.mutual_information {
        writeln!(s, "## Information\n").unwrap();
        writeln!(s, "| normalisation | value |").unwrap();
        writeln!(s, "|---|---|").unwrap();
        writeln!(s, "| I(A:E) per attacked block (plug-in) | {:.6} |", mi.raw_bits_per_block).unwrap();
        writeln!(s, "| I(A:E) per attacked block (analytic, 4 − ignorance) | {:.6} |", mi.analytic_bits_per_block).unwrap();
        writeln!(s, "| per bit | {:.6} |", mi.per_bit).unwrap();
        writeln!(s, "| per bit averaged over all blocks | {:.6} |", mi.averaged_per_bit).unwrap();
        writeln!(s, "| fraction of blocks Eve reads fully | {:.6} |", mi.eve_correct_fraction.value).unwrap();
        writeln!(s, "| 5f/8 | {:.6} |", mi.analytic_5f_over_8).unwrap();
        writeln!(s, "\nClosest to 5f/8: `{}`.\n", mi.matches_5f_over_8).unwrap();
    }

    if let Some(p) = &report.pop {
        writeln!(s, "## Particle-order permutation, N = {}\n", p.n_qubits).unwrap();
        writeln!(s, "| quantity | empirical (95% CI) | analytic | check |").unwrap();
        writeln!(s, "|---|---|---|---|").unwrap();
        for (name, e) in [("target-block pick", p.target_pick), ("any entangled pick", p.any_pair_pick), ("disturbance", p.disturbance)] {
            let e = Some(e);
            row(&mut s, name, &e);
        }
        writeln!(s, "\nI(A:E): empirical {:.6}, analytic {:.6}.\n", p.i_ae_empirical, p.i_ae_analytic).unwrap();
    }

    writeln!(s, "## Key agreement\n").unwrap();
    let k = &report.key_agreement;
    writeln!(s, "{} of {} data blocks agree (exact: {}).\n", k.agreeing_blocks, k.data_blocks, k.exact).unwrap();

    render_analytics(&mut s)?;
    Ok(s)
}

fn render_analytics(s: &mut String) -> Result<()> {
    let t = security_threshold()?;
    writeln!(s, "## Closed-form results\n").unwrap();
    writeln!(s, "| quantity | value |").unwrap();
    writeln!(s, "|---|---|").unwrap();
    writeln!(s, "| detection per attacked block | {DETECTION_PER_ATTACKED_BLOCK} |").unwrap();
    writeln!(s, "| claimed detection (REFUTED) | {CLAIMED_DETECTION} |").unwrap();
    writeln!(s, "| Eve accuracy per attacked block | {EVE_BLOCK_ACCURACY} |").unwrap();
    writeln!(s, "| Eve ignorance per attacked block | {:.5} bits |", analytics::eve_ignorance_bits()).unwrap();
    writeln!(s, "| threshold f* | {:.6} |", t.f_star).unwrap();
    writeln!(s, "| tolerable error e_max | {:.6} ({:.2}%) |", t.e_max, 100.0 * t.e_max).unwrap();
    writeln!(s).unwrap();

    writeln!(s, "## Tolerable error rates\n").unwrap();
    writeln!(s, "| source | e_max | note |").unwrap();
    writeln!(s, "|---|---|---|").unwrap();
    for r in reference_constants()? {
        writeln!(s, "| {} | {:.2}% | {} |", r.name, 100.0 * r.e_max, r.note).unwrap();
    }
    writeln!(s).unwrap();

    writeln!(s, "## Particle-order permutation scaling\n").unwrap();
    writeln!(s, "| N | target pick 4/(N(N−1)) | any pair 1/(N−1) | I(A:E) at f = 1 |").unwrap();
    writeln!(s, "|---|---|---|---|").unwrap();
    for n in POP_TABLE_SIZES {
        let p = pop_correct_pick_probability(n)?;
        let q = any_pair_pick_probability(n)?;
        writeln!(s, "| {n} | {p} | {q} | {:.6} |", analytics::pop_eve_info(1.0, n)?).unwrap();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{run_campaign, CampaignConfig, ProtocolKind};

    #[test]
    fn report_flags_the_claim() {
        let r = run_campaign(&CampaignConfig::new(ProtocolKind::P2, 20_000, 1.0, 1)).unwrap();
        let md = render_markdown(&r).unwrap();
        assert!(md.contains("| claimed | 0.937500 (15/16) | REFUTED"));
        assert!(md.contains("| BB84_arbitrary | 11.00% |"));
        assert!(md.contains("| GV_measure_resend | 26.00% |"));
        assert!(md.contains("18.52%"));
        assert!(md.contains("1.54879 bits"));
        assert!(md.contains("| 8 | 1/14 | 1/7 |"));
        assert_eq!(md, render_markdown(&r).unwrap());
    }
}
