//! Seeded Monte Carlo campaigns and their reports.

use std::io::Write;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::{pop_intercept, EveRecord};
use crate::analytics::{self, CLAIMED_DETECTION, DETECTION_PER_ATTACKED_BLOCK, EVE_BLOCK_ACCURACY};
use crate::error::Result;
use crate::harness::config::{CampaignConfig, ProtocolKind};
use crate::harness::exec::{map_reduce, Execution, Tally};
use crate::harness::stats::{chi_square_fit, plug_in_mutual_information, ChiSquareFit, Estimate};
use crate::protocols::bb84::{epr_round, Basis};
use crate::protocols::pop::PopSequence;
use crate::protocols::protocol1::protocol1_run;
use crate::protocols::protocol2::{fair_coin_pairing, protocol2_prepare_block, run_block, BlockTranscript};
use crate::protocols::{block_from_labels, BlockRole, KeyBits};
use crate::rng::{exact_subset, stream, ATTACK_SELECTION_STREAM, COMPARE_SELECTION_STREAM};

const KEY_STREAM: u64 = u64::MAX - 3;

/// Significance level of the histogram goodness-of-fit test.
pub const HISTOGRAM_ALPHA: f64 = 0.01;

/// Eve's outcome relative to Alice's block, as the XOR of the 4-bit values.
/// Only the identity and the three label-shift masks are reachable.
pub const EXPECTED_MASKS: [(u8, f64); 4] = [(0b0000, 0.625), (0b0101, 0.125), (0b1010, 0.125), (0b1111, 0.125)];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub xor_mask: String,
    pub count: u64,
    pub fraction: f64,
    pub expected: f64,
}

/// The corrected detection probability against the one claimed originally.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimCheck {
    pub claimed: f64,
    pub corrected: f64,
    pub claimed_inside_ci: bool,
    /// Distance of the claimed value from the estimate, in standard errors.
    pub claimed_sigmas: f64,
    pub verdict: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MutualInformation {
    pub samples: u64,
    /// Plug-in `I(A:E)` per attacked 4-bit block.
    pub raw_bits_per_block: f64,
    pub analytic_bits_per_block: f64,
    /// `raw / 4`, per key bit of an attacked block.
    pub per_bit: f64,
    /// `(m/n) · raw / 4`, per key bit averaged over all blocks.
    pub averaged_per_bit: f64,
    /// Fraction of all blocks whose four bits Eve got right.
    pub eve_correct_fraction: Estimate,
    /// `5f/8` with `f = m/n`.
    pub analytic_5f_over_8: f64,
    /// Which of the normalisations above lands closest to `5f/8`.
    pub matches_5f_over_8: String,
}

/// The `I(A:E)` figure compared in sweeps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InformationComparison {
    pub empirical: f64,
    pub analytic: f64,
    pub normalization: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyAgreement {
    pub data_blocks: u64,
    pub agreeing_blocks: u64,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopStats {
    pub n_qubits: usize,
    /// Picks that hit one of the two pairs of the target block: `4/(N(N−1))`.
    pub target_pick: Estimate,
    /// Picks that hit any entangled pair: `1/(N−1)`.
    pub any_pair_pick: Estimate,
    pub disturbance: Estimate,
    pub i_ae_empirical: f64,
    pub i_ae_analytic: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub config: CampaignConfig,
    pub blocks: u64,
    pub attacked_blocks: u64,
    pub compared_blocks: u64,
    pub detection_events: u64,
    /// Per attacked, compared block.
    pub detection_rate: Option<Estimate>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub claim_check: Option<ClaimCheck>,
    pub eve_accuracy: Option<Estimate>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub eve_outcome_histogram: Vec<HistogramBin>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub histogram_fit: Option<ChiSquareFit>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mutual_information: Option<MutualInformation>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub information: Option<InformationComparison>,
    /// Block error rate over all compared blocks.
    pub qber: Option<Estimate>,
    pub key_agreement: KeyAgreement,
    /// Detections on blocks where Eve guessed Alice's layout; always zero.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detections_with_correct_guess: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pop: Option<PopStats>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub kept_fraction: Option<Estimate>,
}

impl AttackReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

pub fn run_campaign(config: &CampaignConfig) -> Result<AttackReport> {
    run_campaign_with(config, Execution::default())
}

pub fn run_campaign_with(config: &CampaignConfig, exec: Execution) -> Result<AttackReport> {
    config.validate()?;
    match config.protocol {
        ProtocolKind::P2 => Ok(protocol2_campaign(config, exec)),
        ProtocolKind::P1 => protocol1_campaign(config),
        ProtocolKind::Bb84Epr => Ok(bb84_campaign(config, exec)),
        ProtocolKind::Pop => Ok(pop_campaign(config, exec)),
    }
}

struct Selection {
    attacked: Vec<bool>,
    compared: Vec<bool>,
}

impl Selection {
    fn new(config: &CampaignConfig) -> Self {
        let n = config.n_blocks as usize;
        Selection {
            attacked: exact_subset(&mut stream(config.seed, ATTACK_SELECTION_STREAM), n, config.f),
            compared: exact_subset(&mut stream(config.seed, COMPARE_SELECTION_STREAM), n, config.compare_fraction),
        }
    }
}

// ---------------------------------------------------------------------------
// Protocol 2

#[derive(Default)]
struct P2Tally {
    blocks: u64,
    sequential_layouts: u64,
    attacked: u64,
    compared: u64,
    compared_attacked: u64,
    detected: u64,
    detected_attacked: u64,
    detected_correct_guess: u64,
    eve_correct: u64,
    data_blocks: u64,
    data_agree: u64,
    masks: [u64; 16],
    joint: [[u64; 16]; 16],
}

impl Tally for P2Tally {
    fn merge(&mut self, o: Self) {
        self.blocks += o.blocks;
        self.sequential_layouts += o.sequential_layouts;
        self.attacked += o.attacked;
        self.compared += o.compared;
        self.compared_attacked += o.compared_attacked;
        self.detected += o.detected;
        self.detected_attacked += o.detected_attacked;
        self.detected_correct_guess += o.detected_correct_guess;
        self.eve_correct += o.eve_correct;
        self.data_blocks += o.data_blocks;
        self.data_agree += o.data_agree;
        for (a, b) in self.masks.iter_mut().zip(o.masks) {
            *a += b;
        }
        for (ra, rb) in self.joint.iter_mut().zip(o.joint) {
            for (a, b) in ra.iter_mut().zip(rb) {
                *a += b;
            }
        }
    }
}

impl P2Tally {
    fn record(&mut self, t: &BlockTranscript, eve: Option<&EveRecord>) {
        self.blocks += 1;
        self.sequential_layouts += (t.alice_pairing == crate::bell::Pairing::Seq) as u64;
        match t.role {
            BlockRole::Decoy => {
                self.compared += 1;
                self.detected += t.detected as u64;
            }
            BlockRole::Data => {
                self.data_blocks += 1;
                self.data_agree += t.bob_correct() as u64;
            }
        }
        if let Some(e) = eve {
            let alice = block_from_labels(t.alice_labels);
            let mask = alice ^ e.inferred_bits;
            self.attacked += 1;
            self.masks[mask as usize] += 1;
            self.joint[alice as usize][e.inferred_bits as usize] += 1;
            self.eve_correct += (mask == 0) as u64;
            if t.role == BlockRole::Decoy {
                self.compared_attacked += 1;
                self.detected_attacked += t.detected as u64;
                if e.pairing_guess == t.alice_pairing && t.detected {
                    self.detected_correct_guess += 1;
                }
            }
        }
    }
}

fn protocol2_block(config: &CampaignConfig, sel: &Selection, i: u64) -> (BlockTranscript, Option<EveRecord>) {
    let mut rng = stream(config.seed, i);
    let bits4: u8 = rng.random_range(0..16);
    let layout = fair_coin_pairing(&mut rng);
    let role = if sel.compared[i as usize] { BlockRole::Decoy } else { BlockRole::Data };
    let block = protocol2_prepare_block(bits4, layout).with_role(role);
    let guess = sel.attacked[i as usize].then(|| config.policy.guess(&mut rng));
    run_block(i, block, guess, &mut rng)
}

/// Per-block transcripts of a Protocol 2 campaign, identical to what the
/// campaign itself simulates.
pub fn protocol2_transcripts(config: &CampaignConfig) -> Result<Vec<BlockTranscript>> {
    config.validate()?;
    let sel = Selection::new(config);
    Ok((0..config.n_blocks).map(|i| protocol2_block(config, &sel, i).0).collect())
}

pub fn write_transcripts<W: Write>(transcripts: &[BlockTranscript], mut out: W) -> Result<()> {
    for t in transcripts {
        serde_json::to_writer(&mut out, t)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn protocol2_campaign(config: &CampaignConfig, exec: Execution) -> AttackReport {
    let sel = Selection::new(config);
    let t: P2Tally = map_reduce(config.n_blocks, exec, |acc: &mut P2Tally, i| {
        let (transcript, eve) = protocol2_block(config, &sel, i);
        acc.record(&transcript, eve.as_ref());
    });

    let f_eff = t.attacked as f64 / t.blocks as f64;
    let detection_rate = Estimate::proportion(t.detected_attacked, t.compared_attacked, Some(DETECTION_PER_ATTACKED_BLOCK));
    let claim_check = detection_rate.map(|d| {
        let se = (d.value * (1.0 - d.value) / d.trials as f64).sqrt().max(f64::MIN_POSITIVE);
        let inside = d.contains(CLAIMED_DETECTION);
        ClaimCheck {
            claimed: CLAIMED_DETECTION,
            corrected: DETECTION_PER_ATTACKED_BLOCK,
            claimed_inside_ci: inside,
            claimed_sigmas: (CLAIMED_DETECTION - d.value) / se,
            verdict: if inside { "CONSISTENT" } else { "REFUTED" }.into(),
        }
    });

    let eve_accuracy = Estimate::proportion(t.eve_correct, t.attacked, Some(EVE_BLOCK_ACCURACY));

    let (eve_outcome_histogram, histogram_fit) = if t.attacked > 0 {
        let expected_of = |m: u8| EXPECTED_MASKS.iter().find(|(k, _)| *k == m).map_or(0.0, |(_, p)| *p);
        let bins = (0u8..16)
            .filter(|&m| t.masks[m as usize] > 0 || expected_of(m) > 0.0)
            .map(|m| HistogramBin {
                xor_mask: format!("{m:04b}"),
                count: t.masks[m as usize],
                fraction: t.masks[m as usize] as f64 / t.attacked as f64,
                expected: expected_of(m),
            })
            .collect();
        let observed: Vec<u64> = EXPECTED_MASKS.iter().map(|(m, _)| t.masks[*m as usize]).collect();
        let probs: Vec<f64> = EXPECTED_MASKS.iter().map(|(_, p)| *p).collect();
        let off = t.attacked - observed.iter().sum::<u64>();
        (bins, chi_square_fit(&observed, &probs, off, HISTOGRAM_ALPHA).ok())
    } else {
        (Vec::new(), None)
    };

    let analytic_5f8 = 5.0 * f_eff / 8.0;
    let eve_correct_fraction = Estimate::proportion(t.eve_correct, t.blocks, Some(analytic_5f8))
        .expect("at least one block");
    let mutual_information = plug_in_mutual_information(&t.joint).ok().map(|raw| {
        let per_bit = raw / 4.0;
        let averaged = f_eff * per_bit;
        let candidates = [
            ("per_bit", per_bit),
            ("averaged_per_bit", averaged),
            ("eve_correct_fraction", eve_correct_fraction.value),
        ];
        let best = candidates
            .iter()
            .min_by(|a, b| (a.1 - analytic_5f8).abs().total_cmp(&(b.1 - analytic_5f8).abs()))
            .expect("non-empty");
        MutualInformation {
            samples: t.attacked,
            raw_bits_per_block: raw,
            analytic_bits_per_block: 4.0 - analytics::eve_ignorance_bits(),
            per_bit,
            averaged_per_bit: averaged,
            eve_correct_fraction,
            analytic_5f_over_8: analytic_5f8,
            matches_5f_over_8: best.0.into(),
        }
    });

    AttackReport {
        config: config.clone(),
        blocks: t.blocks,
        attacked_blocks: t.attacked,
        compared_blocks: t.compared,
        detection_events: t.detected,
        detection_rate,
        claim_check,
        eve_accuracy,
        eve_outcome_histogram,
        histogram_fit,
        mutual_information,
        information: Some(InformationComparison {
            empirical: eve_correct_fraction.value,
            analytic: analytic_5f8,
            normalization: "eve_correct_fraction".into(),
        }),
        qber: Estimate::proportion(t.detected, t.compared, Some(DETECTION_PER_ATTACKED_BLOCK * f_eff)),
        key_agreement: KeyAgreement {
            data_blocks: t.data_blocks,
            agreeing_blocks: t.data_agree,
            exact: t.data_agree == t.data_blocks,
        },
        detections_with_correct_guess: Some(t.detected_correct_guess),
        pop: None,
        kept_fraction: None,
    }
}

/// Empirical frequency of the sequential layout over `n` coin flips.
pub fn layout_coin_frequency(n: u64, seed: u64) -> f64 {
    let cfg = CampaignConfig { compare_fraction: 1.0, ..CampaignConfig::new(ProtocolKind::P2, n, 0.0, seed) };
    let sel = Selection::new(&cfg);
    let t: P2Tally = map_reduce(n, Execution::default(), |acc: &mut P2Tally, i| {
        let (tr, eve) = protocol2_block(&cfg, &sel, i);
        acc.record(&tr, eve.as_ref());
    });
    t.sequential_layouts as f64 / n as f64
}

// ---------------------------------------------------------------------------
// Protocol 1

fn protocol1_campaign(config: &CampaignConfig) -> Result<AttackReport> {
    let mut key_rng = stream(config.seed, KEY_STREAM);
    let key = KeyBits::random(&mut key_rng, 4 * config.n_blocks as usize)?;
    let attack = config.attack();
    let run = protocol1_run(&key, config.seed, config.compare_fraction, (config.f > 0.0).then_some(&attack))?;

    let decoys = run.decoys() as u64;
    let detected = run.detection_events() as u64;
    let hits = run.eve.iter().filter(|m| m.outcome.is_information()).count() as u64;
    let slots = run.permutation.len() as f64;

    let alice_blocks = run.alice_key.blocks()?;
    let bob_blocks = run.bob_key.blocks()?;
    let agreeing = alice_blocks.iter().zip(&bob_blocks).filter(|(a, b)| a == b).count() as u64;

    Ok(AttackReport {
        config: config.clone(),
        blocks: config.n_blocks,
        attacked_blocks: run.eve.len() as u64,
        compared_blocks: decoys,
        detection_events: detected,
        detection_rate: Estimate::proportion(detected, decoys, None),
        claim_check: None,
        eve_accuracy: Estimate::proportion(hits, run.eve.len() as u64, Some(1.0 / (slots - 1.0))),
        eve_outcome_histogram: Vec::new(),
        histogram_fit: None,
        mutual_information: None,
        information: None,
        qber: Estimate::proportion(detected, decoys, if config.f == 0.0 { Some(0.0) } else { None }),
        key_agreement: KeyAgreement {
            data_blocks: alice_blocks.len() as u64,
            agreeing_blocks: agreeing,
            exact: run.key_agreement(),
        },
        detections_with_correct_guess: None,
        pop: None,
        kept_fraction: None,
    })
}

// ---------------------------------------------------------------------------
// BB84 with EPR pairs

#[derive(Default)]
struct Bb84Tally {
    rounds: u64,
    kept: u64,
    attacked: u64,
    compared_kept: u64,
    errors_compared: u64,
    attacked_compared_kept: u64,
    errors_attacked_compared: u64,
    eve_kept: u64,
    eve_correct_kept: u64,
    data_kept: u64,
    data_agree: u64,
}

impl Tally for Bb84Tally {
    fn merge(&mut self, o: Self) {
        self.rounds += o.rounds;
        self.kept += o.kept;
        self.attacked += o.attacked;
        self.compared_kept += o.compared_kept;
        self.errors_compared += o.errors_compared;
        self.attacked_compared_kept += o.attacked_compared_kept;
        self.errors_attacked_compared += o.errors_attacked_compared;
        self.eve_kept += o.eve_kept;
        self.eve_correct_kept += o.eve_correct_kept;
        self.data_kept += o.data_kept;
        self.data_agree += o.data_agree;
    }
}

fn bb84_campaign(config: &CampaignConfig, exec: Execution) -> AttackReport {
    let sel = Selection::new(config);
    let t: Bb84Tally = map_reduce(config.n_blocks, exec, |acc: &mut Bb84Tally, i| {
        let mut rng = stream(config.seed, i);
        let a = Basis::random(&mut rng);
        let b = Basis::random(&mut rng);
        let attacked = sel.attacked[i as usize];
        let e = attacked.then(|| Basis::random(&mut rng));
        let r = epr_round(a, b, e, &mut rng);
        acc.rounds += 1;
        acc.attacked += attacked as u64;
        if !r.kept() {
            return;
        }
        acc.kept += 1;
        let error = r.alice_bit != r.bob_bit;
        if let Some((_, eve_bit)) = r.eve {
            acc.eve_kept += 1;
            acc.eve_correct_kept += (eve_bit == r.alice_bit) as u64;
        }
        if sel.compared[i as usize] {
            acc.compared_kept += 1;
            acc.errors_compared += error as u64;
            if attacked {
                acc.attacked_compared_kept += 1;
                acc.errors_attacked_compared += error as u64;
            }
        } else {
            acc.data_kept += 1;
            acc.data_agree += !error as u64;
        }
    });
    let f_eff = t.attacked as f64 / t.rounds as f64;
    AttackReport {
        config: config.clone(),
        blocks: t.rounds,
        attacked_blocks: t.attacked,
        compared_blocks: t.compared_kept,
        detection_events: t.errors_compared,
        detection_rate: Estimate::proportion(t.errors_attacked_compared, t.attacked_compared_kept, Some(0.25)),
        claim_check: None,
        eve_accuracy: Estimate::proportion(t.eve_correct_kept, t.eve_kept, Some(0.75)),
        eve_outcome_histogram: Vec::new(),
        histogram_fit: None,
        mutual_information: None,
        information: None,
        qber: Estimate::proportion(t.errors_compared, t.compared_kept, Some(0.25 * f_eff)),
        key_agreement: KeyAgreement {
            data_blocks: t.data_kept,
            agreeing_blocks: t.data_agree,
            exact: t.data_agree == t.data_kept,
        },
        detections_with_correct_guess: None,
        pop: None,
        kept_fraction: Estimate::proportion(t.kept, t.rounds, Some(0.5)),
    }
}

// ---------------------------------------------------------------------------
// Particle-order permutation

#[derive(Default)]
struct PopTally {
    trials: u64,
    attacked: u64,
    target_hits: u64,
    any_pair_hits: u64,
    disturbed: u64,
    compared: u64,
    errors: u64,
    compared_attacked: u64,
    errors_attacked: u64,
    data: u64,
    data_agree: u64,
}

impl Tally for PopTally {
    fn merge(&mut self, o: Self) {
        self.trials += o.trials;
        self.attacked += o.attacked;
        self.target_hits += o.target_hits;
        self.any_pair_hits += o.any_pair_hits;
        self.disturbed += o.disturbed;
        self.compared += o.compared;
        self.errors += o.errors;
        self.compared_attacked += o.compared_attacked;
        self.errors_attacked += o.errors_attacked;
        self.data += o.data;
        self.data_agree += o.data_agree;
    }
}

fn pop_campaign(config: &CampaignConfig, exec: Execution) -> AttackReport {
    let n = config.n_qubits;
    let sel = Selection::new(config);
    let t: PopTally = map_reduce(config.n_blocks, exec, |acc: &mut PopTally, i| {
        let mut rng = stream(config.seed, i);
        let mut seq = PopSequence::random(n, &mut rng).expect("N validated");
        let attacked = sel.attacked[i as usize];
        acc.trials += 1;
        if attacked {
            let picks = index::sample(&mut rng, n, 2);
            let (a, b) = (picks.index(0), picks.index(1));
            acc.attacked += 1;
            acc.target_hits += seq.hits_target_block(a, b) as u64;
            acc.any_pair_hits += seq.prepared_together(a, b) as u64;
            acc.disturbed += !pop_intercept(&mut seq, (a, b), &mut rng).is_information() as u64;
        }
        let labels = seq.labels().to_vec();
        let ok = seq.measure_original_pairs(&mut rng) == labels;
        if sel.compared[i as usize] {
            acc.compared += 1;
            acc.errors += !ok as u64;
            if attacked {
                acc.compared_attacked += 1;
                acc.errors_attacked += !ok as u64;
            }
        } else {
            acc.data += 1;
            acc.data_agree += ok as u64;
        }
    });

    let f_eff = t.attacked as f64 / t.trials as f64;
    let nf = n as f64;
    let p_target = 4.0 / (nf * (nf - 1.0));
    let p_any = 1.0 / (nf - 1.0);
    let p_detect = (1.0 - p_any) * 0.75;
    let target_pick = Estimate::proportion(t.target_hits, t.attacked, Some(p_target));
    let pop = target_pick.map(|target_pick| {
        let i_ae_empirical = f_eff * target_pick.value * 1.25;
        PopStats {
            n_qubits: n,
            target_pick,
            any_pair_pick: Estimate::proportion(t.any_pair_hits, t.attacked, Some(p_any)).expect("attacked > 0"),
            disturbance: Estimate::proportion(t.disturbed, t.attacked, Some(1.0 - p_any)).expect("attacked > 0"),
            i_ae_empirical,
            i_ae_analytic: analytics::pop_eve_info(f_eff, n).expect("validated"),
        }
    });
    let information = pop.as_ref().map(|p| InformationComparison {
        empirical: p.i_ae_empirical,
        analytic: p.i_ae_analytic,
        normalization: "target_pick_x_5/4".into(),
    });

    AttackReport {
        config: config.clone(),
        blocks: t.trials,
        attacked_blocks: t.attacked,
        compared_blocks: t.compared,
        detection_events: t.errors,
        detection_rate: Estimate::proportion(t.errors_attacked, t.compared_attacked, Some(p_detect)),
        claim_check: None,
        eve_accuracy: target_pick,
        eve_outcome_histogram: Vec::new(),
        histogram_fit: None,
        mutual_information: None,
        information,
        qber: Estimate::proportion(t.errors, t.compared, Some(p_detect * f_eff)),
        key_agreement: KeyAgreement { data_blocks: t.data, agreeing_blocks: t.data_agree, exact: t.data_agree == t.data },
        detections_with_correct_guess: None,
        pop,
        kept_fraction: None,
    }
}
