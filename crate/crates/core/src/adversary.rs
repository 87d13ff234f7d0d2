//! Eavesdropper models.
//!
//! Eve intercepts whole 4-qubit blocks, guesses a layout, Bell-measures the
//! slot pairs of her guess and resends what she observed. When the guess is
//! wrong her measurement swaps entanglement between the two pairs.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bell::{bits_from_bell, measurement_distribution, BellLabel, Pairing};
use crate::dyadic::Dyadic;
use crate::error::{check_unit, Result};
use crate::protocols::pop::PopSequence;
use crate::protocols::wire::{RegisterOutcome, WireBlock};

/// How Eve picks the layout she measures in.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GuessPolicy {
    #[default]
    #[serde(alias = "UNIFORM")]
    Uniform,
    /// Always measure `{(1,2),(3,4)}`.
    Seq,
    /// Always measure `{(1,3),(2,4)}`.
    Crossed,
}

impl GuessPolicy {
    pub fn guess<R: Rng + ?Sized>(self, rng: &mut R) -> Pairing {
        match self {
            GuessPolicy::Uniform => {
                if rng.random() {
                    Pairing::Crossed
                } else {
                    Pairing::Seq
                }
            }
            GuessPolicy::Seq => Pairing::Seq,
            GuessPolicy::Crossed => Pairing::Crossed,
        }
    }
}

/// `{f, seed, policy}`: attack `round(f·n)` of `n` blocks, chosen without replacement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackConfig {
    pub f: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub policy: GuessPolicy,
}

impl AttackConfig {
    pub fn new(f: f64, seed: u64) -> Result<Self> {
        let c = AttackConfig { f, seed, policy: GuessPolicy::Uniform };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        check_unit("f", self.f)
    }

    pub fn attacked_count(&self, n: usize) -> usize {
        ((self.f * n as f64).round() as usize).min(n)
    }
}

/// What Eve learned from one block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EveRecord {
    pub block_index: u64,
    pub pairing_guess: Pairing,
    pub outcome: (BellLabel, BellLabel),
    /// Outcome labels decoded in slot order, regardless of whether the guess was right.
    pub inferred_bits: u8,
}

fn bits_of(outcome: (BellLabel, BellLabel)) -> u8 {
    (bits_from_bell(outcome.0).value() << 2) | bits_from_bell(outcome.1).value()
}

/// Bell-measures `block` in the `guess` layout and resends the observed pairs.
pub fn measure_resend<R: Rng + ?Sized>(
    block_index: u64,
    block: WireBlock,
    guess: Pairing,
    rng: &mut R,
) -> (EveRecord, WireBlock) {
    let (outcome, resent) = block.bell_measure(guess, rng);
    let record = EveRecord { block_index, pairing_guess: guess, outcome, inferred_bits: bits_of(outcome) };
    (record, resent)
}

/// Exact distribution of Eve's inferred 4-bit value for a block prepared as
/// `initial`, when she guesses the layout uniformly.
///
/// The result does not depend on Alice's actual layout: either way Eve is
/// right half the time.
pub fn eve_outcome_distribution(initial: (BellLabel, BellLabel)) -> BTreeMap<u8, Dyadic> {
    let mut dist = BTreeMap::new();
    for guess in Pairing::ALL {
        for (outcome, p) in measurement_distribution(initial.0, initial.1, Pairing::Seq, guess) {
            *dist.entry(bits_of(outcome)).or_default() += p * Dyadic::HALF;
        }
    }
    dist
}

/// Result of Eve Bell-measuring two slots of a permuted sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PopIntercept {
    /// The slots held one entangled pair; Eve learns its label undisturbed.
    Information { pair: usize, label: BellLabel },
    /// The slots came from two different pairs. Eve's outcome is uniformly
    /// random and carries no key information, and the measurement swapped
    /// entanglement onto the partners.
    Incompatible { outcome: BellLabel, disturbed_pairs: (usize, usize) },
}

impl PopIntercept {
    pub fn is_information(&self) -> bool {
        matches!(self, PopIntercept::Information { .. })
    }
}

pub fn pop_intercept<R: Rng + ?Sized>(
    seq: &mut PopSequence,
    picks: (usize, usize),
    rng: &mut R,
) -> PopIntercept {
    let (x, y) = picks;
    let pairs = (seq.pair_of_slot(x), seq.pair_of_slot(y));
    match seq.register_mut().measure(x, y, rng) {
        RegisterOutcome::SamePair(label) => PopIntercept::Information { pair: pairs.0, label },
        RegisterOutcome::Swapped { label, .. } => {
            PopIntercept::Incompatible { outcome: label, disturbed_pairs: pairs }
        }
    }
}
