//! Memory-based protocol: one Bell pair per two key bits, fully permuted.
//!
//! Alice turns each bit pair into a Bell label, mixes in decoy pairs with
//! random labels, and sends every qubit in a uniformly permuted order. Bob
//! stores the qubits; once Alice announces the permutation and which pairs
//! are decoys, he Bell-measures each original pair. Decoys are compared.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::{pop_intercept, AttackConfig, PopIntercept};
use crate::bell::{bits_from_bell, BellLabel};
use crate::error::{check_unit, Result};
use crate::protocols::pop::PopSequence;
use crate::protocols::{BlockRole, KeyBits};
use crate::rng::{exact_subset, stream, ATTACK_SELECTION_STREAM, GLOBAL_STREAM};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub label: BellLabel,
    pub role: BlockRole,
    pub bob_outcome: BellLabel,
    pub detected: bool,
}

/// One Bell measurement Eve made on adjacent wire slots `(2k, 2k+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SlotMeasurement {
    pub slots: (usize, usize),
    pub outcome: PopIntercept,
}

#[derive(Clone, Debug)]
pub struct Protocol1Run {
    pub alice_key: KeyBits,
    pub bob_key: KeyBits,
    pub pairs: Vec<PairRecord>,
    pub permutation: Vec<usize>,
    pub eve: Vec<SlotMeasurement>,
}

impl Protocol1Run {
    pub fn decoys(&self) -> usize {
        self.pairs.iter().filter(|p| p.role == BlockRole::Decoy).count()
    }

    pub fn detection_events(&self) -> usize {
        self.pairs.iter().filter(|p| p.detected).count()
    }

    pub fn key_agreement(&self) -> bool {
        self.alice_key == self.bob_key
    }
}

/// `decoy_fraction` is the number of decoy pairs per data pair, in `[0, 1]`.
pub fn protocol1_run(
    key: &KeyBits,
    permutation_seed: u64,
    decoy_fraction: f64,
    attack: Option<&AttackConfig>,
) -> Result<Protocol1Run> {
    check_unit("decoy_fraction", decoy_fraction)?;
    let data = key.bell_pairs()?;
    let mut rng = stream(permutation_seed, GLOBAL_STREAM);

    let n_decoys = (decoy_fraction * data.len() as f64).round() as usize;
    let mut roles: Vec<BlockRole> = std::iter::repeat_n(BlockRole::Data, data.len())
        .chain(std::iter::repeat_n(BlockRole::Decoy, n_decoys))
        .collect();
    roles.shuffle(&mut rng);
    let mut data_iter = data.iter();
    let labels: Vec<BellLabel> = roles
        .iter()
        .map(|role| match role {
            BlockRole::Data => *data_iter.next().expect("one label per data slot"),
            BlockRole::Decoy => BellLabel::ALL[rng.random_range(0..4)],
        })
        .collect();

    // A single pair has nothing to permute against; pad with one decoy.
    let (labels, roles) = if labels.len() == 1 {
        let mut l = labels;
        let mut r = roles;
        l.push(BellLabel::ALL[rng.random_range(0..4)]);
        r.push(BlockRole::Decoy);
        (l, r)
    } else {
        (labels, roles)
    };

    let mut seq = PopSequence::shuffled(labels.clone(), &mut rng)?;

    let mut eve = Vec::new();
    if let Some(attack) = attack {
        attack.validate()?;
        let slot_pairs = seq.n_qubits() / 2;
        let mut select = stream(attack.seed, ATTACK_SELECTION_STREAM);
        let chosen = exact_subset(&mut select, slot_pairs, attack.f);
        let mut nature = stream(attack.seed, 0);
        for (k, _) in chosen.iter().enumerate().filter(|(_, &c)| c) {
            let slots = (2 * k, 2 * k + 1);
            let outcome = pop_intercept(&mut seq, slots, &mut nature);
            eve.push(SlotMeasurement { slots, outcome });
        }
    }

    // Announcement: permutation and roles are public from here on.
    let bob = seq.measure_original_pairs(&mut rng);
    let pairs: Vec<PairRecord> = labels
        .iter()
        .zip(&roles)
        .zip(&bob)
        .map(|((&label, &role), &bob_outcome)| PairRecord {
            label,
            role,
            bob_outcome,
            detected: role == BlockRole::Decoy && bob_outcome != label,
        })
        .collect();

    let bob_bits = pairs
        .iter()
        .filter(|p| p.role == BlockRole::Data)
        .flat_map(|p| {
            let v = bits_from_bell(p.bob_outcome).value();
            [v & 0b10 != 0, v & 0b01 != 0]
        })
        .collect();

    Ok(Protocol1Run {
        alice_key: key.clone(),
        bob_key: KeyBits::new(bob_bits)?,
        pairs,
        permutation: seq.permutation().to_vec(),
        eve,
    })
}
