//! One-step protocol: two Bell pairs per four key bits, sent in a secret layout.
//!
//! Alice encodes each 4-bit block as two Bell pairs and, with a fair coin,
//! either sends the particles in order `(1,2),(3,4)` or swaps the second
//! particle of the first pair with the first particle of the second, giving
//! `(1,3),(2,4)` on the wire. Only after Bob confirms receipt does she
//! announce the layout, and Bob Bell-measures accordingly. A fraction of the
//! blocks are decoys whose outcomes are compared publicly.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::{measure_resend, EveRecord};
use crate::bell::{BellLabel, Pairing};
use crate::protocols::wire::WireBlock;
use crate::protocols::{labels_from_block, BlockRole};

/// Alice's private description of one block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockState {
    pub alice_labels: (BellLabel, BellLabel),
    pub alice_pairing: Pairing,
    pub role: BlockRole,
}

impl BlockState {
    /// Particle number (1..=4) sitting in each wire slot.
    pub fn wire_order(&self) -> [u8; 4] {
        match self.alice_pairing {
            Pairing::Seq => [1, 2, 3, 4],
            Pairing::Crossed => [1, 3, 2, 4],
        }
    }

    pub fn with_role(self, role: BlockRole) -> Self {
        BlockState { role, ..self }
    }

    pub fn transmit(&self) -> WireBlock {
        WireBlock::new(self.alice_labels, self.alice_pairing)
    }

    /// Second phase: the layout is released only against a receipt.
    pub fn announce(&self, _receipt: &Receipt) -> Pairing {
        self.alice_pairing
    }
}

/// Bob's confirmation that every qubit of a block has arrived.
#[derive(Debug)]
pub struct Receipt {
    pub block_index: u64,
}

pub fn protocol2_prepare_block(bits4: u8, pairing_choice: Pairing) -> BlockState {
    BlockState {
        alice_labels: labels_from_block(bits4 & 0x0f),
        alice_pairing: pairing_choice,
        role: BlockRole::Data,
    }
}

pub fn fair_coin_pairing<R: Rng + ?Sized>(rng: &mut R) -> Pairing {
    if rng.random() {
        Pairing::Crossed
    } else {
        Pairing::Seq
    }
}

pub fn protocol2_bob_measure<R: Rng + ?Sized>(
    wire: WireBlock,
    announced_pairing: Pairing,
    rng: &mut R,
) -> (BellLabel, BellLabel) {
    wire.bell_measure(announced_pairing, rng).0
}

/// What happened to Alice's block on the channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EveAction {
    #[serde(rename = "NONE")]
    None,
    #[serde(rename = "MEASURED")]
    Measured { pairing_guess: Pairing },
}

/// One JSON line of a protocol transcript.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockTranscript {
    pub block_index: u64,
    pub alice_labels: (BellLabel, BellLabel),
    pub alice_pairing: Pairing,
    pub role: BlockRole,
    pub eve_action: EveAction,
    pub eve_outcome: Option<(BellLabel, BellLabel)>,
    pub bob_outcome: (BellLabel, BellLabel),
    pub detected: bool,
}

impl BlockTranscript {
    pub fn bob_correct(&self) -> bool {
        self.bob_outcome == self.alice_labels
    }
}

/// Runs one block end to end: transmission, optional interception, receipt,
/// announcement, Bob's measurement and (for decoys) the public comparison.
pub fn run_block<R: Rng + ?Sized>(
    block_index: u64,
    block: BlockState,
    eve_guess: Option<Pairing>,
    rng: &mut R,
) -> (BlockTranscript, Option<EveRecord>) {
    let mut wire = block.transmit();
    let mut eve = None;
    if let Some(guess) = eve_guess {
        let (record, resent) = measure_resend(block_index, wire, guess, rng);
        wire = resent;
        eve = Some(record);
    }

    let receipt = Receipt { block_index };
    let announced = block.announce(&receipt);
    let bob_outcome = protocol2_bob_measure(wire, announced, rng);
    let detected = block.role == BlockRole::Decoy && bob_outcome != block.alice_labels;

    let transcript = BlockTranscript {
        block_index,
        alice_labels: block.alice_labels,
        alice_pairing: block.alice_pairing,
        role: block.role,
        eve_action: match &eve {
            Some(r) => EveAction::Measured { pairing_guess: r.pairing_guess },
            None => EveAction::None,
        },
        eve_outcome: eve.as_ref().map(|r| r.outcome),
        bob_outcome,
        detected,
    };
    (transcript, eve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::BellLabel::*;
    use crate::rng::stream;

    #[test]
    fn preparation_examples() {
        let b = protocol2_prepare_block(0b0010, Pairing::Seq);
        assert_eq!((b.alice_labels, b.alice_pairing), ((PhiPlus, PsiPlus), Pairing::Seq));
        let b = protocol2_prepare_block(0b0000, Pairing::Crossed);
        assert_eq!((b.alice_labels, b.alice_pairing), ((PhiPlus, PhiPlus), Pairing::Crossed));
        assert_eq!(b.wire_order(), [1, 3, 2, 4]);
    }

    #[test]
    fn undisturbed_block_is_always_read_correctly() {
        let mut rng = stream(11, 0);
        let block = protocol2_prepare_block(0b0010, Pairing::Seq);
        for _ in 0..200 {
            assert_eq!(protocol2_bob_measure(block.transmit(), Pairing::Seq, &mut rng), (PhiPlus, PsiPlus));
        }
    }

    #[test]
    fn bob_never_sees_psi_plus_psi_minus_after_a_wrong_guess() {
        let mut rng = stream(11, 1);
        let block = protocol2_prepare_block(0b0010, Pairing::Seq);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..2000 {
            let (t, _) = run_block(0, block, Some(Pairing::Crossed), &mut rng);
            assert_ne!(t.bob_outcome, (PsiPlus, PsiMinus));
            seen.insert(t.bob_outcome);
        }
        let expected: std::collections::BTreeSet<_> =
            [(PhiPlus, PsiPlus), (PhiMinus, PsiMinus), (PsiPlus, PhiPlus), (PsiMinus, PhiMinus)].into();
        assert_eq!(seen, expected);
    }

    #[test]
    fn data_blocks_are_never_flagged() {
        let mut rng = stream(11, 2);
        let block = protocol2_prepare_block(0b1111, Pairing::Crossed);
        for _ in 0..200 {
            let (t, _) = run_block(0, block, Some(Pairing::Seq), &mut rng);
            assert!(!t.detected);
        }
    }

    #[test]
    fn transcript_line_has_fixed_field_names() {
        let mut rng = stream(0, 0);
        let block = protocol2_prepare_block(0b0010, Pairing::Seq).with_role(BlockRole::Decoy);
        let (t, _) = run_block(5, block, None, &mut rng);
        let v: serde_json::Value = serde_json::to_value(t).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        let mut expected = vec![
            "block_index", "alice_labels", "alice_pairing", "role",
            "eve_action", "eve_outcome", "bob_outcome", "detected",
        ];
        expected.sort_unstable();
        let mut keys = keys;
        keys.sort_unstable();
        assert_eq!(keys, expected);
        assert_eq!(v["eve_action"], "NONE");
        assert_eq!(v["alice_labels"], serde_json::json!(["phi+", "psi+"]));
        assert_eq!(v["role"], "DECOY");
    }
}
