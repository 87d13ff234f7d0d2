//! Executable models of the protocols under study.
//!
//! * [`protocol1`]: one Bell pair per two key bits, full particle-order
//!   permutation, Bob holds everything in memory until the order is announced.
//! * [`protocol2`]: two Bell pairs per four key bits, each block sent in
//!   either the sequential or the crossed layout; no memory needed.
//! * [`bb84`]: the entanglement-based BB84 baseline.
//! * [`pop`]: generic particle-order permutation over `N` qubits.

pub mod bb84;
pub mod pop;
pub mod protocol1;
pub mod protocol2;
pub mod wire;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bell::{bell_from_bits, BellLabel, TwoBits};
use crate::error::{Error, Result};

/// A raw key as a bit string.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KeyBits(Vec<bool>);

impl KeyBits {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::EmptyKey);
        }
        Ok(KeyBits(bits))
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Result<Self> {
        KeyBits::new((0..len).map(|_| rng.random()).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// One Bell label per consecutive bit pair.
    pub fn bell_pairs(&self) -> Result<Vec<BellLabel>> {
        if !self.0.len().is_multiple_of(2) {
            return Err(Error::OddKeyLength(self.0.len()));
        }
        Ok(self
            .0
            .chunks_exact(2)
            .map(|c| bell_from_bits(TwoBits::from_pair(c[0], c[1])))
            .collect())
    }

    /// Consecutive 4-bit blocks, most significant bit first.
    pub fn blocks(&self) -> Result<Vec<u8>> {
        if !self.0.len().is_multiple_of(4) {
            return Err(Error::KeyNotBlockAligned(self.0.len()));
        }
        Ok(self
            .0
            .chunks_exact(4)
            .map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | b as u8))
            .collect())
    }
}

impl FromStr for KeyBits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '_')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidKeyBit(other)),
            })
            .collect::<Result<Vec<_>>>()?;
        KeyBits::new(bits)
    }
}

impl fmt::Display for KeyBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Whether a block carries key material or is sacrificed for the error check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockRole {
    #[serde(rename = "DATA")]
    Data,
    #[serde(rename = "DECOY")]
    Decoy,
}

/// Four key bits spread over two labels, most significant first.
pub fn labels_from_block(bits4: u8) -> (BellLabel, BellLabel) {
    (bell_from_bits(TwoBits::new(bits4 >> 2)), bell_from_bits(TwoBits::new(bits4)))
}

pub fn block_from_labels(labels: (BellLabel, BellLabel)) -> u8 {
    use crate::bell::bits_from_bell;
    (bits_from_bell(labels.0).value() << 2) | bits_from_bell(labels.1).value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::BellLabel::*;

    #[test]
    fn key_parsing_and_validation() {
        let k: KeyBits = "0111".parse().unwrap();
        assert_eq!(k.bell_pairs().unwrap(), vec![PhiMinus, PsiMinus]);
        assert_eq!(k.blocks().unwrap(), vec![0b0111]);
        assert!(matches!("".parse::<KeyBits>(), Err(Error::EmptyKey)));
        assert!(matches!("012".parse::<KeyBits>(), Err(Error::InvalidKeyBit('2'))));
        let odd: KeyBits = "011".parse().unwrap();
        assert!(matches!(odd.bell_pairs(), Err(Error::OddKeyLength(3))));
        assert!(matches!(odd.blocks(), Err(Error::KeyNotBlockAligned(3))));
    }

    #[test]
    fn block_labels_round_trip() {
        assert_eq!(labels_from_block(0b0010), (PhiPlus, PsiPlus));
        for v in 0..16u8 {
            assert_eq!(block_from_labels(labels_from_block(v)), v);
        }
    }
}
