//! Closed-form algebra of the four Bell states.
//!
//! A Bell label is a pair of parity bits `(flip, phase)`:
//!
//! ```text
//!   Φ⁺ = (|00⟩+|11⟩)/√2  (0,0)      Ψ⁺ = (|01⟩+|10⟩)/√2  (1,0)
//!   Φ⁻ = (|00⟩−|11⟩)/√2  (0,1)      Ψ⁻ = (|01⟩−|10⟩)/√2  (1,1)
//! ```
//!
//! Writing `B(f,p) = (I ⊗ XᶠZᵖ)|Φ⁺⟩`, a product of two Bell pairs regroups
//! between the sequential layout `{(1,2),(3,4)}` and the crossed layout
//! `{(1,3),(2,4)}` as
//!
//! ```text
//!   B(a)⊗B(b) = ½ Σₓ (−1)^s(a,b,x) · B(x) ⊗ B(x⊕a⊕b)
//!   s(a,b,x)  = b.phase·x.flip ⊕ (a.phase⊕b.phase⊕x.phase)·a.flip
//! ```
//!
//! The same rule applies in both directions, since relabelling qubits 2↔3
//! exchanges the two layouts.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;

/// One of the four Bell states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BellLabel {
    #[serde(rename = "phi+")]
    PhiPlus,
    #[serde(rename = "phi-")]
    PhiMinus,
    #[serde(rename = "psi+")]
    PsiPlus,
    #[serde(rename = "psi-")]
    PsiMinus,
}

pub use BellLabel::{PhiMinus, PhiPlus, PsiMinus, PsiPlus};

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [PhiPlus, PhiMinus, PsiPlus, PsiMinus];

    pub fn from_parities(flip: bool, phase: bool) -> Self {
        match (flip, phase) {
            (false, false) => PhiPlus,
            (false, true) => PhiMinus,
            (true, false) => PsiPlus,
            (true, true) => PsiMinus,
        }
    }

    /// 1 for Ψ-type states.
    pub fn flip(self) -> bool {
        matches!(self, PsiPlus | PsiMinus)
    }

    /// 1 for the minus states.
    pub fn phase(self) -> bool {
        matches!(self, PhiMinus | PsiMinus)
    }

    /// Componentwise XOR of the parity bits.
    pub fn xor(self, other: BellLabel) -> BellLabel {
        BellLabel::from_parities(self.flip() ^ other.flip(), self.phase() ^ other.phase())
    }

    pub fn ascii(self) -> &'static str {
        match self {
            PhiPlus => "phi+",
            PhiMinus => "phi-",
            PsiPlus => "psi+",
            PsiMinus => "psi-",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            PhiPlus => "Φ⁺",
            PhiMinus => "Φ⁻",
            PsiPlus => "Ψ⁺",
            PsiMinus => "Ψ⁻",
        }
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.ascii())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown Bell label {0:?} (expected phi+, phi-, psi+ or psi-)")]
pub struct ParseLabelError(String);

impl FromStr for BellLabel {
    type Err = ParseLabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "phi+" => Ok(PhiPlus),
            "phi-" => Ok(PhiMinus),
            "psi+" => Ok(PsiPlus),
            "psi-" => Ok(PsiMinus),
            _ => Err(ParseLabelError(s.to_string())),
        }
    }
}

/// Two key bits `b₁b₂`, stored in the low two bits (`b₁` is bit 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TwoBits(u8);

impl TwoBits {
    pub fn new(value: u8) -> Self {
        TwoBits(value & 0b11)
    }

    pub fn from_pair(b1: bool, b2: bool) -> Self {
        TwoBits(((b1 as u8) << 1) | b2 as u8)
    }

    pub fn value(self) -> u8 {
        self.0
    }
}

/// `00 → Φ⁺, 01 → Φ⁻, 10 → Ψ⁺, 11 → Ψ⁻`.
pub fn bell_from_bits(bits: TwoBits) -> BellLabel {
    BellLabel::from_parities(bits.0 & 0b10 != 0, bits.0 & 0b01 != 0)
}

pub fn bits_from_bell(label: BellLabel) -> TwoBits {
    TwoBits::from_pair(label.flip(), label.phase())
}

/// Single-qubit encoding operations used to move Φ⁺ onto the other labels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    Z,
    X,
    /// `iY = XZ`; real, so no global phase bookkeeping is needed.
    IY,
}

/// Applies `op` to the second qubit of the pair. Global phase is dropped.
pub fn pauli_encode(op: Pauli, state: BellLabel) -> BellLabel {
    let (flip, phase) = match op {
        Pauli::I => (false, false),
        Pauli::Z => (false, true),
        Pauli::X => (true, false),
        Pauli::IY => (true, true),
    };
    state.xor(BellLabel::from_parities(flip, phase))
}

/// Placement of two Bell pairs on qubits 1..4.
///
/// `{(1,4),(2,3)}` is intentionally not a variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pairing {
    /// `{(1,2),(3,4)}`
    #[serde(alias = "SEQUENTIAL", alias = "sequential")]
    Seq,
    /// `{(1,3),(2,4)}`
    #[serde(alias = "CROSSED")]
    Crossed,
}

impl Pairing {
    pub const ALL: [Pairing; 2] = [Pairing::Seq, Pairing::Crossed];

    pub fn other(self) -> Pairing {
        match self {
            Pairing::Seq => Pairing::Crossed,
            Pairing::Crossed => Pairing::Seq,
        }
    }

    /// 1-based qubit indices of the two pairs.
    pub fn qubit_pairs(self) -> [(u8, u8); 2] {
        match self {
            Pairing::Seq => [(1, 2), (3, 4)],
            Pairing::Crossed => [(1, 3), (2, 4)],
        }
    }

    pub fn ascii(self) -> &'static str {
        match self {
            Pairing::Seq => "seq",
            Pairing::Crossed => "crossed",
        }
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.ascii())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown pairing {0:?} (expected seq or crossed)")]
pub struct ParsePairingError(String);

impl FromStr for Pairing {
    type Err = ParsePairingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "seq" | "sequential" => Ok(Pairing::Seq),
            "crossed" => Ok(Pairing::Crossed),
            _ => Err(ParsePairingError(s.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn from_parity(odd: bool) -> Sign {
        if odd {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn as_dyadic(self) -> Dyadic {
        match self {
            Sign::Plus => Dyadic::ONE,
            Sign::Minus => -Dyadic::ONE,
        }
    }
}

/// `sign · |first⟩|second⟩` with the pairs placed according to `pairing`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PairProduct {
    pub first: BellLabel,
    pub second: BellLabel,
    pub pairing: Pairing,
    pub sign: Sign,
}

impl PairProduct {
    pub fn new(first: BellLabel, second: BellLabel, pairing: Pairing) -> Self {
        PairProduct { first, second, pairing, sign: Sign::Plus }
    }

    pub fn labels(&self) -> (BellLabel, BellLabel) {
        (self.first, self.second)
    }
}

impl fmt::Display for PairProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [(a1, a2), (b1, b2)] = self.pairing.qubit_pairs();
        if self.sign == Sign::Minus {
            f.write_str("-")?;
        }
        write!(
            f,
            "|{}⟩{a1}{a2}|{}⟩{b1}{b2}",
            self.first.symbol(),
            self.second.symbol()
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub product: PairProduct,
    pub coefficient: Dyadic,
}

impl Term {
    /// Coefficient with the product's own sign folded in.
    pub fn signed_coefficient(&self) -> Dyadic {
        self.coefficient * self.product.sign.as_dyadic()
    }
}

/// A state written as a sum of Bell-pair products sharing one layout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub terms: Vec<Term>,
}

impl Decomposition {
    pub fn single(product: PairProduct) -> Self {
        Decomposition { terms: vec![Term { product, coefficient: Dyadic::ONE }] }
    }

    /// Sorts terms by label and folds product signs into the coefficients,
    /// giving a canonical form for comparison.
    pub fn canonical(&self) -> Decomposition {
        let mut merged: BTreeMap<PairProduct, Dyadic> = BTreeMap::new();
        for t in &self.terms {
            let key = PairProduct { sign: Sign::Plus, ..t.product };
            *merged.entry(key).or_default() += t.signed_coefficient();
        }
        Decomposition {
            terms: merged
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(product, coefficient)| Term { product, coefficient })
                .collect(),
        }
    }

    pub fn norm_squared(&self) -> Dyadic {
        self.canonical().terms.iter().map(|t| t.coefficient.square()).sum()
    }

    pub fn pairing(&self) -> Option<Pairing> {
        let first = self.terms.first()?.product.pairing;
        self.terms.iter().all(|t| t.product.pairing == first).then_some(first)
    }

    /// Rewrites every term in the `to` layout and merges like terms.
    pub fn regroup(&self, to: Pairing) -> Decomposition {
        let terms = self
            .terms
            .iter()
            .flat_map(|t| {
                let scale = t.signed_coefficient();
                swap_decompose(t.product.first, t.product.second, t.product.pairing, to)
                    .terms
                    .into_iter()
                    .map(move |u| Term { coefficient: u.coefficient * scale, ..u })
            })
            .collect();
        Decomposition { terms }.canonical()
    }
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            let c = t.signed_coefficient();
            let sign = if c.is_negative() { '-' } else { '+' };
            let product = PairProduct { sign: Sign::Plus, ..t.product };
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{sign}{} {product}", c.abs())?;
        }
        Ok(())
    }
}

fn swap_sign(a: BellLabel, b: BellLabel, x: BellLabel) -> Sign {
    let s = (b.phase() & x.flip()) ^ ((a.phase() ^ b.phase() ^ x.phase()) & a.flip());
    Sign::from_parity(s)
}

/// Rewrites `|a⟩|b⟩` in layout `from` as a sum over products in layout `to`.
pub fn swap_decompose(a: BellLabel, b: BellLabel, from: Pairing, to: Pairing) -> Decomposition {
    if from == to {
        return Decomposition::single(PairProduct::new(a, b, to));
    }
    let shift = a.xor(b);
    let terms = BellLabel::ALL
        .iter()
        .map(|&x| Term {
            product: PairProduct::new(x, x.xor(shift), to),
            coefficient: Dyadic::HALF * swap_sign(a, b, x).as_dyadic(),
        })
        .collect();
    Decomposition { terms }
}

/// Exact outcome probabilities of a Bell measurement in layout `measured_in`.
pub fn measurement_distribution(
    a: BellLabel,
    b: BellLabel,
    prepared_in: Pairing,
    measured_in: Pairing,
) -> BTreeMap<(BellLabel, BellLabel), Dyadic> {
    let mut dist = BTreeMap::new();
    for t in swap_decompose(a, b, prepared_in, measured_in).terms {
        *dist.entry(t.product.labels()).or_default() += t.coefficient.square();
    }
    dist
}

/// All 16 label pairs regrouped from `from` to `to`, in `BellLabel::ALL` order.
pub fn decomposition_table(from: Pairing, to: Pairing) -> Vec<TableEntry> {
    BellLabel::ALL
        .iter()
        .flat_map(|&a| BellLabel::ALL.iter().map(move |&b| (a, b)))
        .map(|(a, b)| TableEntry {
            first: a,
            second: b,
            from,
            to,
            decomposition: swap_decompose(a, b, from, to),
        })
        .collect()
}

/// One row of an exported decomposition table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub first: BellLabel,
    pub second: BellLabel,
    pub from: Pairing,
    pub to: Pairing,
    pub decomposition: Decomposition,
}
