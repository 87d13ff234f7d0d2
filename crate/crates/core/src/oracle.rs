//! Brute-force four-qubit state vectors.
//!
//! Everything here is built from explicit tensor products and inner products
//! over the 16 computational basis states. Nothing is taken from the
//! closed-form regrouping rule in [`crate::bell`]; only the label and layout
//! types are shared, so the two can be checked against each other.

use crate::bell::{BellLabel, Decomposition, PairProduct, Pairing, Term};
use crate::dyadic::Dyadic;

/// Amplitudes over `|q₁q₂q₃q₄⟩`, with `q₁` the most significant index bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FourQubitState {
    amplitudes: [Dyadic; 16],
}

impl FourQubitState {
    pub fn from_amplitudes(amplitudes: [Dyadic; 16]) -> Self {
        FourQubitState { amplitudes }
    }

    pub fn amplitudes(&self) -> &[Dyadic; 16] {
        &self.amplitudes
    }

    pub fn amplitude(&self, q1: u8, q2: u8, q3: u8, q4: u8) -> Dyadic {
        self.amplitudes[index(q1, q2, q3, q4)]
    }

    pub fn inner(&self, other: &FourQubitState) -> Dyadic {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(&a, &b)| a * b).sum()
    }

    pub fn norm_squared(&self) -> Dyadic {
        self.inner(self)
    }

    pub fn support(&self) -> Vec<usize> {
        (0..16).filter(|&i| !self.amplitudes[i].is_zero()).collect()
    }

    pub fn scaled(&self, c: Dyadic) -> FourQubitState {
        FourQubitState { amplitudes: self.amplitudes.map(|a| a * c) }
    }
}

fn index(q1: u8, q2: u8, q3: u8, q4: u8) -> usize {
    ((q1 as usize) << 3) | ((q2 as usize) << 2) | ((q3 as usize) << 1) | q4 as usize
}

/// Unnormalised two-qubit amplitudes over `|00⟩,|01⟩,|10⟩,|11⟩`.
fn two_qubit_vector(label: BellLabel) -> [i64; 4] {
    match label {
        BellLabel::PhiPlus => [1, 0, 0, 1],
        BellLabel::PhiMinus => [1, 0, 0, -1],
        BellLabel::PsiPlus => [0, 1, 1, 0],
        BellLabel::PsiMinus => [0, 1, -1, 0],
    }
}

/// `|a⟩|b⟩` with `a` on the first pair of `pairing` and `b` on the second.
///
/// The two `1/√2` factors combine to an overall `1/2`.
pub fn build_pair_product(a: BellLabel, b: BellLabel, pairing: Pairing) -> FourQubitState {
    let va = two_qubit_vector(a);
    let vb = two_qubit_vector(b);
    let mut amplitudes = [Dyadic::ZERO; 16];
    for q1 in 0..2u8 {
        for q2 in 0..2u8 {
            for q3 in 0..2u8 {
                for q4 in 0..2u8 {
                    let (ia, ib) = match pairing {
                        Pairing::Seq => (2 * q1 + q2, 2 * q3 + q4),
                        Pairing::Crossed => (2 * q1 + q3, 2 * q2 + q4),
                    };
                    let c = va[ia as usize] * vb[ib as usize];
                    amplitudes[index(q1, q2, q3, q4)] = Dyadic::new(c, 1);
                }
            }
        }
    }
    FourQubitState { amplitudes }
}

/// The 16 Bell-product vectors of one layout.
#[derive(Clone, Debug)]
pub struct BellProductBasis {
    pairing: Pairing,
    vectors: Vec<((BellLabel, BellLabel), FourQubitState)>,
}

impl BellProductBasis {
    pub fn new(pairing: Pairing) -> Self {
        let vectors = BellLabel::ALL
            .iter()
            .flat_map(|&a| BellLabel::ALL.iter().map(move |&b| (a, b)))
            .map(|(a, b)| ((a, b), build_pair_product(a, b, pairing)))
            .collect();
        BellProductBasis { pairing, vectors }
    }

    pub fn pairing(&self) -> Pairing {
        self.pairing
    }

    pub fn vectors(&self) -> &[((BellLabel, BellLabel), FourQubitState)] {
        &self.vectors
    }

    /// 16×16 matrix of inner products.
    pub fn gram(&self) -> Vec<Vec<Dyadic>> {
        self.vectors
            .iter()
            .map(|(_, u)| self.vectors.iter().map(|(_, v)| u.inner(v)).collect())
            .collect()
    }
}

/// Expands `state` in `basis`, dropping exactly-zero coefficients.
pub fn project(state: &FourQubitState, basis: &BellProductBasis) -> Decomposition {
    let terms = basis
        .vectors
        .iter()
        .filter_map(|&((a, b), v)| {
            let c = v.inner(state);
            (!c.is_zero()).then(|| Term {
                product: PairProduct::new(a, b, basis.pairing),
                coefficient: c,
            })
        })
        .collect();
    Decomposition { terms }
}

/// Probability of each two-label outcome when `state` is measured in `basis`.
pub fn outcome_probabilities(
    state: &FourQubitState,
    basis: &BellProductBasis,
) -> Vec<((BellLabel, BellLabel), Dyadic)> {
    project(state, basis)
        .terms
        .into_iter()
        .map(|t| (t.product.labels(), t.coefficient.square()))
        .collect()
}
