//! Quantum states as they travel on the channel.
//!
//! Every state in scope is a product of Bell pairs, and a Bell measurement
//! on such a state leaves another product of Bell pairs. Both types below
//! keep exactly that much structure. Overall signs are dropped: they never
//! affect measurement statistics because no two differently-signed branches
//! are ever recombined.

use rand::Rng;

use crate::bell::{measurement_distribution, BellLabel, Pairing};
use crate::rng::sample_dyadic;

/// A four-qubit protocol block on the wire.
///
/// The layout Alice chose is private: anyone holding a `WireBlock` can only
/// measure it, never read which slots are entangled.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WireBlock {
    labels: (BellLabel, BellLabel),
    layout: Pairing,
}

impl WireBlock {
    pub(crate) fn new(labels: (BellLabel, BellLabel), layout: Pairing) -> Self {
        WireBlock { labels, layout }
    }

    /// Bell-measures slot pairs according to `layout`. The block left behind
    /// holds the observed pairs in that layout.
    pub fn bell_measure<R: Rng + ?Sized>(
        self,
        layout: Pairing,
        rng: &mut R,
    ) -> ((BellLabel, BellLabel), WireBlock) {
        let dist = measurement_distribution(self.labels.0, self.labels.1, self.layout, layout);
        let outcome = sample_dyadic(rng, dist);
        (outcome, WireBlock::new(outcome, layout))
    }
}

/// A perfect matching of qubit slots into Bell pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BellPairRegister {
    partner: Vec<usize>,
    label: Vec<BellLabel>,
}

/// Result of a two-slot Bell measurement on a [`BellPairRegister`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegisterOutcome {
    /// The slots were entangled with each other; the state is untouched.
    SamePair(BellLabel),
    /// The slots belonged to two different pairs; their partners are now
    /// entangled with each other in `partners_label`.
    Swapped { label: BellLabel, partners_label: BellLabel },
}

impl RegisterOutcome {
    pub fn label(self) -> BellLabel {
        match self {
            RegisterOutcome::SamePair(l) => l,
            RegisterOutcome::Swapped { label, .. } => label,
        }
    }

    pub fn is_swap(self) -> bool {
        matches!(self, RegisterOutcome::Swapped { .. })
    }
}

impl BellPairRegister {
    /// Builds a register from `(slot, slot, label)` triples covering every slot once.
    pub fn from_pairs(n_slots: usize, pairs: &[(usize, usize, BellLabel)]) -> Self {
        let mut partner = vec![usize::MAX; n_slots];
        let mut label = vec![BellLabel::PhiPlus; n_slots];
        for &(x, y, l) in pairs {
            assert!(x != y && partner[x] == usize::MAX && partner[y] == usize::MAX, "slots reused");
            partner[x] = y;
            partner[y] = x;
            label[x] = l;
            label[y] = l;
        }
        assert!(partner.iter().all(|&p| p != usize::MAX), "unpaired slot");
        BellPairRegister { partner, label }
    }

    pub fn len(&self) -> usize {
        self.partner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partner.is_empty()
    }

    pub fn partner(&self, slot: usize) -> usize {
        self.partner[slot]
    }

    pub fn label(&self, slot: usize) -> BellLabel {
        self.label[slot]
    }

    /// Bell measurement on slots `x` and `y`.
    ///
    /// With `x ~ x'` and `y ~ y'`, qubits `(x, x', y, y')` play the roles of
    /// `(1, 2, 3, 4)` and the measurement regroups them into `(x,y)(x',y')`.
    /// The orientation of a pair only changes the sign of Ψ⁻, so it is ignored.
    pub fn measure<R: Rng + ?Sized>(&mut self, x: usize, y: usize, rng: &mut R) -> RegisterOutcome {
        assert_ne!(x, y, "Bell measurement needs two distinct slots");
        if self.partner[x] == y {
            return RegisterOutcome::SamePair(self.label[x]);
        }
        let (xp, yp) = (self.partner[x], self.partner[y]);
        let dist = measurement_distribution(self.label[x], self.label[y], Pairing::Seq, Pairing::Crossed);
        let (label, partners_label) = sample_dyadic(rng, dist);
        self.link(x, y, label);
        self.link(xp, yp, partners_label);
        RegisterOutcome::Swapped { label, partners_label }
    }

    fn link(&mut self, x: usize, y: usize, l: BellLabel) {
        self.partner[x] = y;
        self.partner[y] = x;
        self.label[x] = l;
        self.label[y] = l;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::BellLabel::*;
    use crate::rng::stream;

    #[test]
    fn matching_layout_measurement_is_deterministic() {
        let mut rng = stream(0, 0);
        let w = WireBlock::new((PhiPlus, PsiPlus), Pairing::Seq);
        for _ in 0..50 {
            let (out, after) = w.bell_measure(Pairing::Seq, &mut rng);
            assert_eq!(out, (PhiPlus, PsiPlus));
            assert_eq!(after, w);
        }
    }

    #[test]
    fn mismatched_layout_never_leaves_the_xor_class() {
        let mut rng = stream(0, 1);
        let w = WireBlock::new((PhiPlus, PsiPlus), Pairing::Seq);
        for _ in 0..500 {
            let ((a, b), _) = w.bell_measure(Pairing::Crossed, &mut rng);
            assert_eq!(a.xor(b), PsiPlus);
        }
    }

    #[test]
    fn register_swaps_and_repairs() {
        let mut rng = stream(3, 0);
        let mut reg = BellPairRegister::from_pairs(4, &[(0, 1, PhiPlus), (2, 3, PsiMinus)]);
        assert_eq!(reg.measure(1, 0, &mut rng), RegisterOutcome::SamePair(PhiPlus));
        let out = reg.measure(0, 2, &mut rng);
        assert!(out.is_swap());
        assert_eq!(reg.partner(0), 2);
        assert_eq!(reg.partner(1), 3);
        if let RegisterOutcome::Swapped { label, partners_label } = out {
            assert_eq!(label.xor(partners_label), PhiPlus.xor(PsiMinus));
            assert_eq!(reg.label(1), partners_label);
        }
        // The new pairs are now definite.
        let l = reg.label(0);
        assert_eq!(reg.measure(2, 0, &mut rng), RegisterOutcome::SamePair(l));
    }
}
