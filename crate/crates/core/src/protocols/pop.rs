//! Particle-order permutation over `N` qubits.
//!
//! `N/2` Bell pairs are created, pair `k` on original qubits `2k` and `2k+1`,
//! and the qubits are shuffled by a permutation `Π_N` before transmission.
//! Wire slot `s` carries original qubit `permutation[s]`.

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::bell::BellLabel;
use crate::error::{Error, Result};
use crate::protocols::wire::BellPairRegister;

fn check_size(n_qubits: usize) -> Result<()> {
    if n_qubits < 4 || !n_qubits.is_multiple_of(2) {
        return Err(Error::PopSize(n_qubits));
    }
    Ok(())
}

/// Closed-form probability that two uniformly picked slots are an entangled
/// pair Eve is after: `2 / C(N,2) = 4 / (N(N−1))`.
pub fn pop_correct_pick_probability(n_qubits: usize) -> Result<Ratio<u64>> {
    check_size(n_qubits)?;
    let n = n_qubits as u64;
    Ok(Ratio::new(4, n * (n - 1)))
}

/// Probability that two uniformly picked slots form *any* of the `N/2`
/// entangled pairs: `(N/2) / C(N,2) = 1/(N−1)`.
pub fn any_pair_pick_probability(n_qubits: usize) -> Result<Ratio<u64>> {
    check_size(n_qubits)?;
    Ok(Ratio::new(1, n_qubits as u64 - 1))
}

#[derive(Clone, Debug)]
pub struct PopSequence {
    permutation: Vec<usize>,
    slot_of_qubit: Vec<usize>,
    labels: Vec<BellLabel>,
    register: BellPairRegister,
}

impl PopSequence {
    /// `labels[k]` is the state of pair `k`; `permutation[s]` the original
    /// qubit sent in slot `s`.
    pub fn new(labels: Vec<BellLabel>, permutation: Vec<usize>) -> Result<Self> {
        let n = permutation.len();
        check_size(n)?;
        if labels.len() * 2 != n {
            return Err(Error::Config(format!("{} labels for {n} qubits", labels.len())));
        }
        let mut slot_of_qubit = vec![usize::MAX; n];
        for (slot, &q) in permutation.iter().enumerate() {
            if q >= n || slot_of_qubit[q] != usize::MAX {
                return Err(Error::Config("permutation is not a bijection".into()));
            }
            slot_of_qubit[q] = slot;
        }
        let pairs: Vec<_> = labels
            .iter()
            .enumerate()
            .map(|(k, &l)| (slot_of_qubit[2 * k], slot_of_qubit[2 * k + 1], l))
            .collect();
        let register = BellPairRegister::from_pairs(n, &pairs);
        Ok(PopSequence { permutation, slot_of_qubit, labels, register })
    }

    /// Random labels and a uniformly random permutation.
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Result<Self> {
        check_size(n_qubits)?;
        let labels = (0..n_qubits / 2).map(|_| BellLabel::ALL[rng.random_range(0..4)]).collect();
        PopSequence::shuffled(labels, rng)
    }

    pub fn shuffled<R: Rng + ?Sized>(labels: Vec<BellLabel>, rng: &mut R) -> Result<Self> {
        let mut permutation: Vec<usize> = (0..labels.len() * 2).collect();
        permutation.shuffle(rng);
        PopSequence::new(labels, permutation)
    }

    pub fn n_qubits(&self) -> usize {
        self.permutation.len()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn labels(&self) -> &[BellLabel] {
        &self.labels
    }

    /// Original pair index of the qubit in `slot`.
    pub fn pair_of_slot(&self, slot: usize) -> usize {
        self.permutation[slot] / 2
    }

    /// Wire slots holding original pair `k`.
    pub fn slots_of_pair(&self, k: usize) -> (usize, usize) {
        (self.slot_of_qubit[2 * k], self.slot_of_qubit[2 * k + 1])
    }

    /// Whether two slots were prepared entangled with each other.
    pub fn prepared_together(&self, a: usize, b: usize) -> bool {
        a != b && self.pair_of_slot(a) == self.pair_of_slot(b)
    }

    /// Whether two slots are the two halves of pair 0 or pair 1, the pairs
    /// carrying the first 4-bit block.
    pub fn hits_target_block(&self, a: usize, b: usize) -> bool {
        self.prepared_together(a, b) && self.pair_of_slot(a) < 2
    }

    pub fn register(&self) -> &BellPairRegister {
        &self.register
    }

    pub(crate) fn register_mut(&mut self) -> &mut BellPairRegister {
        &mut self.register
    }

    /// After the permutation is announced, measures every original pair.
    pub fn measure_original_pairs<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Vec<BellLabel> {
        (0..self.labels.len())
            .map(|k| {
                let (x, y) = self.slots_of_pair(k);
                self.register.measure(x, y, rng).label()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn closed_form_values() {
        assert_eq!(pop_correct_pick_probability(4).unwrap(), Ratio::new(1, 3));
        assert_eq!(pop_correct_pick_probability(8).unwrap(), Ratio::new(1, 14));
        assert_eq!(pop_correct_pick_probability(16).unwrap(), Ratio::new(1, 60));
        assert_eq!(any_pair_pick_probability(8).unwrap(), Ratio::new(1, 7));
        for bad in [0, 2, 3, 5, 7] {
            assert!(matches!(pop_correct_pick_probability(bad), Err(Error::PopSize(_))));
        }
    }

    #[test]
    fn rejects_bad_permutations() {
        let labels = vec![BellLabel::PhiPlus; 2];
        assert!(PopSequence::new(labels.clone(), vec![0, 1, 2, 2]).is_err());
        assert!(PopSequence::new(labels.clone(), vec![0, 1, 2, 4]).is_err());
        assert!(PopSequence::new(labels, vec![0, 1, 2, 3, 4, 5]).is_err());
    }

    #[test]
    fn undisturbed_sequence_measures_back_to_its_labels() {
        let mut rng = stream(4, 0);
        for n in [4, 6, 10, 32] {
            let mut seq = PopSequence::random(n, &mut rng).unwrap();
            let labels = seq.labels().to_vec();
            assert_eq!(seq.measure_original_pairs(&mut rng), labels);
            let mut seen = vec![false; n];
            for &q in seq.permutation() {
                assert!(!seen[q]);
                seen[q] = true;
            }
        }
    }
}
