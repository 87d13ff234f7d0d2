//! Entanglement-based BB84 baseline.
//!
//! Alice keeps one half of each `|Φ⁺⟩` and sends the other to Bob. Each
//! measures in a random `Z` or `X` basis and they keep the rounds where the
//! bases agree. `|Φ⁺⟩ = (|00⟩+|11⟩)/√2 = (|++⟩+|−−⟩)/√2`, so kept rounds are
//! perfectly correlated.
//!
//! A qubit here is tracked as "an eigenstate of basis B with value v", which
//! is all the measurement statistics need: measuring in B returns v, in the
//! other basis a fair coin.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::{stream, GLOBAL_STREAM};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Basis {
        if rng.random() {
            Basis::X
        } else {
            Basis::Z
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Eigenstate {
    basis: Basis,
    value: bool,
}

impl Eigenstate {
    fn measure<R: Rng + ?Sized>(self, basis: Basis, rng: &mut R) -> bool {
        if basis == self.basis {
            self.value
        } else {
            rng.random()
        }
    }
}

/// One shared `|Φ⁺⟩`, optionally intercepted on Bob's side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bb84Round {
    pub alice_basis: Basis,
    pub bob_basis: Basis,
    pub alice_bit: bool,
    pub bob_bit: bool,
    /// Eve's basis and result when she measured and resent Bob's qubit.
    pub eve: Option<(Basis, bool)>,
}

impl Bb84Round {
    pub fn kept(&self) -> bool {
        self.alice_basis == self.bob_basis
    }
}

/// Measures both halves of a fresh `|Φ⁺⟩`; with `eve_basis` set, Eve first
/// measures Bob's half in that basis and resends her result.
pub fn epr_round<R: Rng + ?Sized>(
    alice_basis: Basis,
    bob_basis: Basis,
    eve_basis: Option<Basis>,
    rng: &mut R,
) -> Bb84Round {
    match eve_basis {
        None => {
            // Alice measures first; Bob's half collapses onto her result.
            let alice_bit: bool = rng.random();
            let bob_half = Eigenstate { basis: alice_basis, value: alice_bit };
            let bob_bit = bob_half.measure(bob_basis, rng);
            Bb84Round { alice_basis, bob_basis, alice_bit, bob_bit, eve: None }
        }
        Some(e) => {
            let eve_bit: bool = rng.random();
            let collapsed = Eigenstate { basis: e, value: eve_bit };
            let alice_bit = collapsed.measure(alice_basis, rng);
            let bob_bit = collapsed.measure(bob_basis, rng);
            Bb84Round { alice_basis, bob_basis, alice_bit, bob_bit, eve: Some((e, eve_bit)) }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiftedKeys {
    pub alice: Vec<bool>,
    pub bob: Vec<bool>,
    pub sent: usize,
}

impl SiftedKeys {
    pub fn kept_fraction(&self) -> f64 {
        self.alice.len() as f64 / self.sent as f64
    }
}

/// Runs `n_pairs` unattacked rounds and keeps the matching-basis ones.
pub fn bb84_epr_baseline(n_pairs: usize, seed: u64) -> SiftedKeys {
    let mut rng = stream(seed, GLOBAL_STREAM);
    let mut keys = SiftedKeys { alice: Vec::new(), bob: Vec::new(), sent: n_pairs };
    for _ in 0..n_pairs {
        let a = Basis::random(&mut rng);
        let b = Basis::random(&mut rng);
        let r = epr_round(a, b, None, &mut rng);
        if r.kept() {
            keys.alice.push(r.alice_bit);
            keys.bob.push(r.bob_bit);
        }
    }
    keys
}
