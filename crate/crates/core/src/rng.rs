//! Seeded, splittable randomness.
//!
//! Block `i` of a campaign always draws from ChaCha8 stream `i` of the
//! master seed, so results do not depend on how work is split across
//! threads. Whole-run choices (which blocks are attacked or compared, global
//! permutations) use reserved streams at the top of the stream space.

use rand::seq::index;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dyadic::Dyadic;

pub type StreamRng = ChaCha8Rng;

pub const ATTACK_SELECTION_STREAM: u64 = u64::MAX;
pub const COMPARE_SELECTION_STREAM: u64 = u64::MAX - 1;
pub const GLOBAL_STREAM: u64 = u64::MAX - 2;

pub fn stream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Marks exactly `round(fraction · n)` of `n` items, chosen without replacement.
pub fn exact_subset<R: Rng + ?Sized>(rng: &mut R, n: usize, fraction: f64) -> Vec<bool> {
    let m = ((fraction * n as f64).round() as usize).min(n);
    let mut chosen = vec![false; n];
    for i in index::sample(rng, n, m) {
        chosen[i] = true;
    }
    chosen
}

/// Draws from a finite distribution with dyadic probabilities, exactly.
///
/// Panics if the probabilities do not sum to one.
pub fn sample_dyadic<T: Copy, R: Rng + ?Sized>(
    rng: &mut R,
    dist: impl IntoIterator<Item = (T, Dyadic)>,
) -> T {
    let items: Vec<(T, Dyadic)> = dist.into_iter().collect();
    let exp = items.iter().map(|(_, p)| p.exponent()).max().unwrap_or(0);
    assert!(exp < 63, "probability resolution too fine");
    let total: i64 = items.iter().map(|(_, p)| p.numerator_at(exp)).sum();
    assert_eq!(total, 1i64 << exp, "distribution does not sum to one");
    let mut draw = rng.random_range(0..total);
    for (item, p) in &items {
        let w = p.numerator_at(exp);
        if draw < w {
            return *item;
        }
        draw -= w;
    }
    unreachable!("draw below total weight")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = stream(7, 3).random();
        let b: u64 = stream(7, 3).random();
        let c: u64 = stream(7, 4).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn exact_subset_size() {
        let mut rng = stream(1, 0);
        let s = exact_subset(&mut rng, 1000, 0.3);
        assert_eq!(s.iter().filter(|&&b| b).count(), 300);
        assert!(exact_subset(&mut rng, 10, 0.0).iter().all(|&b| !b));
        assert!(exact_subset(&mut rng, 10, 1.0).iter().all(|&b| b));
    }

    #[test]
    fn point_mass_is_always_drawn() {
        let mut rng = stream(2, 0);
        for _ in 0..100 {
            assert_eq!(sample_dyadic(&mut rng, [('a', Dyadic::ZERO), ('b', Dyadic::ONE)]), 'b');
        }
    }

    #[test]
    #[should_panic(expected = "does not sum to one")]
    fn rejects_subnormalised_distribution() {
        let mut rng = stream(2, 0);
        sample_dyadic(&mut rng, [('a', Dyadic::HALF)]);
    }
}
