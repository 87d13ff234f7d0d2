//! Closed-form information quantities for the measure-resend attack.
//!
//! With Eve attacking a fraction `f` of blocks:
//!
//! ```text
//!   I(A:E) = 5f/8
//!   I(A:B) = 1 − H(3f/8)
//! ```
//!
//! The protocol is usable while `I(A:B) ≥ I(A:E)`; the crossover `f*` fixes
//! the tolerable error rate `e_max = 3f*/8`.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Error, Result};
use crate::protocols::pop::pop_correct_pick_probability;

/// Per-attacked-block probability that Bob's outcome is wrong.
pub const DETECTION_PER_ATTACKED_BLOCK: f64 = 3.0 / 8.0;
/// Per-attacked-block probability that Eve reads all four bits correctly.
pub const EVE_BLOCK_ACCURACY: f64 = 5.0 / 8.0;
/// Detection probability claimed for the same attack in the original analysis.
pub const CLAIMED_DETECTION: f64 = 15.0 / 16.0;

pub const BISECTION_BRACKET: (f64, f64) = (1e-6, 1.0 - 1e-6);
pub const BISECTION_TOLERANCE: f64 = 1e-9;

/// Shannon binary entropy in bits, with `H(0) = H(1) = 0`.
pub fn binary_entropy(u: f64) -> Result<f64> {
    check_unit("u", u)?;
    Ok(entropy_bits([u, 1.0 - u]))
}

/// Shannon entropy of a probability vector, `0·log 0 = 0`.
pub fn entropy_bits(probs: impl IntoIterator<Item = f64>) -> f64 {
    probs
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum::<f64>()
        + 0.0 // -0.0 → 0.0
}

pub fn eve_info(f: f64) -> Result<f64> {
    check_unit("f", f)?;
    Ok(5.0 * f / 8.0)
}

pub fn ab_info(f: f64) -> Result<f64> {
    check_unit("f", f)?;
    Ok(1.0 - binary_entropy(3.0 * f / 8.0)?)
}

/// `I(A:B) − I(A:E)`.
pub fn margin(f: f64) -> Result<f64> {
    Ok(ab_info(f)? - eve_info(f)?)
}

/// Entropy of Eve's outcome for one attacked block: `{5/8, 1/8, 1/8, 1/8}`.
pub fn eve_ignorance_bits() -> f64 {
    entropy_bits([5.0 / 8.0, 1.0 / 8.0, 1.0 / 8.0, 1.0 / 8.0])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub f_star: f64,
    pub e_max: f64,
    pub iterations: u32,
}

/// Bisection for the root of [`margin`] on `bracket`.
pub fn find_threshold(bracket: (f64, f64), tolerance: f64) -> Result<Threshold> {
    let (mut lo, mut hi) = bracket;
    let (m_lo, m_hi) = (margin(lo)?, margin(hi)?);
    if m_lo.signum() == m_hi.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    let mut iterations = 0;
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if margin(mid)?.signum() == m_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let f_star = 0.5 * (lo + hi);
    Ok(Threshold { f_star, e_max: 3.0 * f_star / 8.0, iterations })
}

pub fn security_threshold() -> Result<Threshold> {
    find_threshold(BISECTION_BRACKET, BISECTION_TOLERANCE)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub f: f64,
    pub i_ab: f64,
    pub i_ae: f64,
    pub margin: f64,
}

/// `I(A:B)`, `I(A:E)` and their margin on `points` evenly spaced `f` in `[0, 1]`.
pub fn security_curve(points: usize) -> Result<Vec<CurvePoint>> {
    if points < 2 {
        return Err(Error::Config("a curve needs at least 2 points".into()));
    }
    (0..points)
        .map(|i| {
            let f = i as f64 / (points - 1) as f64;
            let (i_ab, i_ae) = (ab_info(f)?, eve_info(f)?);
            Ok(CurvePoint { f, i_ab, i_ae, margin: i_ab - i_ae })
        })
        .collect()
}

/// `I(A:E) = 4/(N(N−1)) · f · 5/4 = 5f/(N(N−1))` under particle-order permutation.
pub fn pop_eve_info(f: f64, n_qubits: usize) -> Result<f64> {
    check_unit("f", f)?;
    let p = pop_correct_pick_probability(n_qubits)?;
    Ok(*p.numer() as f64 / *p.denom() as f64 * f * 1.25)
}

/// Exact `5f/(N(N−1))` for rational `f`.
pub fn pop_eve_info_exact(f: Ratio<u64>, n_qubits: usize) -> Result<Ratio<u64>> {
    if f > Ratio::from_integer(1) {
        return Err(Error::Domain { name: "f", value: *f.numer() as f64 / *f.denom() as f64, range: "[0, 1]" });
    }
    Ok(pop_correct_pick_probability(n_qubits)? * f * Ratio::new(5, 4))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub name: String,
    pub e_max: f64,
    pub note: String,
}

/// Tolerable error rates for comparison. Only the last row is computed here.
pub fn reference_constants() -> Result<Vec<ReferenceRow>> {
    let row = |name: &str, e_max: f64, note: &str| ReferenceRow {
        name: name.into(),
        e_max,
        note: note.into(),
    };
    Ok(vec![
        row("BB84_arbitrary", 0.11, "cited: BB84 against arbitrary attacks"),
        row("GV_measure_resend", 0.26, "cited: GV protocol under measure-resend"),
        row("prior_claim", 0.11, "cited: previously claimed for this protocol"),
        row(
            "computed_measure_resend",
            security_threshold()?.e_max,
            "computed: 3/8 of the I(A:B) = I(A:E) crossover",
        ),
    ])
}
