use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "WITHIN_CI")]
    WithinCi,
    #[serde(rename = "OUTSIDE_CI")]
    OutsideCi,
}

/// A binomial proportion with its 95% normal-approximation interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub successes: u64,
    pub trials: u64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub analytic: Option<f64>,
    /// `(value − analytic) / σ`, with σ from the analytic rate.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub z_score: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verdict: Option<Verdict>,
}

impl Estimate {
    /// `None` when there were no trials.
    pub fn proportion(successes: u64, trials: u64, analytic: Option<f64>) -> Option<Estimate> {
        if trials == 0 {
            return None;
        }
        let n = trials as f64;
        let value = successes as f64 / n;
        let half = Z_95 * (value * (1.0 - value) / n).sqrt();
        let (ci_lo, ci_hi) = ((value - half).max(0.0), (value + half).min(1.0));
        let z_score = analytic.map(|p| {
            let sigma = (p * (1.0 - p) / n).sqrt();
            if sigma > 0.0 {
                (value - p) / sigma
            } else if value == p {
                0.0
            } else {
                f64::MAX.copysign(value - p)
            }
        });
        let verdict = analytic.map(|p| {
            if ci_lo <= p && p <= ci_hi {
                Verdict::WithinCi
            } else {
                Verdict::OutsideCi
            }
        });
        Some(Estimate { value, successes, trials, ci_lo, ci_hi, analytic, z_score, verdict })
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_hi - self.ci_lo)
    }

    /// Binomial standard error at the analytic rate (or the observed one).
    pub fn sigma(&self) -> f64 {
        let p = self.analytic.unwrap_or(self.value);
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    pub fn within_sigmas(&self, k: f64) -> bool {
        self.z_score.is_some_and(|z| z.abs() <= k)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.ci_lo <= x && x <= self.ci_hi
    }
}

/// Plug-in mutual information (bits) of a joint count table.
pub fn plug_in_mutual_information<const A: usize, const B: usize>(joint: &[[u64; B]; A]) -> Result<f64> {
    let total: u64 = joint.iter().flatten().sum();
    if total == 0 {
        return Err(Error::EmptyHistogram);
    }
    let n = total as f64;
    let row: Vec<f64> = joint.iter().map(|r| r.iter().sum::<u64>() as f64 / n).collect();
    let col: Vec<f64> = (0..B).map(|j| joint.iter().map(|r| r[j]).sum::<u64>() as f64 / n).collect();
    let mut mi = 0.0;
    for (i, r) in joint.iter().enumerate() {
        for (j, &c) in r.iter().enumerate() {
            if c > 0 {
                let p = c as f64 / n;
                mi += p * (p / (row[i] * col[j])).log2();
            }
        }
    }
    Ok(mi.max(0.0))
}

/// Pearson goodness of fit of `observed` counts against `expected` probabilities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareFit {
    pub statistic: f64,
    pub dof: u32,
    pub alpha: f64,
    pub critical: f64,
    pub p_value: f64,
    /// Counts that fell outside the expected support (forbidden outcomes).
    pub off_support: u64,
    pub pass: bool,
}

pub fn chi_square_fit(observed: &[u64], expected: &[f64], off_support: u64, alpha: f64) -> Result<ChiSquareFit> {
    if observed.len() != expected.len() || observed.len() < 2 {
        return Err(Error::Config("chi-square needs matching category lists of length >= 2".into()));
    }
    let n: u64 = observed.iter().sum::<u64>() + off_support;
    if n == 0 {
        return Err(Error::EmptyHistogram);
    }
    let statistic: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &p)| {
            let e = p * n as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let dof = observed.len() as u32 - 1;
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    let critical = dist.inverse_cdf(1.0 - alpha);
    let p_value = 1.0 - dist.cdf(statistic);
    Ok(ChiSquareFit {
        statistic,
        dof,
        alpha,
        critical,
        p_value,
        off_support,
        pass: off_support == 0 && statistic < critical,
    })
}
