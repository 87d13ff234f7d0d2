use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::adversary::{AttackConfig, GuessPolicy};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProtocolKind {
    #[serde(alias = "p1")]
    P1,
    #[serde(alias = "p2")]
    P2,
    #[serde(rename = "BB84EPR", alias = "bb84epr", alias = "bb84")]
    Bb84Epr,
    #[serde(rename = "POP", alias = "pop")]
    Pop,
}

impl std::str::FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "p1" => Ok(ProtocolKind::P1),
            "p2" => Ok(ProtocolKind::P2),
            "bb84" | "bb84epr" => Ok(ProtocolKind::Bb84Epr),
            "pop" => Ok(ProtocolKind::Pop),
            other => Err(Error::Config(format!("unknown protocol {other:?}"))),
        }
    }
}

/// Grid for a sweep: attack fractions, or sequence lengths for `POP`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepGrid {
    F(Vec<f64>),
    N(Vec<usize>),
}

impl SweepGrid {
    pub fn len(&self) -> usize {
        match self {
            SweepGrid::F(v) => v.len(),
            SweepGrid::N(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn default_compare_fraction() -> f64 {
    0.5
}

fn default_n_qubits() -> usize {
    4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub protocol: ProtocolKind,
    pub n_blocks: u64,
    #[serde(default)]
    pub f: f64,
    pub seed: u64,
    /// Fraction of blocks (Protocol 1: decoy pairs per data pair) publicly compared.
    #[serde(default = "default_compare_fraction")]
    pub compare_fraction: f64,
    #[serde(default)]
    pub policy: GuessPolicy,
    /// Sequence length `N` for `POP` campaigns.
    #[serde(default = "default_n_qubits")]
    pub n_qubits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepGrid>,
}

impl CampaignConfig {
    pub fn new(protocol: ProtocolKind, n_blocks: u64, f: f64, seed: u64) -> Self {
        CampaignConfig {
            protocol,
            n_blocks,
            f,
            seed,
            compare_fraction: default_compare_fraction(),
            policy: GuessPolicy::Uniform,
            n_qubits: default_n_qubits(),
            sweep: None,
        }
    }

    pub fn attack(&self) -> AttackConfig {
        AttackConfig { f: self.f, seed: self.seed, policy: self.policy }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n_blocks < 1 {
            return bad("n_blocks must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.f) {
            return bad(format!("f = {} must lie in [0, 1]", self.f));
        }
        if !(self.compare_fraction > 0.0 && self.compare_fraction <= 1.0) {
            return bad(format!("compare_fraction = {} must lie in (0, 1]", self.compare_fraction));
        }
        if self.protocol == ProtocolKind::Pop && (self.n_qubits < 4 || !self.n_qubits.is_multiple_of(2)) {
            return Err(Error::PopSize(self.n_qubits));
        }
        match &self.sweep {
            Some(g) if g.is_empty() => bad("sweep grid is empty".into()),
            Some(SweepGrid::F(v)) if v.iter().any(|f| !(0.0..=1.0).contains(f)) => {
                bad("sweep f values must lie in [0, 1]".into())
            }
            Some(SweepGrid::N(v)) => {
                if self.protocol != ProtocolKind::Pop {
                    return bad("an N grid only applies to POP campaigns".into());
                }
                match v.iter().find(|&&n| n < 4 || n % 2 != 0) {
                    Some(&n) => Err(Error::PopSize(n)),
                    None => Ok(()),
                }
            }
            _ => Ok(()),
        }
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let c: CampaignConfig = load(path)?;
        c.validate()?;
        Ok(c)
    }
}

/// Reads TOML or JSON depending on the file extension (JSON if unsure).
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| Error::File { path: path.to_path_buf(), source })?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("toml") => Ok(toml::from_str(&text)?),
        _ => Ok(serde_json::from_str(&text)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_and_json_forms() {
        let t: CampaignConfig = toml::from_str(
            r#"
            protocol = "P2"
            n_blocks = 1000
            f = 0.5
            seed = 7
            sweep = { f = [0.0, 0.5] }
            "#,
        )
        .unwrap();
        assert_eq!(t.compare_fraction, 0.5);
        assert_eq!(t.sweep, Some(SweepGrid::F(vec![0.0, 0.5])));
        t.validate().unwrap();

        let j: CampaignConfig =
            serde_json::from_str(r#"{"protocol":"POP","n_blocks":10,"seed":1,"sweep":{"n":[4,8]}}"#).unwrap();
        j.validate().unwrap();
        assert!(serde_json::from_str::<CampaignConfig>(r#"{"protocol":"P2","n_blocks":1,"seed":1,"x":1}"#).is_err());
    }

    #[test]
    fn validation_errors() {
        let mut c = CampaignConfig::new(ProtocolKind::P2, 0, 0.5, 1);
        assert!(c.validate().is_err());
        c.n_blocks = 10;
        c.compare_fraction = 0.0;
        assert!(c.validate().is_err());
        c.compare_fraction = 1.0;
        c.sweep = Some(SweepGrid::F(vec![]));
        assert!(c.validate().is_err());
        c.sweep = Some(SweepGrid::N(vec![4]));
        assert!(c.validate().is_err());
        c.protocol = ProtocolKind::Pop;
        c.sweep = Some(SweepGrid::N(vec![4, 7]));
        assert!(matches!(c.validate(), Err(Error::PopSize(7))));
    }
}
