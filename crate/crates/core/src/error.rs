use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("key must contain at least one bit")]
    EmptyKey,
    #[error("key length {0} is odd; one Bell pair carries two bits")]
    OddKeyLength(usize),
    #[error("key length {0} is not a multiple of 4")]
    KeyNotBlockAligned(usize),
    #[error("invalid key character {0:?}")]
    InvalidKeyBit(char),
    #[error("particle-order permutation needs an even N >= 4, got {0}")]
    PopSize(usize),
    #[error("{name} = {value} lies outside {range}")]
    Domain { name: &'static str, value: f64, range: &'static str },
    #[error("security margin does not change sign on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("invalid campaign configuration: {0}")]
    Config(String),
    #[error("mutual information needs at least one sample")]
    EmptyHistogram,
    #[error("{path}: {source}")]
    File { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain { name, value, range: "[0, 1]" })
    }
}
