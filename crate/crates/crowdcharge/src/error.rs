use std::path::PathBuf;

use thiserror::Error;

/// Everything that can go wrong across the crate, from bad model inputs to
/// unwritable output paths.
#[derive(Debug, Error)]
pub enum Error {
    #[error("transfer amount {amount} is negative")]
    NegativeTransfer { amount: f64 },

    #[error("transfer amount {amount} exceeds sender charge {sender_soc}")]
    TransferExceedsSender { amount: f64, sender_soc: f64 },

    #[error(
        "transfer of {amount} would push receiver past 100% (receiver at {receiver_soc}, loss factor {beta})"
    )]
    TransferOverflowsReceiver {
        amount: f64,
        receiver_soc: f64,
        beta: f64,
    },

    #[error("loss factor {beta} outside [0, 1)")]
    InvalidLossFactor { beta: f64 },

    #[error("cannot normalize an all-zero energy vector")]
    EmptyDistribution,

    #[error("distribution lengths differ: {left} vs {right}")]
    DistributionLengthMismatch { left: usize, right: usize },

    #[error("configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
