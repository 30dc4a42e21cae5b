use std::path::PathBuf;

use thiserror::Error;
use uniseg::ablate::AblateError;
use uniseg::bpe::BpeError;
use uniseg::corpus::CorpusError;
use uniseg::metrics::MetricsError;
use uniseg::romanize::RomanizeError;
use uniseg::transfer::TransferError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Romanize(#[from] RomanizeError),
    #[error(transparent)]
    Bpe(#[from] BpeError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Transfer(#[from] TransferError),
    #[error(transparent)]
    Ablate(#[from] AblateError),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} is not valid UTF-8")]
    Encoding { path: PathBuf },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn module(&self) -> &'static str {
        match self {
            CliError::Corpus(_) => "corpus",
            CliError::Romanize(_) => "romanize",
            CliError::Bpe(_) => "bpe",
            CliError::Metrics(_) => "metrics",
            CliError::Transfer(_) => "transfer",
            CliError::Ablate(_) => "ablate",
            CliError::Read { .. } | CliError::Write { .. } | CliError::Encoding { .. } => "io",
            CliError::Usage(_) => "cli",
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Corpus(e) => e.kind(),
            CliError::Romanize(e) => e.kind(),
            CliError::Bpe(e) => e.kind(),
            CliError::Metrics(e) => e.kind(),
            CliError::Transfer(e) => e.kind(),
            CliError::Ablate(e) => e.kind(),
            CliError::Read { .. } => "read",
            CliError::Write { .. } => "write",
            CliError::Encoding { .. } => "encoding",
            CliError::Usage(_) => "usage",
        }
    }

    /// The single diagnostic line printed on stderr.
    pub fn diagnostic(&self) -> String {
        let msg = self.to_string().replace('\n', " ");
        format!("uniseg: {} error [{}]: {msg}", self.module(), self.kind())
    }
}
