use std::io;
use std::path::{Path, PathBuf};

use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Param(String),
    #[error("missing artifact {}", .0.display())]
    MissingArtifact(PathBuf),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Param(_) => "parameter_out_of_range",
            CliError::MissingArtifact(_) => "missing_artifact",
            CliError::Io { .. } => "io",
            CliError::Data(_) => "data",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Param(_) => 2,
            CliError::MissingArtifact(_) => 3,
            CliError::Io { .. } | CliError::Data(_) => 1,
        }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": { "kind": self.kind(), "message": self.to_string() } }).to_string()
    }

    pub fn io(path: &Path, source: io::Error) -> CliError {
        if source.kind() == io::ErrorKind::NotFound {
            CliError::MissingArtifact(path.to_owned())
        } else {
            CliError::Io { path: path.to_owned(), source }
        }
    }

    pub fn data(e: impl std::fmt::Display) -> CliError {
        CliError::Data(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
