use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("invalid value for `{key}`: {msg}")]
    Value { key: String, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Rl(#[from] si2e_rl::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("worker pool: {0}")]
    Pool(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    /// 2 for anything the user can fix in the config, map or output path;
    /// 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Value { .. } | Error::Io { .. } => 2,
            Error::Rl(e) => match e {
                si2e_rl::Error::Map { .. }
                | si2e_rl::Error::UnreachableGoal
                | si2e_rl::Error::InvalidConfig(_)
                | si2e_rl::Error::InvalidMdp(_) => 2,
                _ => 1,
            },
            Error::Json(_) | Error::Pool(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
