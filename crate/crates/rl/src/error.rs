use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] si2e_core::Error),

    #[error("invalid MDP: {0}")]
    InvalidMdp(String),

    #[error("map line {line}: {msg}")]
    Map { line: usize, msg: String },

    #[error("goal is not reachable from the start cell")]
    UnreachableGoal,

    #[error("state {state} out of range for {count} states")]
    InvalidState { state: usize, count: usize },

    #[error("action {action} out of range for {count} actions")]
    InvalidAction { action: usize, count: usize },

    #[error("invalid training config: {0}")]
    InvalidConfig(String),

    #[error("update needs at least one transition")]
    EmptyBatch,
}

pub type Result<T> = std::result::Result<T, Error>;
