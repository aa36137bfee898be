use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ServiceError {
    #[error("unknown session {0}")]
    UnknownSession(String),
    #[error("unknown token")]
    UnknownToken,
    #[error("join a session first")]
    NotJoined,
    #[error("spectators cannot act")]
    NotASeat,
    #[error("not your turn: player {expected} is to act")]
    NotYourTurn { expected: usize },
    #[error("game is finished")]
    Finished,
    /// Engine rejection, relayed verbatim.
    #[error("{0}")]
    Rejected(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("bad request: {0}")]
    BadRequest(String),
    #[error("bot failed: {0}")]
    Bot(String),
}
