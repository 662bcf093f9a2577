use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("order violation: {0}")]
    Order(String),
    #[error("not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("cap exceeded: {what} (limit {limit}, reached {count})")]
    Cap {
        what: String,
        limit: usize,
        count: usize,
    },
    #[error("lift error: {0}")]
    Lift(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("incoherent description: {0}")]
    Incoherent(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
