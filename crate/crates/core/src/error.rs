use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("generators close to more than {bound} elements")]
    BadGenerators { bound: usize },
    #[error("degenerate element: {0}")]
    Degenerate(String),
    #[error("geometry check failed: {0}")]
    Geometry(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
