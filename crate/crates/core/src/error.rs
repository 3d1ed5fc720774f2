use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("assembly error in element {element}: {reason}")]
    Assembly { element: usize, reason: String },
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("integration failure at t = {time}: {reason}")]
    Integration { time: f64, reason: String },
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("optimization failure: {0}")]
    Optimization(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
