use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("degree violation: {0}")]
    Degree(String),

    #[error("differential does not square to zero on basis element `{element}`")]
    NotSquareZero { element: String },

    #[error("identity `{identity}` fails: {detail}")]
    Validation { identity: String, detail: String },

    #[error("element is not Maurer-Cartan: {0}")]
    NotMaurerCartan(String),

    #[error("invalid morphism: {0}")]
    InvalidMorphism(String),

    #[error("truncation window exceeded: {0}")]
    WindowOverflow(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("incomparable invariants: {0}")]
    Incomparable(String),
}

impl Error {
    pub fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    pub fn validation(identity: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Validation {
            identity: identity.into(),
            detail: detail.into(),
        }
    }

    /// Short machine-readable tag used in JSON error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::Shape(_) => "shape",
            Error::Degree(_) => "degree",
            Error::NotSquareZero { .. } => "not_square_zero",
            Error::Validation { .. } => "validation",
            Error::NotMaurerCartan(_) => "not_maurer_cartan",
            Error::InvalidMorphism(_) => "invalid_morphism",
            Error::WindowOverflow(_) => "window_overflow",
            Error::Unsupported(_) => "unsupported",
            Error::Incomparable(_) => "incomparable",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
