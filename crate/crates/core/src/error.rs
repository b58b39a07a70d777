use thiserror::Error;

/// Errors raised by the channel, equalizer and simulation layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("incidence elevation theta_l must be in (0, pi/2], got {0}")]
    GrazingIncidence(f64),

    #[error("incident field is only defined for phi_l = 0, got {0}")]
    UnsupportedAzimuth(f64),

    #[error("passivity factor undefined for a non-dispersive link (a1 = 0); use the delta channel")]
    NondispersiveNormalization,

    #[error("closed-form CIR requires in-plane reflection (phi_l = 0, phi_p = pi)")]
    NotInPlane,

    #[error("a2 = 0: the general CIR parametrization divides by a2, use the in-plane closed form")]
    InPlaneUseCorollary,

    #[error("impulse response is identically zero")]
    EmptyCir,

    #[error("CIR sampling too coarse: {samples_per_symbol:.1} samples per symbol, need at least {required}")]
    InsufficientResolution { samples_per_symbol: f64, required: usize },

    #[error("equalizer design is ill-conditioned (condition estimate {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("MLSE state space too large: {taps} taps (at most {max})")]
    StateSpaceTooLarge { taps: usize, max: usize },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
