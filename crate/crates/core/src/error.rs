use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid resolution {0}: must be even and >= 4")]
    InvalidResolution(usize),

    #[error("resolution mismatch: {0} vs {1}")]
    ResolutionMismatch(usize, usize),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unknown initial datum preset `{0}`")]
    UnknownPreset(String),

    #[error("field has support outside the Galerkin cutoff (mode {mode:?}, |k|^2 = {norm_sq} > {cutoff_sq})")]
    OutsideCutoff {
        mode: [i64; 3],
        norm_sq: i64,
        cutoff_sq: f64,
    },

    #[error("non-finite state at t = {time}")]
    NonFinite { time: f64 },

    #[error("trajectory needs at least {needed} samples, found {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("trajectory ends at t = {end} but the analysis needs a horizon of at least {required}")]
    HorizonTooShort { end: f64, required: f64 },

    #[error(
        "pigeonhole contradiction: no sample in [0, {theta}) has |v0| |grad v| <= {eta}, \
         yet 2 * int |grad v|^2 = {dissipation} would exceed |v0|^2 = {energy}"
    )]
    PigeonholeContradiction {
        theta: f64,
        eta: f64,
        dissipation: f64,
        energy: f64,
    },

    #[error("sample grids differ: {0}")]
    GridMismatch(String),

    #[error("trajectory samples carry no stored fields (run with keep_fields)")]
    MissingFields,

    #[error("test mode {mode:?} is not representable at resolution {resolution}")]
    ModeOutOfRange { mode: [i64; 3], resolution: usize },

    #[error("interval [{start}, {end}] lies outside the sampled span [{span_start}, {span_end}]")]
    IntervalOutsideSpan {
        start: f64,
        end: f64,
        span_start: f64,
        span_end: f64,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
