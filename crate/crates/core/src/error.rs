use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operands are defined on different grids")]
    GridMismatch,

    #[error("filter support {delay_width}x{doppler_width} aliases on a {m}x{n} grid")]
    Aliasing {
        delay_width: i64,
        doppler_width: i64,
        m: usize,
        n: usize,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("channel outside the crystalline regime: {0}")]
    NotCrystalline(String),

    #[error("no admissible support rectangle captures the requested energy fraction")]
    SupportNotFound,

    #[error("filter support is not contained in the layout support rectangle")]
    SupportMismatch,

    #[error("Hermitian solve failed at pivot {pivot} (pivot value {value:e}, diagonal ratio {ratio:e})")]
    SolveFailed { pivot: usize, value: f64, ratio: f64 },

    #[error("signal is identically zero")]
    ZeroSignal,

    #[error("frame plan mode does not match the requested operation")]
    ModeMismatch,

    #[error("estimator read window overlaps the data region; guard strip too narrow")]
    GuardTooNarrow,

    #[error("unsupported constellation size {0}")]
    UnsupportedConstellation(usize),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
