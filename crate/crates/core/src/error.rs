use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FtnError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("frequency {f} Hz lies outside the principal band [-{half_band}, {half_band}] Hz")]
    OutOfBand { f: f64, half_band: f64 },

    #[error("matrix is not numerically positive definite: pivot {index} is {pivot:e}")]
    Conditioning { index: usize, pivot: f64 },

    #[error("invalid constellation `{name}`: {reason}")]
    Constellation { name: String, reason: String },
}

impl FtnError {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        FtnError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures caused by finite-precision arithmetic rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, FtnError::Conditioning { .. })
    }
}

pub type Result<T> = std::result::Result<T, FtnError>;
