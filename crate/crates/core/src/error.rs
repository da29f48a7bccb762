//! Error types shared across the kernel.

/// Evaluation, preset, and driver errors.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// det F ≤ 0: inverted or degenerate deformation.
    #[error("non-positive Jacobian: det F = {0}")]
    NonPositiveJacobian(f64),

    /// Fiber pair (α, β) with β < α or an index outside 1..3.
    #[error("invalid fiber pair ({alpha},{beta}); need 1 <= alpha <= beta <= 3")]
    InvalidPair { alpha: usize, beta: usize },

    /// Fiber direction is not a unit vector.
    #[error("fiber direction {index} has norm {norm}, expected 1")]
    NonUnitFiber { index: usize, norm: f64 },

    /// Logarithmic activation left its domain: energy blow-up. Drivers treat
    /// this as a failed load step, not a panic.
    #[error("log activation out of domain: w1*x = {0} >= 1")]
    LogDomain(f64),

    /// A table row addresses an invariant slot that is neither 1..15 nor a
    /// declared mixed invariant.
    #[error("row addresses unknown invariant slot {0}")]
    UnknownInvariantSlot(u32),

    /// An incompressible table contains a volumetric (slot 3) row.
    #[error("incompressible table contains a volumetric (slot 3) row")]
    VolumetricRowInIncompressible,

    /// Incompressible stress evaluation without a supplied pressure.
    #[error("incompressible table requires an explicit hydrostatic pressure")]
    MissingPressure,

    /// Incompressible stress evaluation away from det F = 1.
    #[error("incompressible table requires det F = 1, got {0}")]
    NotIsochoric(f64),

    /// Assembled stress failed the internal symmetry consistency bound.
    #[error("assembled stress asymmetric beyond tolerance: relative skew {0}")]
    AsymmetricStress(f64),

    /// Newton iteration on the free stretches did not converge.
    #[error("no convergence after {iterations} iterations, last residual {residual}")]
    NoConvergence { iterations: usize, residual: f64 },

    /// A load step failed (usually a LogDomain blow-up at that control value).
    #[error("load step failed at control value {control}: {source}")]
    StepFailure {
        control: f64,
        #[source]
        source: Box<Error>,
    },

    /// Malformed load path (non-monotone controls, missing reference point, ...).
    #[error("invalid load path: {0}")]
    InvalidPath(String),

    /// Preset name not in the catalog.
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    /// A required preset parameter was not supplied.
    #[error("preset `{preset}` missing parameter `{name}`")]
    MissingParameter { preset: String, name: String },

    /// A supplied parameter name the preset does not define.
    #[error("preset `{preset}` has no parameter `{name}`")]
    UnknownParameter { preset: String, name: String },

    /// A parameter that must be positive (exponential/log weights) is not.
    #[error("parameter `{name}` must be positive, got {value}")]
    NonPositiveModulus { name: String, value: f64 },

    /// Deck parsing failed.
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Deck parse failure, reported as `line:col: message`.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    /// 1-based physical line number.
    pub line: usize,
    /// 1-based column number.
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            col,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
