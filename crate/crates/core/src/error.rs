use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A kernel parameter is missing or outside its domain.
    InvalidParameter { name: String, reason: String },
    /// The kernel family is not defined in the requested dimension.
    UnsupportedDimension { kind: &'static str, dim: usize },
    /// `Ŵ` was requested at `ξ = 0` for a kernel that is discontinuous there.
    OriginEvaluation,
    DimensionMismatch { expected: usize, got: usize },
    InvalidGrid(&'static str),
    InvalidTable(&'static str),
    /// No sign change of the dispersion quartic was found near the origin.
    NoRoot { axis: usize, c: f64, t: f64 },
    /// Continuation jumped to another branch of the zero set.
    LostBranch { axis: usize, c: f64, t: f64 },
    /// A converged root does not satisfy the quartic to the residual tolerance.
    ResidualTooLarge { axis: usize, c: f64, t: f64, residual: f64 },
    /// The two branches give different limits of `(γ/t)²`.
    BranchMismatch { plus: f64, minus: f64 },
    InsufficientSamples { needed: usize, got: usize },
    NonRadialModel,
    SonicSpeedUndefined,
    /// A speed at or below the sonic speed was given where `c > c_s` is required.
    SubsonicSpeed { c: f64, c_s: f64 },
    DivergentQuadrature,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, reason } => {
                write!(f, "invalid parameter `{name}`: {reason}")
            }
            Error::UnsupportedDimension { kind, dim } => {
                write!(f, "kernel `{kind}` is not defined in dimension {dim}")
            }
            Error::OriginEvaluation => {
                write!(f, "kernel is discontinuous at the origin and cannot be evaluated there")
            }
            Error::DimensionMismatch { expected, got } => {
                write!(f, "expected a vector of length {expected}, got {got}")
            }
            Error::InvalidGrid(msg) => write!(f, "invalid grid: {msg}"),
            Error::InvalidTable(msg) => write!(f, "invalid profile table: {msg}"),
            Error::ResidualTooLarge { axis, c, t, residual } => write!(
                f,
                "dispersion quartic residual {residual:e} too large on axis {axis} at c = {c}, t = {t}"
            ),
            Error::NoRoot { axis, c, t } => {
                write!(f, "no root of the dispersion quartic on axis {axis} at c = {c}, t = {t}")
            }
            Error::LostBranch { axis, c, t } => {
                write!(f, "curve continuation lost its branch on axis {axis} at c = {c}, t = {t}")
            }
            Error::BranchMismatch { plus, minus } => {
                write!(f, "branch limits disagree: {plus} (upper) vs {minus} (lower)")
            }
            Error::InsufficientSamples { needed, got } => {
                write!(f, "need at least {needed} curve samples, got {got}")
            }
            Error::NonRadialModel => write!(f, "operation requires a radial kernel"),
            Error::SonicSpeedUndefined => write!(f, "sonic speed is not defined for this kernel"),
            Error::SubsonicSpeed { c, c_s } => {
                write!(f, "speed {c} does not exceed the sonic speed {c_s}")
            }
            Error::DivergentQuadrature => write!(f, "quadrature did not converge"),
        }
    }
}

impl core::error::Error for Error {}
