use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    DimensionMismatch { expected: usize, found: usize },
    UnsupportedDimension(usize),
    NotAVector,
    NotInvertible { condition: f64 },
    NotInT,
    NotInPin,
    NotMoebius(String),
    OutsideBall { norm: f64 },
    KernelSingular,
    NotConformable(String),
    Parse(String),
    NotSymmetric { index: usize, asymmetry: f64 },
    NonCommuting { residual: f64 },
    ResolventViolation,
    Divergence { estimate: f64 },
    Ambiguity(String),
    FlatMap { at: (f64, f64) },
    InvalidInput(String),
    Unresolved(String),
    NoConvergence(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::UnsupportedDimension(n) => write!(f, "unsupported dimension {n}"),
            Error::NotAVector => f.write_str("argument is not a vector"),
            Error::NotInvertible { condition } => {
                write!(f, "not invertible (condition estimate {condition:e})")
            }
            Error::NotInT => f.write_str("element is not a product of vectors"),
            Error::NotInPin => f.write_str("element is not in Pin(n)"),
            Error::NotMoebius(m) => write!(f, "not a Moebius matrix: {m}"),
            Error::OutsideBall { norm } => write!(f, "point outside the unit ball (|u| = {norm})"),
            Error::KernelSingular => f.write_str("singular kernel"),
            Error::NotConformable(m) => write!(f, "not a sphere matrix: {m}"),
            Error::Parse(m) => write!(f, "parse error: {m}"),
            Error::NotSymmetric { index, asymmetry } => {
                write!(f, "matrix A{} is not symmetric (max asymmetry {asymmetry:e})", index + 1)
            }
            Error::NonCommuting { residual } => {
                write!(f, "operators do not commute (residual {residual:e})")
            }
            Error::ResolventViolation => f.write_str("point is not in the resolvent set"),
            Error::Divergence { estimate } => {
                write!(f, "series diverges (radius estimate {estimate})")
            }
            Error::Ambiguity(m) => write!(f, "ambiguous spectrum: {m}"),
            Error::FlatMap { at } => write!(f, "map is locally constant at {} + {}i", at.0, at.1),
            Error::InvalidInput(m) => write!(f, "invalid input: {m}"),
            Error::Unresolved(m) => write!(f, "quadrature under-resolved: {m}"),
            Error::NoConvergence(m) => write!(f, "no convergence: {m}"),
        }
    }
}

impl core::error::Error for Error {}
