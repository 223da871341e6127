use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Operand shapes do not conform.
    Dimension {
        op: &'static str,
        expected: usize,
        found: usize,
    },
    DivisionByZero,
    /// A parameter is outside its allowed range.
    Param(&'static str),
    /// Polynomial degree exceeds the memory it was declared with.
    MemoryTooSmall {
        memory: usize,
        degree: usize,
    },
    /// Trellis memory above the supported cap.
    MemoryCap {
        memory: usize,
        cap: usize,
    },
    /// Free-distance search passed its weight budget without remerging.
    SearchBudget(usize),
    /// Masking matrix could not be made to give a full-rank sum.
    MaskRetries(usize),
    InvalidPermutation,
    /// A value that should hold by construction does not.
    Invariant(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension { op, expected, found } => {
                write!(f, "{op}: dimension mismatch (expected {expected}, found {found})")
            }
            Error::DivisionByZero => f.write_str("division by the zero polynomial"),
            Error::Param(what) => write!(f, "invalid parameter: {what}"),
            Error::MemoryTooSmall { memory, degree } => {
                write!(f, "memory {memory} is below polynomial degree {degree}")
            }
            Error::MemoryCap { memory, cap } => write!(f, "memory {memory} exceeds cap {cap}"),
            Error::SearchBudget(b) => write!(f, "free distance search exceeded weight budget {b}"),
            Error::MaskRetries(n) => write!(f, "no full-rank masked matrix after {n} attempts"),
            Error::InvalidPermutation => f.write_str("index map is not a bijection"),
            Error::Invariant(what) => write!(f, "invariant violated: {what}"),
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn check_dim(op: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { op, expected, found })
    }
}
