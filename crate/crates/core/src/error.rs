use thiserror::Error;

use crate::linform::VarId;
use crate::rat::Rat;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("right-hand side b[{row}] = {value} is not strictly positive")]
    NonpositiveB { row: usize, value: Rat },

    #[error("no constraint rows left after dropping vacuous all-zero rows")]
    EmptyAfterCleanup,

    #[error("polytope is unbounded (compactness LP infeasible)")]
    NotCompact,

    #[error("x = 0 is not the only solution of {{x >= 0, Ax <= 0}}; no admissible Bromwich abscissae exist")]
    NotPointed,

    #[error("degenerate instance: {detail}")]
    Degenerate { detail: String },

    #[error("contour closure diverges for {var}: denominator degree {degree} < 2 with no exponential decay")]
    DivergentSlice { var: VarId, degree: u32 },

    #[error("associated transform is not of the form C/p^(n+1): {0}")]
    MalformedH(String),

    #[error("genericity violated: {0}")]
    GenericityViolated(String),

    #[error("invalid abscissae: {0}")]
    InvalidAbscissae(String),

    #[error("no abscissa for {0}")]
    MissingAbscissa(VarId),

    #[error("{form} does not depend on {var}")]
    NotAPoleInVar { var: VarId, form: String },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Stable process exit code: 2 invalid input, 3 nonpositive b,
    /// 4 unbounded, 5 not pointed, 6 degenerate data, 7 internal.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::InvalidInstance(_) => 2,
            Error::NonpositiveB { .. } => 3,
            Error::NotCompact | Error::EmptyAfterCleanup => 4,
            Error::NotPointed => 5,
            Error::Degenerate { .. } | Error::GenericityViolated(_) => 6,
            _ => 7,
        }
    }
}
