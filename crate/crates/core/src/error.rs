use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong inside the engine.
///
/// Variants fall into three families: malformed or invalid input
/// ([`Error::is_input_error`]), violated preconditions of an operation, and
/// internal invariant breaches that indicate a bug or an unexpected
/// mathematical situation ([`Error::is_internal`]).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("malformed scalar {0:?}")]
    ScalarSyntax(String),

    #[error("operands live in different jet rings")]
    RingMismatch,

    #[error("operands belong to models of different dimension ({0} vs {1})")]
    DimensionMismatch(usize, usize),

    #[error("unknown variable {0:?}")]
    UnknownVariable(String),

    #[error("truncation order {requested} exceeds ring order {available}")]
    OrderTooLarge { requested: u32, available: u32 },

    #[error("evaluation point does not assign variable {0:?}")]
    MissingVariable(String),

    #[error("evaluation point is not conjugation-consistent at {0:?}")]
    InconsistentConjugation(String),

    #[error("jet is not a unit (zero constant term)")]
    NotAUnit,

    #[error("polynomial division is not exact")]
    InexactDivision,

    #[error("schema violation: {0}")]
    Schema(String),

    #[error("d^2 != 0 on generator {generator}: {detail}")]
    DSquaredNonzero { generator: String, detail: String },

    #[error("structure equation for d(omega^{0}) has a nonzero (0,2)-component")]
    NotIntegrable(usize),

    #[error("recovered brackets violate the Jacobi identity at {0}")]
    JacobiFailure(String),

    #[error("form is not homogeneous of a single bidegree")]
    NotHomogeneous,

    #[error("expected a vector form of degree {expected}, found degree {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("Beltrami differential has a nonzero constant term")]
    NonzeroConstantTerm,

    #[error("first-order term is not delbar-closed")]
    NotClosed,

    #[error("Maurer-Cartan equation fails below order {0}")]
    MaurerCartanViolated(u32),

    #[error("deformed structure is not integrable: {0}")]
    NonIntegrableFrame(String),

    #[error("coframe matrix is singular at the sample point")]
    SingularFrame,

    #[error("class selector {0} out of range")]
    SelectorOutOfRange(usize),

    #[error("order/kind mismatch: {0}")]
    KindMismatch(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// True for errors caused by invalid user-supplied documents.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::ScalarSyntax(_)
                | Error::UnknownVariable(_)
                | Error::Schema(_)
                | Error::DSquaredNonzero { .. }
                | Error::NotIntegrable(_)
                | Error::JacobiFailure(_)
                | Error::SelectorOutOfRange(_)
                | Error::MissingVariable(_)
                | Error::InconsistentConjugation(_)
                | Error::OrderTooLarge { .. }
                | Error::NotClosed
                | Error::NonzeroConstantTerm
                | Error::MaurerCartanViolated(_)
                | Error::NonIntegrableFrame(_)
                | Error::DegreeMismatch { .. }
                | Error::KindMismatch(_)
                | Error::NotHomogeneous
                | Error::RingMismatch
                | Error::DimensionMismatch(..)
                | Error::SingularFrame
        )
    }

    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}
