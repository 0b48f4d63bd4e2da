use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeilError {
    #[error("modulus must be an odd prime (got {0})")]
    InvalidModulus(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("form is not antisymmetric with zero diagonal")]
    NotAntisymmetric,
    #[error("form is degenerate")]
    DegenerateForm,
    #[error("subspace is not isotropic")]
    NotIsotropic,
    #[error("subspace is not Lagrangian")]
    NotLagrangian,
    #[error("orientation scale must be nonzero")]
    ZeroOrientation,
    #[error("matrix is not symplectic")]
    NotSymplectic,
    #[error("enumeration of {count} items exceeds the cap of {cap}")]
    CapExceeded { count: u128, cap: u128 },
    #[error("Lagrangians are not in general position")]
    NotGeneralPosition,
    #[error("kernel labels do not compose: {0}")]
    LabelMismatch(String),
    #[error("no Lagrangian is transversal to both inputs")]
    NoTransversal,
    #[error("spaces are not symplectic duals of each other")]
    NotDual,
    #[error("vector does not lie in the subspace")]
    NotInSubspace,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = WeilError> = std::result::Result<T, E>;
