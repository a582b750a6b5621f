use thiserror::Error;

/// Errors raised by the library. Each variant names the violated contract.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("gram matrix is not square (or empty)")]
    NotSquare,
    #[error("gram matrix is not symmetric: entry ({row}, {col}) differs from its transpose")]
    NotSymmetric { row: usize, col: usize },
    #[error("lattice is not even: diagonal entry {index} is {value}")]
    NotEven { index: usize, value: i64 },
    #[error("gram matrix is not positive definite: leading minor of order {order} is {minor}")]
    NotPositiveDefinite { order: usize, minor: String },
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("congruence violated: D = {d_disc} is not congruent to the norm of s modulo {modulus}")]
    CongruenceViolated { d_disc: i64, modulus: i64 },
    #[error("matrix is singular")]
    Singular,
    #[error("modulus must be nonzero")]
    ZeroModulus,
    #[error("rank {0} is odd; the character is only defined for even rank")]
    OddRank(usize),
    #[error("lattice is outside the families with a proven closed form")]
    UnsupportedFamily,
    #[error("prime {p} is not admissible here: {reason}")]
    BadPrime { p: u64, reason: &'static str },
    #[error("denominator vanishes at X = 0")]
    DenominatorVanishesAtZero,
    #[error("no local factor supplied for good prime {0}")]
    MissingPrime(u64),
    #[error("rank {rank} does not match any assembled formula family")]
    OddEvenMismatch { rank: usize },
    #[error("half-integral shift {shift} applied to a nontrivial factor at p = {p}")]
    HalfShiftUnpaired { p: u64, shift: String },
    #[error("{0} is not a fundamental negative discriminant")]
    NotDiscriminant(i64),
    #[error("{0} is not a squarefree positive integer")]
    NotSquarefree(i64),
    #[error("(D, r) = ({d_disc}, {r:?}) is outside the support")]
    KeyOutsideSupport { d_disc: i64, r: Vec<i64> },
    #[error("coefficient provider is undefined at {0}")]
    ProviderUndefined(String),
    #[error("reduced formula requires D = -q with xi = (1,0,...,0,1); got D = {0}")]
    UnsupportedXi(i64),
    #[error("table has index {got}, expected {expected}")]
    IndexMismatch { expected: u64, got: u64 },
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
