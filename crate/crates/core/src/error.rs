use thiserror::Error;

/// Errors raised by the exact constructions.
///
/// Verification failures that indicate a bug (an exact re-check of a
/// construction failing) are not represented here; those panic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix rank {rank} is below its column count {cols}")]
    RankDeficient { rank: usize, cols: usize },

    #[error("singular matrix")]
    Singular,

    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("invalid scheme: {0}")]
    InvalidScheme(String),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("unknown built-in scheme `{0}`")]
    UnknownBuiltin(String),

    #[error("region is unbounded")]
    UnboundedRegion,

    #[error("translate is not a lattice vector of the scheme")]
    NotInLattice,

    #[error("budget of {budget} exceeded ({needed} required)")]
    BudgetExceeded { budget: u64, needed: u64 },

    #[error("at least {needed} points required, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no monochromatic grid of depth {depth} in the cube [0,{size}]^{dim}")]
    NoMonoGrid { depth: u64, size: u64, dim: usize },

    #[error("rank gap: translate `{tag}` is independent of the lattice, so aprank < rank")]
    RankGap { tag: String },

    #[error("{0}")]
    Input(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
