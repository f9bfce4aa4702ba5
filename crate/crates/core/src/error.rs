//! Error types shared across the engine.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuiverError {
    #[error("arrow `{label}` is a loop at vertex {vertex}")]
    Loop { label: String, vertex: usize },
    #[error("duplicate arrow label `{0}`")]
    DuplicateLabel(String),
    #[error("vertex index {0} out of range 1..={1}")]
    VertexOutOfRange(usize, usize),
    #[error("principal count {m} out of range 1..={n}")]
    PrincipalOutOfRange { m: usize, n: usize },
    #[error("dimension vector has length {got}, quiver has {want} vertices")]
    DimensionMismatch { got: usize, want: usize },
    #[error("attachment quiver {0} is not acyclic")]
    TreeNotAcyclic(usize),
    #[error("unknown arrow label `{0}`")]
    UnknownLabel(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PotentialError {
    #[error("arrow id {0} out of range")]
    ArrowOutOfRange(usize),
    #[error("word is not composable at position {0}")]
    NotComposable(usize),
    #[error("word does not close into a cycle (runs {from} -> {to})")]
    NotClosed { from: usize, to: usize },
    #[error("cycles of length 1 are rejected (loop-free quivers)")]
    LoopCycle,
    #[error("arrow `{0}` has no assigned weight")]
    MissingWeight(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MutationError {
    #[error("vertex {0} is frozen")]
    FrozenVertex(usize),
    #[error("vertex {0} out of range 1..={1}")]
    VertexOutOfRange(usize, usize),
    #[error("2-cycle through vertex {0} (arrows `{1}`, `{2}`)")]
    TwoCycleThroughVertex(usize, String, String),
    #[error("potential accurate only to order {have}, need {need}")]
    InsufficientOrder { have: u32, need: u32 },
    #[error("2-cycle remains after reduction between vertices {i} and {j}")]
    TwoCycleRemains { i: usize, j: usize },
    #[error("graded premutation produced an inhomogeneous potential: {0}")]
    GradingBroken(String),
    #[error(transparent)]
    Reduce(#[from] ReduceError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    /// A 2-cycle block whose pairing is degenerate while its arrows occur in
    /// higher-order terms that the elimination cannot reach at this order.
    /// Cannot occur for premutations of 2-cycle-free QPs.
    #[error("degenerate quadratic pairing between vertices {i} and {j}")]
    DegeneratePairing { i: usize, j: usize },
    #[error("potential accurate only to order {have}, need {need}")]
    InsufficientOrder { have: u32, need: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuantumError {
    #[error("lattice rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("not exactly divisible in the quantum torus")]
    NotDivisible,
    #[error("division by zero torus element")]
    DivisionByZero,
    #[error("exchange matrix and skew form are not compatible")]
    Incompatible,
    #[error("vertex {0} is frozen")]
    FrozenVertex(usize),
    #[error("vertex {0} out of range 1..={1}")]
    VertexOutOfRange(usize, usize),
    #[error("commutation-matrix consistency check failed at vertex {0} (corrupted state)")]
    ConsistencyFailure(usize),
    #[error("monomial has negative entry {value} in principal direction {index}")]
    NegativePrincipalExponent { index: usize, value: i64 },
}
