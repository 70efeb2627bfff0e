//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong while building a model or running an analysis.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An off-diagonal rate was negative, zero, or non-finite.
    #[error("rate for index {index} must be positive and finite, got {rate}")]
    NegativeRate { index: String, rate: f64 },

    /// Off-diagonal rates sum to more than the total exit rate.
    #[error("rates sum to {sum} which exceeds the exit rate {exit} ({kind})")]
    DiagonalMismatch { kind: String, sum: f64, exit: f64 },

    /// Every split produces exactly one particle; the process degenerates
    /// to a finite Markov chain on the type space.
    #[error("branching generating functions are singular (every offspring vector has size 1)")]
    Singular,

    /// The type graph is not primitive: no power of the mean-offspring
    /// sign matrix is strictly positive.
    #[error("mean-offspring matrix is not positively regular")]
    NotPositivelyRegular,

    /// An index or distribution does not match the declared dimension.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A generating-function argument left the admissible box.
    #[error("argument outside [-1,1]^n: {0:?}")]
    OutOfDomain(Vec<f64>),

    /// An iteration failed to reach its tolerance.
    #[error("no convergence after {iterations} iterations (last step {last_step:e})")]
    NoConvergence { iterations: u64, last_step: f64 },

    /// No type with a positive chance of dying childless, or an explicit
    /// pivot whose constant term vanishes.
    #[error("no admissible pivot: B_{0}(0,...,0) = 0")]
    PivotNotAllowed(usize),

    /// The curve integrator underflowed its step size well before the root.
    #[error("ODE step underflow at u = {at} (target {target})")]
    StiffnessFailure { at: f64, target: f64 },

    /// The requested quantity is governed by a different regime.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// The decisive improper integral could not be classified.
    #[error("divergence of the extinction integral is indeterminate: {0}")]
    IndeterminateJ(String),

    /// Adaptive quadrature failed to reach its tolerance.
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    /// Mean extinction time requested for a process that survives forever
    /// with positive probability.
    #[error("extinction is not almost sure from this state")]
    NotAlmostSurelyExtinct,

    /// Equilibrium quantities requested for a non-ergodic process.
    #[error("process is not ergodic")]
    NotErgodic,

    /// Truncated linear solve left residuals above tolerance.
    #[error("truncation residual {residual:e} exceeds {tolerance:e} at degree {degree}")]
    TruncationResidualTooLarge {
        residual: f64,
        tolerance: f64,
        degree: u32,
    },

    /// A measure coefficient came out non-positive; truncation too small.
    #[error("non-positive measure coefficient {value} at {index}")]
    NonPositiveCoefficient { index: String, value: f64 },

    /// The operation demands a different resurrection encoding.
    #[error("wrong resurrection encoding: {0}")]
    WrongEncoding(String),

    /// Immigration does not reach every type, so Z_+^n fails to communicate.
    #[error("state space is not a communicating class")]
    NotCommunicating,

    /// The simulator only accepts conservative rate families.
    #[error("simulator requires conservative rates: {0}")]
    NonConservativeModel(String),

    /// A Monte Carlo ratio has a zero denominator estimate.
    #[error("degenerate estimate: {0}")]
    DegenerateEstimate(String),

    /// The truncation cannot even hold the fixture's support.
    #[error("truncation cap {cap} too small (need at least {need})")]
    CapTooSmall { cap: u32, need: u32 },

    /// The stationary linear system was numerically singular.
    #[error("stationary system singular; raise the truncation cap")]
    SingularSystem,

    /// Transition probabilities underflowed inside the requested window.
    #[error("p_ii(t) below resolvable floor inside window [{0}, {1}]")]
    Underflow(f64, f64),

    /// The all-zero state was passed where a nonzero one is required.
    #[error("operation undefined for the zero state")]
    ZeroState,

    /// Malformed model file.
    #[error("model file: {0}")]
    ModelFile(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
