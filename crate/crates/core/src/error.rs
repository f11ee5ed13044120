use thiserror::Error;

/// Errors raised by the solver layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A rational function was evaluated on (or numerically at) a zero of its denominator.
    #[error("pole: denominator vanishes at x = {x}")]
    Pole { x: f64 },

    /// A rational function was built with an identically zero denominator.
    #[error("zero denominator")]
    ZeroDenominator,

    /// AIM coefficients became non-finite despite rescaling.
    #[error("non-finite coefficient at AIM iteration {iteration}")]
    Overflow { iteration: usize },

    /// Roots of the termination condition did not settle before `k_max`.
    #[error("eigenvalues did not stabilize by k = {k_max} (last gap {last_gap:e})")]
    NoConvergence { k_max: usize, last_gap: f64 },

    /// The energy bracket holds fewer sign changes than levels requested.
    #[error("bracket holds {found} root(s), {requested} requested")]
    BracketTooNarrow { found: usize, requested: usize },

    /// The termination condition vanishes identically (s0 == 0) at an
    /// energy that is not a confirmed eigenvalue.
    #[error("degenerate seed at E = {energy}: termination condition is identically zero")]
    DegenerateSeed { energy: f64 },

    /// Argument outside the model's physical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The sampling grid does not hold the wavefunction's support.
    #[error("quadrature error: {0}")]
    Quadrature(String),

    /// Grid shape unsuitable for the requested stencil.
    #[error("grid error: {0}")]
    Grid(String),

    /// A requested oracle level did not decay inside the box.
    #[error("level {level} not converged: eigenvector tail {tail:e} of peak at r_max = {r_max}")]
    UnconvergedLevel { level: usize, tail: f64, r_max: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
