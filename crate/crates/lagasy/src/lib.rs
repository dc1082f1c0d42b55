//! Evaluation of Laguerre-type orthogonal polynomials `p_n` for the weight
//! `w(x) = x^alpha e^{-Q(x)}` on `[0, inf)` at arbitrary degree, using
//! higher-order Riemann-Hilbert asymptotic expansions. The cost of a single
//! evaluation is independent of the degree `n`.
//!
//! The crate also computes derived quantities (leading coefficients,
//! three-term recurrence coefficients, Gauss quadrature rules) and carries a
//! recurrence-based oracle for verification.
//!
//! Modules follow the computation pipeline:
//!
//! * [`weight`] - weight specification and the rescaled field `V_n`
//! * [`specfun`] - Airy, Bessel, log-gamma, Lambert W
//! * [`mrs`] - MRS numbers `beta_n`, field polynomials `H_n`, constants `l_n`
//! * [`auxfun`] - phase functions, conformal map, global parametrix
//! * [`rseries`] - jump-perturbation series and the `R(z)` tableaux
//! * [`evaluate`] - four-region evaluation and coefficient expansions
//! * [`oracle`] - independent reference values (recurrence, Stieltjes)
//! * [`quadrature`] - Gauss rules with degree-independent per-node cost
//! * [`verify`] - acceptance suites used by the CLI and the test harness

pub mod auxfun;
pub mod cli;
pub mod dd;
pub mod evaluate;
pub mod mrs;
pub mod oracle;
pub mod quadrature;
pub mod rseries;
pub mod series;
pub mod specfun;
pub mod verify;
pub mod weight;

pub use weight::{QKind, WeightSpec};

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed weight spec: {0}")]
    MalformedSpec(String),
    #[error("alpha out of range (need alpha > -1): {0}")]
    AlphaOutOfRange(f64),
    #[error("leading coefficient must be positive: {0}")]
    NonPositiveLeading(f64),
    #[error("general Q evaluator failed at {0}")]
    EvaluatorFailure(String),
    #[error("argument outside documented working range: {0}")]
    RangeExceeded(String),
    #[error("Bessel order out of range: {0}")]
    OrderOutOfRange(f64),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("operation not defined for this Q kind")]
    WrongKind,
    #[error("wrong series regime for this weight")]
    WrongRegime,
    #[error("no bracket found for the MRS equation")]
    NoBracket,
    #[error("quadrature failed to converge: {0}")]
    QuadratureStall(String),
    #[error("contour encloses a singularity of Q")]
    ContourPole,
    #[error("requested Laurent range too small: {0}")]
    TruncationTooSmall(String),
    #[error("no tabulated closed form for (k, p) = ({0}, {1})")]
    NotTabulated(usize, usize),
    #[error("point is not in the requested region")]
    RegionMismatch,
    #[error("negative radicand in coefficient expansion at T = {0}")]
    NegativeRadicand(usize),
    #[error("Newton iteration diverged for node {index} (seed {seed})")]
    NewtonDivergence { index: usize, seed: f64 },
    #[error("two quadrature nodes collided near x = {0}; increase terms T")]
    NodeCollision(f64),
    #[error("requested precision unreachable: {0}")]
    PrecisionUnreachable(String),
    #[error("weight tail truncation failed")]
    TailTruncationFailure,
    #[error("degree {0} exceeds recurrence table length {1}")]
    DegreeExceedsTable(usize, usize),
    #[error("point lies on the cut [0, 1]")]
    OnCut,
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
