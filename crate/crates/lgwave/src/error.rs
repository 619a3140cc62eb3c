use thiserror::Error;

/// Unified error type for model construction, wave computation, simulation,
/// and the CLI layer.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter lies outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    /// Predator decay eigenvalues are complex: the requested speed is below
    /// the critical speed, so no nonnegative wave can exist.
    #[error("complex predator eigenvalues: c = {c} < c* = {c_star}")]
    ComplexEigenvalues { c: f64, c_star: f64 },

    /// An operation-specific structural precondition failed.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A parameter selection interval is empty.
    #[error("empty admissible interval: lower {lo} >= upper {hi}")]
    EmptyInterval { lo: f64, hi: f64 },

    /// The shooting orbit left the trapping box before converging.
    #[error("orbit escaped at z = {z}: state = ({0}, {1}, {2}, {3})", state[0], state[1], state[2], state[3])]
    Escape { z: f64, state: [f64; 4] },

    /// Monotone iteration did not close the upper/lower gap.
    #[error("monotone iteration did not converge: gap {gap} after {sweeps} sweeps")]
    NoConvergence { gap: f64, sweeps: usize },

    /// Upper/lower input functions are not correctly ordered.
    #[error("upper/lower ordering violated at z = {z}")]
    OrderingViolation { z: f64 },

    /// A derivative bound could not be established.
    #[error("derivative bound failed: {0}")]
    BoundsFail(String),

    /// A measurement window does not satisfy its validity condition.
    #[error("invalid window: {0}")]
    Window(String),

    /// A tracked field never crosses the requested level.
    #[error("no crossing of level {level}")]
    NoCrossing { level: f64 },

    /// A co-moving profile has not stabilized between snapshots.
    #[error("front not converged: {0}")]
    NotConverged(String),

    /// Simulated fields left the invariant region.
    #[error("simulation unstable at t = {t}: worst excursion {worst}")]
    Stability { t: f64, worst: f64 },

    /// Config text could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Config contents are structurally invalid.
    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI layer: 1 for domain/usage problems,
    /// 2 for verification failures discovered while computing, 3 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_)
            | Error::ComplexEigenvalues { .. }
            | Error::Precondition(_)
            | Error::EmptyInterval { .. }
            | Error::Escape { .. }
            | Error::OrderingViolation { .. }
            | Error::Window(_)
            | Error::NoCrossing { .. }
            | Error::Parse { .. }
            | Error::Validation(_) => 1,
            Error::NoConvergence { .. }
            | Error::BoundsFail(_)
            | Error::NotConverged(_)
            | Error::Stability { .. } => 2,
            Error::Io(_) => 3,
        }
    }
}
