use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("representation mismatch: expected {expected} field, got {found}")]
    Representation {
        expected: &'static str,
        found: &'static str,
    },

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("multiplier `{label}` is not finite at xi = ({:.6}, {:.6}, {:.6})", xi[0], xi[1], xi[2])]
    NonFiniteSymbol { label: String, xi: [f64; 3] },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("kernel evaluated at the singularity (r = {r})")]
    Singularity { r: f64 },

    #[error("the L^{p} norm of the unit Yukawa kernel diverges (requires 1 <= p < 3)")]
    Divergent { p: f64 },

    #[error("tail mass {mass:.3e} beyond the box exceeds budget {budget:.1e}; try box length >= {suggested_box:.1}")]
    TailMass {
        mass: f64,
        budget: f64,
        suggested_box: f64,
    },

    #[error("non-finite values produced at t = {time}")]
    BlowUp { time: f64 },

    #[error("input norm {norm:.4} exceeds the smallness threshold {threshold:.4}")]
    Smallness { norm: f64, threshold: f64 },

    #[error("linear potential violates |Q0| < mu0 (|Q0|/mu0 = {margin:.4})")]
    NotSmall { margin: f64 },

    #[error("Picard iteration does not contract (iteration {iteration}, ratio {ratio:.3})")]
    NonContraction { iteration: usize, ratio: f64 },

    #[error("implicit solver did not converge (residual {residual:.3e})")]
    SolverNonConvergence { residual: f64 },

    #[error("limit sequence does not converge: {0}")]
    NonConvergentLimit(String),

    #[error("degenerate denominator {0:.3e}")]
    DegenerateDenominator(f64),

    #[error("target {target:.6e} exceeds psi(cap = {cap}) = {psi_cap:.6e}")]
    CapExceeded { target: f64, cap: u32, psi_cap: f64 },

    #[error("evaluator is not monotone: {0}")]
    NonMonotone(String),

    #[error("resource guard: {0}")]
    Guard(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Exit status used by the command line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidArgument(_) => 1,
            // guard violations and numerical refusals
            _ => 2,
        }
    }
}
