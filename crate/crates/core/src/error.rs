use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error(
        "cavity detuning delta = {0} is not supported; the effective model requires resonance"
    )]
    Detuned(f64),

    #[error("moment order K = {0} must be an even integer >= 2")]
    InvalidOrder(u32),

    #[error("singular steady-state system: {0}")]
    SingularSystem(String),

    #[error("mean photon number {0:e} is too small to normalize correlation functions")]
    DegenerateIntensity(f64),

    #[error("closed form diverges: {0}")]
    DivergentLimit(&'static str),

    #[error("steady state is not unique: {0}")]
    DegenerateNullSpace(String),

    #[error("integration did not converge: {0}")]
    NonConvergence(String),

    #[error("inconsistent parameters: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Non-fatal conditions attached to results.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// Pivot-ratio condition estimate above the reporting threshold.
    IllConditioned { estimate: f64 },
    /// Parameters outside the regime where the effective Hamiltonian is valid.
    Regime(String),
    /// Population in the top Fock levels is not negligible.
    TruncationSuspect { tail_population: f64 },
    /// The explicit integrator needs more than the advisory number of steps.
    Stiffness { steps: u64 },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::IllConditioned { estimate } => write!(f, "ill_conditioned({estimate:.3e})"),
            Warning::Regime(msg) => write!(f, "regime({msg})"),
            Warning::TruncationSuspect { tail_population } => {
                write!(f, "truncation_suspect({tail_population:.3e})")
            }
            Warning::Stiffness { steps } => write!(f, "stiff({steps} steps)"),
        }
    }
}
