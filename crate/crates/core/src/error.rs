use thiserror::Error;

/// Errors produced anywhere in the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix is singular to working precision (pivot {pivot:.3e} at column {column})")]
    Singular { column: usize, pivot: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("integrator step underflow at t = {t} (step {step:.3e})")]
    StepUnderflow { t: f64, step: f64 },

    #[error("integrator exceeded {0} steps")]
    TooManySteps(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("qubit-cavity detuning is zero; the dispersive expansion is undefined")]
    ZeroDetuning,

    #[error("qubit energies differ (eps1 = {eps1}, eps2 = {eps2}); this result needs eps1 = eps2")]
    UnequalEpsilons { eps1: f64, eps2: f64 },

    #[error("coupling g2 is zero; the analytic eigenvectors divide by g2")]
    DegenerateRatio,

    #[error("couplings differ (g1 = {g1}, g2 = {g2}); uniform coupling required")]
    NonUniformCoupling { g1: f64, g2: f64 },

    #[error("state is not normalised (norm {0})")]
    NotNormalized(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("density matrix lost positivity (min eigenvalue {min_eigenvalue:.3e} at t = {t})")]
    PositivityViolation { t: f64, min_eigenvalue: f64 },

    #[error("state leaks out of the single-excitation subspace (leaked norm {0:.3e})")]
    SubspaceLeak(f64),

    #[error("steady state is not unique")]
    NonUniqueSteadyState,

    #[error("no dissipation (kappa = gamma = 0): the steady state is undefined")]
    NoDissipation,

    #[error("steady state residual {0:.3e} exceeds tolerance")]
    SteadyStateResidual(f64),

    #[error("Fock truncation not converged up to n_max = {n_max} (last change {delta:.3e})")]
    NotConverged { n_max: usize, delta: f64 },

    #[error("time series is empty")]
    EmptySeries,

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("invalid override: {0}")]
    InvalidOverride(String),

    #[error("dataset schema violation: {0}")]
    Schema(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Errors caused by bad user input rather than numerical failure.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::UnknownScenario(_)
                | Error::InvalidOverride(_)
                | Error::InvalidParams(_)
                | Error::InvalidArgument(_)
                | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
