//! Error type shared by every module of the toolkit.
//!
//! Each variant corresponds to one named failure condition of a documented
//! operation. [`Error::name`] returns the bare variant name, which the command
//! line driver prints on stderr so scripts can match on it.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// All domain errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter value violates a standing assumption (e.g. `c_u = 0`).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// The front speed at onset equals the phase velocity `c_u` (excluded regime).
    #[error("front speed at epsilon = 0 equals the phase velocity c_u = {cu}: infinitely many central eigenvalues")]
    SpeedAtPhaseVelocity {
        /// Phase velocity at onset.
        cu: f64,
    },
    /// The speed lies inside the tolerance band of more than one scenario relation.
    #[error("ambiguous scenario: {0}")]
    AmbiguousScenario(String),
    /// Scenarios II-V require a nonzero speed offset `c0`.
    #[error("scenario {0} requires a nonzero speed offset c0")]
    MissingSpeedOffset(String),
    /// `B + alpha0 <= 0`: no bifurcating traveling wave exists.
    #[error("no traveling wave: B + alpha0 = {0} must be positive")]
    NoWave(f64),
    /// Newton refinement of the traveling wave failed.
    #[error("Newton iteration diverged after {iterations} iterations (residual {residual:e})")]
    NewtonDiverged {
        /// Iterations performed.
        iterations: usize,
        /// Last residual norm.
        residual: f64,
    },
    /// The eigenvalue solver did not converge.
    #[error("eigenvalue solver did not converge: {0}")]
    NoConvergence(String),
    /// An eigenvalue falls between the central tolerance and the declared hyperbolic gap,
    /// or the central count disagrees with the scenario prediction.
    #[error("spectral gap violation: {0}")]
    GapViolation(String),
    /// The adjoint pairing of an eigenvalue vanishes (defective eigenvalue).
    #[error("degenerate adjoint pairing |<psi, phi>| = {0:e}")]
    DegeneratePairing(f64),
    /// A denominator of the reduced equations vanishes for the chosen parameters.
    #[error("degenerate scenario: {0}")]
    DegenerateScenario(String),
    /// The scenario requires `gamma2 = 0`.
    #[error("scenario requires gamma2 = 0, got {0}")]
    Gamma2NotZero(f64),
    /// The conserved mode is dynamic (not slaved) in this scenario.
    #[error("conserved mode is dynamic in scenario {0}, not slaved")]
    NotSlaved(String),
    /// The adaptive integrator step size underflowed.
    #[error("integrator step size underflow at t = {0}")]
    StepUnderflow(f64),
    /// The supplied state is not an equilibrium of the vector field.
    #[error("not a fixed point: |f(x)| = {0:e}")]
    NotAFixedPoint(f64),
    /// The fixed point has no usable unstable direction for shooting.
    #[error("no unstable direction: {0}")]
    NoUnstableDirection(String),
    /// The trajectory did not allow a classification of its limit set.
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    /// A bracketed root search found no sign change.
    #[error("no sign change on bracket [{0}, {1}]")]
    NoSignChange(f64, f64),
    /// Periodic-orbit Newton failed to converge.
    #[error("periodic orbit Newton diverged at c0 = {c0} (residual {residual:e})")]
    OrbitNewtonDiverged {
        /// Parameter value.
        c0: f64,
        /// Last residual norm.
        residual: f64,
    },
    /// The monodromy matrix is too ill-conditioned for reliable multipliers.
    #[error("monodromy matrix ill-conditioned (condition number {0:e})")]
    MonodromyIllConditioned(f64),
    /// The critical Floquet multiplier at a detected crossing is real.
    #[error("critical multiplier {0} is real: fold or flip, not a torus bifurcation")]
    FoldOrFlip(f64),
    /// Input grids are inconsistent.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    /// A requested sample lies outside the covered region.
    #[error("out of coverage: {0}")]
    OutOfCoverage(String),
    /// The PDE state contains non-finite values.
    #[error("NaN detected in PDE state at t = {0}")]
    NaNDetected(f64),
    /// No front could be located in the PDE history.
    #[error("no front detected: {0}")]
    NoFrontDetected(String),
    /// No pattern plateau could be located in the PDE history.
    #[error("no pattern detected: {0}")]
    NoPattern(String),
}

impl Error {
    /// Bare variant name, stable across releases; used as a machine-readable tag.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::SpeedAtPhaseVelocity { .. } => "SpeedAtPhaseVelocity",
            Error::AmbiguousScenario(_) => "AmbiguousScenario",
            Error::MissingSpeedOffset(_) => "MissingSpeedOffset",
            Error::NoWave(_) => "NoWave",
            Error::NewtonDiverged { .. } => "NewtonDiverged",
            Error::NoConvergence(_) => "NoConvergence",
            Error::GapViolation(_) => "GapViolation",
            Error::DegeneratePairing(_) => "DegeneratePairing",
            Error::DegenerateScenario(_) => "DegenerateScenario",
            Error::Gamma2NotZero(_) => "Gamma2NotZero",
            Error::NotSlaved(_) => "NotSlaved",
            Error::StepUnderflow(_) => "StepUnderflow",
            Error::NotAFixedPoint(_) => "NotAFixedPoint",
            Error::NoUnstableDirection(_) => "NoUnstableDirection",
            Error::Inconclusive(_) => "Inconclusive",
            Error::NoSignChange(..) => "NoSignChange",
            Error::OrbitNewtonDiverged { .. } => "OrbitNewtonDiverged",
            Error::MonodromyIllConditioned(_) => "MonodromyIllConditioned",
            Error::FoldOrFlip(_) => "FoldOrFlip",
            Error::GridMismatch(_) => "GridMismatch",
            Error::OutOfCoverage(_) => "OutOfCoverage",
            Error::NaNDetected(_) => "NaNDetected",
            Error::NoFrontDetected(_) => "NoFrontDetected",
            Error::NoPattern(_) => "NoPattern",
        }
    }
}
