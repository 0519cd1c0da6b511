use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("azimuthal frame undefined at the pole (polar angle {0})")]
    DegeneratePole(f64),
    #[error("finite-difference stencil reaches the origin (|x| = {radius}, step = {step})")]
    StencilHitsOrigin { radius: f64, step: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("invalid stencil configuration: {0}")]
    InvalidStencil(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("director is not a unit vector (|d0| = {0})")]
    NonUnitDirector(f64),
    #[error("no nontrivial periodic profile: 4 + Phi/pi = {lhs} exceeds k^2 = {k_sq}")]
    NoExistence { lhs: f64, k_sq: f64 },
    #[error("energy level is outside the closed-orbit band: {0}")]
    NonPeriodicOrbit(String),
    #[error("integration step too coarse: relative energy drift {0:e}")]
    StepTooCoarse(f64),
    #[error("Newton iteration diverged: {0}")]
    NewtonDivergence(String),
    #[error("degenerate profile at the existence boundary")]
    DegenerateAtBoundary,
    #[error("periodic profile solver failed: {0}")]
    SolverFailure(String),
    #[error("profile does not match any self-similar family: {0}")]
    Unclassifiable(String),
    #[error("recovered pressure gradient is not curl-free (certificate {0:e})")]
    IncompatibleField(f64),
    #[error("field is not self-similar (scaling deviation {0:e})")]
    NotSelfSimilar(f64),
    #[error("field is not a solution (residual sup {0:e})")]
    NotASolution(f64),
    #[error("Dirichlet energy diverges at the origin: {0}")]
    DivergentEnergy(String),
    #[error("malformed solution spec: {0}")]
    MalformedSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
