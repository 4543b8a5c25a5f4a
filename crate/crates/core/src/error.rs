use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("fock dimension must be at least 2, got {0}")]
    InvalidFockDim(usize),

    #[error("dot index must be 1 or 2, got {0}")]
    InvalidDotIndex(usize),

    #[error("operators live on different layouts (fock_dim {left} vs {right})")]
    LayoutMismatch { left: usize, right: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("channel `{channel}` has negative rate {rate}")]
    NegativeRate { channel: String, rate: f64 },

    #[error("not a valid density matrix: {0}")]
    NotADensityMatrix(String),

    #[error(
        "steady state is not unique or the system is singular (pivot ratio {pivot_ratio:.3e})"
    )]
    SingularSteadyState { pivot_ratio: f64 },

    #[error("steady state did not converge (residual {residual:.3e})")]
    SteadyStateResidual { residual: f64 },

    #[error("time integration failed at t = {t} ns (step {h:.3e} ns after {steps} steps)")]
    StepFailure { t: f64, h: f64, steps: usize },

    #[error("time grid must be non-empty, increasing and start at t >= 0")]
    InvalidTimeGrid,

    #[error("reflected intensity is zero; g2 is undefined")]
    ZeroIntensity,

    #[error("input amplitude is zero; reflectivity is undefined")]
    ZeroInput,

    #[error("effective matrix is defective near eigenvalue {eigenvalue}")]
    Defective { eigenvalue: num_complex::Complex64 },

    #[error("coefficients are only defined for excitonic modes, got the cavity-like mode")]
    CavityMode,

    #[error("analytic coefficients need a nonzero coherent coupling")]
    ZeroCoupling,

    #[error("emission spectrum needs incoherent excitation only: {0}")]
    SpectrumExcitation(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("truncation did not converge for {observable} up to fock_dim {fock_dim}")]
    NotConverged { observable: String, fock_dim: usize },
}
