use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sample count {0} is not a power of two >= 2")]
    GridSize(usize),
    #[error("time step must be positive and finite, got {0}")]
    TimeStep(f64),
    #[error("expected {expected} samples, got {actual}")]
    Length { expected: usize, actual: usize },
    #[error("field contains a non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("invalid pulse: {0}")]
    Pulse(&'static str),
    #[error("invalid medium: {0}")]
    Medium(&'static str),
    #[error("resonance offset {offset} Hz lies outside the grid span (Nyquist {nyquist} Hz)")]
    DetuningOutsideGrid { offset: f64, nyquist: f64 },
    #[error("field has zero energy")]
    ZeroEnergy,
    #[error("mode is not normalized (energy {0})")]
    NotNormalized(f64),
    #[error("delay {delay} s outside the allowed range +/-{limit} s")]
    DelayOutOfRange { delay: f64, limit: f64 },
    #[error("invalid scan curve: {0}")]
    Curve(&'static str),
    #[error("empty curve")]
    EmptyCurve,
    #[error("efficiency {0} outside [0, 1]")]
    Efficiency(f64),
    #[error("invalid shaper configuration: {0}")]
    Shaper(&'static str),
    #[error("kernel FWHM {fwhm} Hz is below two frequency steps ({min} Hz)")]
    UnresolvedKernel { fwhm: f64, min: f64 },
    #[error("need at least {min} samples, got {actual}")]
    TooFewSamples { min: usize, actual: usize },
    #[error("sample has zero spread")]
    DegenerateSample,
    #[error("invalid phase-space grid: {0}")]
    PhaseSpaceGrid(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;
