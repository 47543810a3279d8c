//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Which strict inequality of the two-species regime classifier failed to be strict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegenerateBoundary {
    /// `K1` equals `alpha[1][2] * K2`.
    CapacityOneEqualsCrossLoad,
    /// `K2` equals `alpha[2][1] * K1`.
    CapacityTwoEqualsCrossLoad,
}

impl std::fmt::Display for DegenerateBoundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DegenerateBoundary::CapacityOneEqualsCrossLoad => {
                write!(f, "K1 = alpha[1][2] * K2 (strict inequality required)")
            }
            DegenerateBoundary::CapacityTwoEqualsCrossLoad => {
                write!(f, "K2 = alpha[2][1] * K1 (strict inequality required)")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("model must have at least one species")]
    EmptyModel,

    #[error("{context}: expected length {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("species name at index {index} is empty")]
    EmptySpeciesName { index: usize },

    #[error("duplicate species name {name:?}")]
    DuplicateSpeciesName { name: String },

    #[error("alpha[{index}][{index}] must be exactly 1 (found {value})")]
    NonUnitAlphaDiagonal { index: usize, value: f64 },

    #[error("alpha[{row}][{col}] must be finite and >= 0 (found {value})")]
    InvalidAlpha { row: usize, col: usize, value: f64 },

    #[error("growth rate r[{index}] must be finite and > 0 (found {value})")]
    InvalidGrowthRate { index: usize, value: f64 },

    #[error("capacity K[{index}] must be finite and > 0 (found {value})")]
    InvalidCapacity { index: usize, value: f64 },

    #[error("population N[{index}] must be finite and >= 0 (found {value})")]
    InvalidPopulation { index: usize, value: f64 },

    #[error("time must be finite (found {value})")]
    NonFiniteTime { value: f64 },

    #[error("species index {index} out of range for {n} species")]
    SpeciesIndexOutOfRange { index: usize, n: usize },

    #[error("income fraction must lie in [0, 1] (found {value})")]
    FractionOutOfRange { value: f64 },

    #[error("population count must be finite and > 0 (found {value})")]
    NonpositivePopulationCount { value: f64 },

    #[error("smaller population {small} exceeds larger population {large}; coefficient would exceed 1")]
    PopulationRatioAboveOne { small: f64, large: f64 },

    #[error("equilibrium component N*[{index}] must be > 0 (found {value})")]
    NonpositiveEquilibriumComponent { index: usize, value: f64 },

    #[error("step size must be finite and > 0 (found {value})")]
    NonpositiveStep { value: f64 },

    #[error("iteration count must be >= 1")]
    ZeroSteps,

    #[error("record_every must satisfy 1 <= record_every <= steps (found {record_every} with {steps} steps)")]
    RecordEveryOutOfRange { record_every: usize, steps: usize },

    #[error("integration diverged to non-finite populations at step {step}")]
    IntegrationDiverged { step: usize },

    #[error("settle window must cover at least 2 samples (found {window})")]
    SettleWindowTooSmall { window: usize },

    #[error("settle window of {window} exceeds the {samples} recorded samples")]
    SettleWindowExceedsSamples { window: usize, samples: usize },

    #[error("equilibrium enumeration supports at most {max} species (model has {n})")]
    TooManySpecies { n: usize, max: usize },

    #[error("regime classification requires exactly 2 species (model has {n})")]
    NotTwoSpecies { n: usize },

    #[error("degenerate two-species model: {boundary}")]
    DegenerateRegime { boundary: DegenerateBoundary },

    #[error("singular linear system: {context}")]
    SingularSystem { context: &'static str },

    #[error("no feasible interior equilibrium: {context}")]
    InfeasibleEquilibrium { context: &'static str },

    #[error("invalid parameter path: {reason}")]
    InvalidParamPath { reason: String },

    #[error("invader (species {invader}) is already in the resident support")]
    InvaderInSupport { invader: usize },

    #[error("target change is unreachable: {reason}")]
    TargetUnreachable { reason: String },

    #[error("scenario file is malformed: {message}")]
    ScenarioSyntax { message: String },

    #[error("species name {name:?} cannot be written to CSV (contains a comma, quote, or line break)")]
    CsvUnsafeName { name: String },
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::ScenarioSyntax {
            message: err.to_string(),
        }
    }
}
