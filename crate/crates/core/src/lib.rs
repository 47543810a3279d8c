//! Competition between higher-education institutions for enrollment, modeled
//! as an n-species Lotka-Volterra system.
//!
//! The crate covers the full loop from data to policy numbers:
//!
//! - [`estimation`] turns niche data (income fractions, catchment
//!   populations) into competition coefficients and observed equilibria into
//!   carrying capacities;
//! - [`model`] holds the validated parameterization and evaluates the vector
//!   field and its Jacobian;
//! - [`dynamics`] integrates trajectories with fixed-step Euler (RK4 as the
//!   verification scheme) and decides when a run has settled;
//! - [`analysis`] enumerates and classifies equilibria, computes analytic
//!   sensitivities, and answers "how much must a parameter move" questions;
//! - [`scenario`] loads JSON scenario files and emits CSV trajectories.
//!
//! Everything is pure and deterministic: the same inputs produce bitwise
//! identical results, and independent computations can run concurrently.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod estimation;
pub mod linalg;
pub mod model;
pub mod scenario;

pub use num_complex::Complex64;

pub use analysis::{
    EquilibriumReport, InteriorEquilibrium, SensitivityReport, SupportEquilibrium, SweepRow,
    TargetChange, TwoSpeciesRegime,
};
pub use dynamics::{Method, SimulationProtocol, Trajectory};
pub use error::{Error, Result};
pub use estimation::AlphaPair;
pub use model::{CompetitionModel, ParamPath, PopulationState};
pub use scenario::Scenario;
