//! Equilibrium structure, stability, regimes, and policy sensitivities.

mod equilibria;
mod sensitivity;
mod sweep;

pub use equilibria::{
    classify_two_species, enumerate_equilibria, interior_equilibrium, invasion_growth_rate,
    invasion_threshold_capacity, EquilibriumReport, InteriorEquilibrium, SupportEquilibrium,
    TwoSpeciesRegime, EIGENVALUE_ZERO_TOL, MAX_ENUMERATION_SPECIES,
};
pub use sensitivity::{
    percent_change_for_target, perturbed_equilibrium, sensitivity_matrix, SensitivityReport,
    TargetChange,
};
pub use sweep::{sweep, SweepRow, SWEEP_SETTLE_TOL, SWEEP_SETTLE_WINDOW};
