//! Fixed points of the competition system: the interior equilibrium,
//! exhaustive support enumeration with stability verdicts, the two-species
//! regime classifier, and invasion growth rates.

use num_complex::Complex64;

use crate::error::{DegenerateBoundary, Error, Result};
use crate::linalg;
use crate::model::{CompetitionModel, PopulationState};

/// Supports are enumerated exhaustively (2^n subsets), so enumeration is
/// capped at this many species.
pub const MAX_ENUMERATION_SPECIES: usize = 8;

/// An eigenvalue real part within this tolerance of zero makes the verdict
/// "marginal" rather than "stable".
pub const EIGENVALUE_ZERO_TOL: f64 = 1e-9;

/// Outcome of solving `Σ_j alpha[i][j]·N_j = K_i` for all species at once.
#[derive(Debug, Clone, PartialEq)]
pub enum InteriorEquilibrium {
    /// All components strictly positive.
    Feasible(PopulationState),
    /// The linear system solves, but some component is not strictly positive.
    Infeasible { solution: Vec<f64> },
    /// The alpha matrix is singular.
    Singular,
}

impl InteriorEquilibrium {
    pub fn feasible(&self) -> Option<&PopulationState> {
        match self {
            InteriorEquilibrium::Feasible(state) => Some(state),
            _ => None,
        }
    }

    pub fn into_feasible(self) -> Option<PopulationState> {
        match self {
            InteriorEquilibrium::Feasible(state) => Some(state),
            _ => None,
        }
    }
}

/// Solves the interior fixed-point system `alpha · N* = K`.
pub fn interior_equilibrium(model: &CompetitionModel) -> InteriorEquilibrium {
    match linalg::solve(model.alpha(), model.capacities()) {
        None => InteriorEquilibrium::Singular,
        Some(solution) => {
            if solution.iter().all(|&v| v > 0.0) {
                let state = PopulationState::new(solution, 0.0)
                    .expect("positive solution is a valid state");
                InteriorEquilibrium::Feasible(state)
            } else {
                InteriorEquilibrium::Infeasible { solution }
            }
        }
    }
}

/// One fixed point of the system, restricted to a survivor support.
///
/// `populations` is the raw fixed-point solution: off-support components are
/// exactly zero, and on-support components are positive exactly when the
/// equilibrium is feasible (an infeasible support solves to a point outside
/// the positive orthant, which is still a legitimate fixed point to report).
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    pub support: Vec<usize>,
    pub populations: Vec<f64>,
    pub eigenvalues: Vec<Complex64>,
    /// All on-support populations strictly positive.
    pub feasible: bool,
    /// Feasible and every eigenvalue real part below −[`EIGENVALUE_ZERO_TOL`].
    pub stable: bool,
    /// Some eigenvalue real part within [`EIGENVALUE_ZERO_TOL`] of zero while
    /// none exceeds it; never reported stable.
    pub marginal: bool,
}

impl EquilibriumReport {
    /// The fixed point as a state, available when feasible.
    pub fn state(&self) -> Option<PopulationState> {
        if self.feasible {
            Some(
                PopulationState::new(self.populations.clone(), 0.0)
                    .expect("feasible equilibrium is a valid state"),
            )
        } else {
            None
        }
    }
}

/// Per-support outcome of [`enumerate_equilibria`].
#[derive(Debug, Clone, PartialEq)]
pub enum SupportEquilibrium {
    Equilibrium(EquilibriumReport),
    /// The restricted alpha submatrix is singular for this support.
    Singular { support: Vec<usize> },
}

impl SupportEquilibrium {
    pub fn report(&self) -> Option<&EquilibriumReport> {
        match self {
            SupportEquilibrium::Equilibrium(report) => Some(report),
            SupportEquilibrium::Singular { .. } => None,
        }
    }

    pub fn support(&self) -> &[usize] {
        match self {
            SupportEquilibrium::Equilibrium(report) => &report.support,
            SupportEquilibrium::Singular { support } => support,
        }
    }
}

fn classify_eigenvalues(eigenvalues: &[Complex64]) -> (bool, bool) {
    let any_positive = eigenvalues.iter().any(|z| z.re > EIGENVALUE_ZERO_TOL);
    let any_marginal = eigenvalues.iter().any(|z| z.re.abs() <= EIGENVALUE_ZERO_TOL);
    let spectrally_stable = !any_positive && !any_marginal;
    let marginal = !any_positive && any_marginal;
    (spectrally_stable, marginal)
}

/// Solves the restricted fixed-point system on every one of the 2^n support
/// subsets, in bitmask order (the origin first, the full support last).
/// Singular subsystems are flagged per entry rather than aborting the scan.
pub fn enumerate_equilibria(model: &CompetitionModel) -> Result<Vec<SupportEquilibrium>> {
    let n = model.len();
    if n > MAX_ENUMERATION_SPECIES {
        return Err(Error::TooManySpecies {
            n,
            max: MAX_ENUMERATION_SPECIES,
        });
    }

    let mut out = Vec::with_capacity(1 << n);
    for mask in 0u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let mut populations = vec![0.0; n];
        if !support.is_empty() {
            let sub_alpha: Vec<Vec<f64>> = support
                .iter()
                .map(|&i| support.iter().map(|&j| model.alpha()[i][j]).collect())
                .collect();
            let sub_k: Vec<f64> = support.iter().map(|&i| model.capacities()[i]).collect();
            match linalg::solve(&sub_alpha, &sub_k) {
                None => {
                    out.push(SupportEquilibrium::Singular { support });
                    continue;
                }
                Some(solution) => {
                    for (&i, v) in support.iter().zip(solution) {
                        populations[i] = v;
                    }
                }
            }
        }
        let feasible = support.iter().all(|&i| populations[i] > 0.0);
        let jacobian = model.jacobian_at(&populations)?;
        let eigenvalues = linalg::eigenvalues(&jacobian);
        let (spectrally_stable, marginal) = classify_eigenvalues(&eigenvalues);
        out.push(SupportEquilibrium::Equilibrium(EquilibriumReport {
            support,
            populations,
            eigenvalues,
            feasible,
            stable: feasible && spectrally_stable,
            marginal,
        }));
    }
    Ok(out)
}

/// The four qualitative outcomes of two-species competition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoSpeciesRegime {
    /// Species 1 always wins; species 2 is excluded.
    Species1Excludes,
    /// Species 2 always wins; species 1 is excluded.
    Species2Excludes,
    /// Both single-species equilibria attract; the winner depends on the
    /// initial state (founder control).
    UnstableCoexistence,
    /// The interior equilibrium exists and attracts.
    StableCoexistence,
}

impl std::fmt::Display for TwoSpeciesRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let label = match self {
            TwoSpeciesRegime::Species1Excludes => "species 1 excludes species 2",
            TwoSpeciesRegime::Species2Excludes => "species 2 excludes species 1",
            TwoSpeciesRegime::UnstableCoexistence => "unstable coexistence (founder control)",
            TwoSpeciesRegime::StableCoexistence => "stable coexistence",
        };
        write!(f, "{label}")
    }
}

/// Regime from the strict capacity inequalities: stable coexistence iff
/// `K1 > alpha[1][2]·K2` and `K2 > alpha[2][1]·K1`, founder control iff both
/// reversed, exclusion otherwise. Equality in either comparison is a
/// degenerate model and reported as an error naming the failed inequality.
pub fn classify_two_species(model: &CompetitionModel) -> Result<TwoSpeciesRegime> {
    let n = model.len();
    if n != 2 {
        return Err(Error::NotTwoSpecies { n });
    }
    let k1 = model.capacities()[0];
    let k2 = model.capacities()[1];
    let cross1 = model.alpha()[0][1] * k2;
    let cross2 = model.alpha()[1][0] * k1;
    if k1 == cross1 {
        return Err(Error::DegenerateRegime {
            boundary: DegenerateBoundary::CapacityOneEqualsCrossLoad,
        });
    }
    if k2 == cross2 {
        return Err(Error::DegenerateRegime {
            boundary: DegenerateBoundary::CapacityTwoEqualsCrossLoad,
        });
    }
    Ok(match (k1 > cross1, k2 > cross2) {
        (true, true) => TwoSpeciesRegime::StableCoexistence,
        (false, false) => TwoSpeciesRegime::UnstableCoexistence,
        (true, false) => TwoSpeciesRegime::Species1Excludes,
        (false, true) => TwoSpeciesRegime::Species2Excludes,
    })
}

/// Per-capita growth rate of a vanishingly small invader introduced at a
/// resident equilibrium: `r_inv·(1 − Σ_j alpha[inv][j]·N*_j / K_inv)`.
pub fn invasion_growth_rate(
    model: &CompetitionModel,
    resident: &EquilibriumReport,
    invader: usize,
) -> Result<f64> {
    let load = invasion_load(model, resident, invader)?;
    Ok(model.intrinsic_rates()[invader] * (1.0 - load / model.capacities()[invader]))
}

/// The invader capacity at which the invasion growth rate crosses zero:
/// `Σ_j alpha[inv][j]·N*_j`, the resident load felt by the invader.
pub fn invasion_threshold_capacity(
    model: &CompetitionModel,
    resident: &EquilibriumReport,
    invader: usize,
) -> Result<f64> {
    invasion_load(model, resident, invader)
}

fn invasion_load(
    model: &CompetitionModel,
    resident: &EquilibriumReport,
    invader: usize,
) -> Result<f64> {
    let n = model.len();
    if invader >= n {
        return Err(Error::SpeciesIndexOutOfRange { index: invader, n });
    }
    if resident.populations.len() != n {
        return Err(Error::DimensionMismatch {
            context: "resident equilibrium vs model",
            expected: n,
            found: resident.populations.len(),
        });
    }
    if resident.support.contains(&invader) {
        return Err(Error::InvaderInSupport { invader });
    }
    Ok(model.alpha()[invader]
        .iter()
        .zip(&resident.populations)
        .map(|(a, nj)| a * nj)
        .sum())
}
