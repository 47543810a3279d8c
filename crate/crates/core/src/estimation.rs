//! Estimators for competition coefficients (from niche data) and carrying
//! capacities (from an observed equilibrium).
//!
//! Both coefficient estimators return unrounded values; scenario files that
//! want round constants store them explicitly.

use crate::error::{Error, Result};
use crate::model::validate_alpha;

/// A pair of opposed competition coefficients for two competitors. The
/// direction of `forward` is documented on each estimator; scenario files
/// always spell out the full alpha matrix, so nothing downstream depends on
/// remembering it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaPair {
    pub forward: f64,
    pub backward: f64,
}

/// Coefficients from the income niche dimension: `p` is the fraction of
/// local families wealthy enough to send students away.
///
/// `forward = p` is the pressure of the external pool on the local
/// institution (it can lose at most a fraction `p` of its catchment);
/// `backward = 1` because the local institution can absorb the external
/// pool's entire local catchment.
pub fn alpha_from_income_fraction(p: f64) -> Result<AlphaPair> {
    if !p.is_finite() || !(0.0..=1.0).contains(&p) {
        return Err(Error::FractionOutOfRange { value: p });
    }
    Ok(AlphaPair {
        forward: p,
        backward: 1.0,
    })
}

/// Coefficients from relative catchment populations of two comparable
/// institutions: `forward = pop_small / pop_large` is the pressure of the
/// small-catchment institution on the large one, and `backward` is its
/// complement `1 − forward`.
pub fn alpha_from_population_ratio(pop_small: f64, pop_large: f64) -> Result<AlphaPair> {
    for v in [pop_small, pop_large] {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::NonpositivePopulationCount { value: v });
        }
    }
    if pop_small > pop_large {
        return Err(Error::PopulationRatioAboveOne {
            small: pop_small,
            large: pop_large,
        });
    }
    let forward = pop_small / pop_large;
    Ok(AlphaPair {
        forward,
        backward: 1.0 - forward,
    })
}

/// Carrying capacities inferred from an interior equilibrium:
/// `K_i = Σ_j alpha[i][j] · N*_j`, which is what setting every growth rate
/// to zero demands. All `N*` entries must be strictly positive.
pub fn capacities_from_equilibrium(alpha: &[Vec<f64>], equilibrium: &[f64]) -> Result<Vec<f64>> {
    validate_alpha(alpha)?;
    if equilibrium.len() != alpha.len() {
        return Err(Error::DimensionMismatch {
            context: "equilibrium vector vs alpha",
            expected: alpha.len(),
            found: equilibrium.len(),
        });
    }
    for (i, &v) in equilibrium.iter().enumerate() {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::NonpositiveEquilibriumComponent { index: i, value: v });
        }
    }
    Ok(alpha
        .iter()
        .map(|row| row.iter().zip(equilibrium).map(|(a, n)| a * n).sum())
        .collect())
}
