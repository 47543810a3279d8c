//! Parameterization of the n-species competitive Lotka-Volterra system and
//! evaluation of its vector field and Jacobian.
//!
//! The per-species growth rate is
//!
//! ```text
//! dN_i/dt = r_i · N_i · (1 − (Σ_j alpha[i][j] · N_j) / K_i)
//! ```
//!
//! with `alpha[i][i] = 1`, so the sum inside the parenthesis is a plain dot
//! product of row `i` of the competition matrix with the population vector.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Immutable parameter set of an n-species competitive Lotka-Volterra system.
///
/// Orientation of the competition matrix: `alpha[i][j]` is the per-capita
/// pressure of species `j` on species `i` ("row = species under pressure,
/// column = competitor"). The transposed convention is the classic mistake
/// with this model; everything in this crate, scenario files included,
/// reads the matrix row-major in exactly this sense. The diagonal is stored
/// explicitly and must be exactly 1.
///
/// Instances are validated on construction and immutable afterwards; all
/// operations are pure, so a model may be shared freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct CompetitionModel {
    species_names: Vec<String>,
    intrinsic_rates: Vec<f64>,
    capacities: Vec<f64>,
    alpha: Vec<Vec<f64>>,
}

/// A single tunable scalar of a model: a carrying capacity or an
/// off-diagonal competition coefficient. Indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamPath {
    /// `K[i]`.
    Capacity(usize),
    /// `alpha[row][col]` with `row != col` (the diagonal is pinned at 1).
    Alpha { row: usize, col: usize },
}

pub(crate) fn validate_alpha(alpha: &[Vec<f64>]) -> Result<()> {
    let n = alpha.len();
    for (i, row) in alpha.iter().enumerate() {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                context: "alpha row length vs species count",
                expected: n,
                found: row.len(),
            });
        }
        if row[i] != 1.0 {
            return Err(Error::NonUnitAlphaDiagonal {
                index: i,
                value: row[i],
            });
        }
    }
    for (i, row) in alpha.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidAlpha {
                    row: i,
                    col: j,
                    value: v,
                });
            }
        }
    }
    Ok(())
}

impl CompetitionModel {
    /// Builds a model, rejecting the first violated invariant: dimension
    /// mismatches, empty or duplicate names, nonpositive growth rates or
    /// capacities, a non-unit alpha diagonal, or negative alpha entries.
    pub fn new(
        species_names: Vec<String>,
        intrinsic_rates: Vec<f64>,
        capacities: Vec<f64>,
        alpha: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let n = species_names.len();
        if n == 0 {
            return Err(Error::EmptyModel);
        }
        if intrinsic_rates.len() != n {
            return Err(Error::DimensionMismatch {
                context: "growth rates vs species count",
                expected: n,
                found: intrinsic_rates.len(),
            });
        }
        if capacities.len() != n {
            return Err(Error::DimensionMismatch {
                context: "capacities vs species count",
                expected: n,
                found: capacities.len(),
            });
        }
        if alpha.len() != n {
            return Err(Error::DimensionMismatch {
                context: "alpha rows vs species count",
                expected: n,
                found: alpha.len(),
            });
        }

        let mut seen = HashSet::new();
        for (i, name) in species_names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::EmptySpeciesName { index: i });
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateSpeciesName { name: name.clone() });
            }
        }
        for (i, &r) in intrinsic_rates.iter().enumerate() {
            if !r.is_finite() || r <= 0.0 {
                return Err(Error::InvalidGrowthRate { index: i, value: r });
            }
        }
        for (i, &k) in capacities.iter().enumerate() {
            if !k.is_finite() || k <= 0.0 {
                return Err(Error::InvalidCapacity { index: i, value: k });
            }
        }
        validate_alpha(&alpha)?;

        Ok(Self {
            species_names,
            intrinsic_rates,
            capacities,
            alpha,
        })
    }

    /// Number of species.
    pub fn len(&self) -> usize {
        self.species_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.species_names.is_empty()
    }

    pub fn species_names(&self) -> &[String] {
        &self.species_names
    }

    pub fn intrinsic_rates(&self) -> &[f64] {
        &self.intrinsic_rates
    }

    pub fn capacities(&self) -> &[f64] {
        &self.capacities
    }

    pub fn alpha(&self) -> &[Vec<f64>] {
        &self.alpha
    }

    fn check_param(&self, path: ParamPath) -> Result<()> {
        let n = self.len();
        match path {
            ParamPath::Capacity(i) => {
                if i >= n {
                    return Err(Error::InvalidParamPath {
                        reason: format!("capacity index {i} out of range for {n} species"),
                    });
                }
            }
            ParamPath::Alpha { row, col } => {
                if row >= n || col >= n {
                    return Err(Error::InvalidParamPath {
                        reason: format!(
                            "alpha index ({row}, {col}) out of range for {n} species"
                        ),
                    });
                }
                if row == col {
                    return Err(Error::InvalidParamPath {
                        reason: format!("alpha[{row}][{col}] is diagonal and fixed at 1"),
                    });
                }
            }
        }
        Ok(())
    }

    /// Current value of a tunable parameter.
    pub fn param_value(&self, path: ParamPath) -> Result<f64> {
        self.check_param(path)?;
        Ok(match path {
            ParamPath::Capacity(i) => self.capacities[i],
            ParamPath::Alpha { row, col } => self.alpha[row][col],
        })
    }

    /// Copy of the model with one parameter replaced; the new value is held
    /// to the same invariants as in `new`.
    pub fn with_param(&self, path: ParamPath, value: f64) -> Result<Self> {
        self.check_param(path)?;
        let mut out = self.clone();
        match path {
            ParamPath::Capacity(i) => {
                if !value.is_finite() || value <= 0.0 {
                    return Err(Error::InvalidCapacity { index: i, value });
                }
                out.capacities[i] = value;
            }
            ParamPath::Alpha { row, col } => {
                if !value.is_finite() || value < 0.0 {
                    return Err(Error::InvalidAlpha { row, col, value });
                }
                out.alpha[row][col] = value;
            }
        }
        Ok(out)
    }

    /// Vector field `f_i = r_i·N_i·(1 − (Σ_j alpha[i][j]·N_j)/K_i)`, in
    /// students per unit time.
    pub fn growth_rates(&self, state: &PopulationState) -> Result<Vec<f64>> {
        self.growth_rates_at(state.populations())
    }

    pub(crate) fn growth_rates_at(&self, populations: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        if populations.len() != n {
            return Err(Error::DimensionMismatch {
                context: "population vector vs model",
                expected: n,
                found: populations.len(),
            });
        }
        Ok((0..n)
            .map(|i| {
                let load: f64 = self.alpha[i]
                    .iter()
                    .zip(populations)
                    .map(|(a, nj)| a * nj)
                    .sum();
                self.intrinsic_rates[i] * populations[i] * (1.0 - load / self.capacities[i])
            })
            .collect())
    }

    /// Jacobian of the vector field: entry `(i, j)` is `∂f_i/∂N_j`, i.e.
    /// `−r_i·N_i·alpha[i][j]/K_i` off the diagonal and
    /// `r_i·(1 − (2N_i + Σ_{j≠i} alpha[i][j]·N_j)/K_i)` on it.
    pub fn jacobian(&self, state: &PopulationState) -> Result<Vec<Vec<f64>>> {
        self.jacobian_at(state.populations())
    }

    pub(crate) fn jacobian_at(&self, populations: &[f64]) -> Result<Vec<Vec<f64>>> {
        let n = self.len();
        if populations.len() != n {
            return Err(Error::DimensionMismatch {
                context: "population vector vs model",
                expected: n,
                found: populations.len(),
            });
        }
        let mut jac = vec![vec![0.0; n]; n];
        for i in 0..n {
            let r = self.intrinsic_rates[i];
            let k = self.capacities[i];
            let load: f64 = self.alpha[i]
                .iter()
                .zip(populations)
                .map(|(a, nj)| a * nj)
                .sum();
            for j in 0..n {
                if i == j {
                    jac[i][i] = r * (1.0 - (populations[i] + load) / k);
                } else {
                    jac[i][j] = -r * populations[i] * self.alpha[i][j] / k;
                }
            }
        }
        Ok(jac)
    }
}

/// Nonnegative population vector (students) at an instant of model time.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationState {
    populations: Vec<f64>,
    time: f64,
}

impl PopulationState {
    pub fn new(populations: Vec<f64>, time: f64) -> Result<Self> {
        for (i, &v) in populations.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidPopulation { index: i, value: v });
            }
        }
        if !time.is_finite() {
            return Err(Error::NonFiniteTime { value: time });
        }
        Ok(Self { populations, time })
    }

    pub fn populations(&self) -> &[f64] {
        &self.populations
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn len(&self) -> usize {
        self.populations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.populations.is_empty()
    }
}
