//! Scenario files and result serialization.
//!
//! The scenario format is a single JSON document:
//!
//! ```json
//! {
//!   "title": "…",
//!   "species": [ { "name": "unca", "r": 1.0, "K": 32.0, "N0": 8.0 }, … ],
//!   "alpha": [ [1.0, 0.25], [1.0, 1.0] ],
//!   "sim": { "method": "euler", "step": 0.01, "steps": 1500, "record_every": 10 }
//! }
//! ```
//!
//! `alpha[i][j]` is the pressure of species `j` on species `i`; the diagonal
//! must be 1. Unknown keys are rejected so that typos fail loudly.

use serde::{Deserialize, Serialize};

use crate::dynamics::{Method, SimulationProtocol, Trajectory};
use crate::error::{Error, Result};
use crate::model::{CompetitionModel, PopulationState};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    title: String,
    species: Vec<SpeciesEntry>,
    alpha: Vec<Vec<f64>>,
    sim: SimEntry,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpeciesEntry {
    name: String,
    r: f64,
    #[serde(rename = "K")]
    capacity: f64,
    #[serde(rename = "N0")]
    initial: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimEntry {
    method: Method,
    step: f64,
    steps: usize,
    record_every: usize,
}

/// A model plus its initial state and simulation protocol, as loaded from a
/// scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    title: String,
    model: CompetitionModel,
    initial: PopulationState,
    protocol: SimulationProtocol,
}

impl Scenario {
    pub fn from_parts(
        title: String,
        model: CompetitionModel,
        initial: PopulationState,
        protocol: SimulationProtocol,
    ) -> Result<Self> {
        if initial.len() != model.len() {
            return Err(Error::DimensionMismatch {
                context: "initial state vs model",
                expected: model.len(),
                found: initial.len(),
            });
        }
        Ok(Self {
            title,
            model,
            initial,
            protocol,
        })
    }

    /// Parses and validates a scenario document. Malformed JSON and unknown
    /// keys surface with line/column positions; invariant violations name
    /// the offending field.
    pub fn parse(text: &str) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        let names = file.species.iter().map(|s| s.name.clone()).collect();
        let rates = file.species.iter().map(|s| s.r).collect();
        let capacities = file.species.iter().map(|s| s.capacity).collect();
        let model = CompetitionModel::new(names, rates, capacities, file.alpha)?;
        let initial =
            PopulationState::new(file.species.iter().map(|s| s.initial).collect(), 0.0)?;
        let protocol = SimulationProtocol::new(
            file.sim.method,
            file.sim.step,
            file.sim.steps,
            file.sim.record_every,
        )?;
        Scenario::from_parts(file.title, model, initial, protocol)
    }

    /// Serializes back to the scenario format. `parse(to_json(s))` recovers
    /// the scenario exactly (f64 values round-trip through JSON losslessly).
    pub fn to_json(&self) -> String {
        let file = ScenarioFile {
            title: self.title.clone(),
            species: (0..self.model.len())
                .map(|i| SpeciesEntry {
                    name: self.model.species_names()[i].clone(),
                    r: self.model.intrinsic_rates()[i],
                    capacity: self.model.capacities()[i],
                    initial: self.initial.populations()[i],
                })
                .collect(),
            alpha: self.model.alpha().to_vec(),
            sim: SimEntry {
                method: self.protocol.method(),
                step: self.protocol.step(),
                steps: self.protocol.steps(),
                record_every: self.protocol.record_every(),
            },
        };
        let mut out =
            serde_json::to_string_pretty(&file).expect("scenario serialization cannot fail");
        out.push('\n');
        out
    }

    pub fn title(&self) -> &str {
        &self.title
    }

    pub fn model(&self) -> &CompetitionModel {
        &self.model
    }

    pub fn initial(&self) -> &PopulationState {
        &self.initial
    }

    pub fn protocol(&self) -> &SimulationProtocol {
        &self.protocol
    }

    /// Same scenario with another protocol (used for command-line overrides).
    pub fn with_protocol(&self, protocol: SimulationProtocol) -> Self {
        Self {
            protocol,
            ..self.clone()
        }
    }
}

/// Renders a trajectory as CSV: header `t,<name1>,…,<nameN>`, one row per
/// recorded sample, shortest round-trip decimal formatting (exact parse-back),
/// newline-terminated.
pub fn write_trajectory_csv(trajectory: &Trajectory, names: &[String]) -> Result<String> {
    let dim = trajectory.samples()[0].len();
    if names.len() != dim {
        return Err(Error::DimensionMismatch {
            context: "species names vs trajectory",
            expected: dim,
            found: names.len(),
        });
    }
    for name in names {
        if name.contains([',', '"', '\n', '\r']) {
            return Err(Error::CsvUnsafeName { name: name.clone() });
        }
    }
    let mut out = String::from("t");
    for name in names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for sample in trajectory.samples() {
        out.push_str(&format!("{}", sample.time()));
        for v in sample.populations() {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    Ok(out)
}
