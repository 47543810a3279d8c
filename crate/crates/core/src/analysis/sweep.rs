//! Batch simulation over a list of values for one parameter, with
//! settle/extinction/survival flags per row.

use crate::dynamics::{
    detect_settled, simulate, SimulationProtocol, EXTINCTION_THRESHOLD, SURVIVAL_THRESHOLD,
};
use crate::error::Result;
use crate::model::{CompetitionModel, ParamPath, PopulationState};

/// Settle check applied to each sweep row.
pub const SWEEP_SETTLE_TOL: f64 = 1e-4;
pub const SWEEP_SETTLE_WINDOW: usize = 10;

/// Outcome of one sweep value: the simulated endpoint plus the reporting
/// predicates (extinct below [`EXTINCTION_THRESHOLD`], surviving at or above
/// [`SURVIVAL_THRESHOLD`] students).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub final_state: PopulationState,
    /// Settled per [`detect_settled`] with the sweep defaults; false when the
    /// protocol records fewer samples than the window.
    pub settled: bool,
    pub extinct: Vec<bool>,
    pub survives: Vec<bool>,
}

/// Runs one simulation per value of `path`, in input order. Values are
/// absolute parameter values, and each must yield a valid model. Rows are
/// independent and deterministic.
pub fn sweep(
    model: &CompetitionModel,
    path: ParamPath,
    values: &[f64],
    initial: &PopulationState,
    protocol: &SimulationProtocol,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(values.len());
    for &value in values {
        let variant = model.with_param(path, value)?;
        let trajectory = simulate(&variant, initial, protocol)?;
        let settled = matches!(
            detect_settled(&trajectory, SWEEP_SETTLE_TOL, SWEEP_SETTLE_WINDOW),
            Ok(Some(_))
        );
        let final_state = trajectory.final_state().clone();
        let extinct = final_state
            .populations()
            .iter()
            .map(|&n| n < EXTINCTION_THRESHOLD)
            .collect();
        let survives = final_state
            .populations()
            .iter()
            .map(|&n| n >= SURVIVAL_THRESHOLD)
            .collect();
        rows.push(SweepRow {
            value,
            final_state,
            settled,
            extinct,
            survives,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Method;

    fn three_species(k3: f64) -> CompetitionModel {
        CompetitionModel::new(
            vec!["external".into(), "unca".into(), "nova".into()],
            vec![1.0, 1.0, 1.0],
            vec![26.0, 32.0, k3],
            vec![
                vec![1.0, 0.25, 0.25],
                vec![1.0, 1.0, 0.7],
                vec![1.0, 0.3, 1.0],
            ],
        )
        .unwrap()
    }

    fn initial() -> PopulationState {
        PopulationState::new(vec![24.0, 8.0, 24.0], 0.0).unwrap()
    }

    #[test]
    fn singleton_sweep_equals_plain_simulation() {
        let model = three_species(16.0);
        let protocol = SimulationProtocol::new(Method::Euler, 0.01, 1500, 10).unwrap();
        let rows = sweep(
            &model,
            ParamPath::Capacity(2),
            &[16.0],
            &initial(),
            &protocol,
        )
        .unwrap();
        assert_eq!(rows.len(), 1);
        let direct = simulate(&model, &initial(), &protocol).unwrap();
        assert_eq!(rows[0].final_state, *direct.final_state());
        assert!(rows[0].extinct[2]);
        assert!(!rows[0].survives[2]);
        assert!(rows[0].survives[0] && rows[0].survives[1]);
    }

    #[test]
    fn survival_turns_on_between_27_and_28() {
        let model = three_species(16.0);
        let protocol = SimulationProtocol::new(Method::Euler, 0.01, 15000, 10).unwrap();
        let rows = sweep(
            &model,
            ParamPath::Capacity(2),
            &[26.0, 27.0, 28.0, 29.0],
            &initial(),
            &protocol,
        )
        .unwrap();
        let survived: Vec<bool> = rows.iter().map(|r| r.survives[2]).collect();
        assert_eq!(survived, vec![false, false, true, true]);
    }

    #[test]
    fn invalid_values_and_paths_are_rejected() {
        let model = three_species(16.0);
        let protocol = SimulationProtocol::new(Method::Euler, 0.01, 100, 10).unwrap();
        assert!(sweep(
            &model,
            ParamPath::Capacity(2),
            &[16.0, -1.0],
            &initial(),
            &protocol
        )
        .is_err());
        assert!(sweep(
            &model,
            ParamPath::Alpha { row: 1, col: 1 },
            &[0.5],
            &initial(),
            &protocol
        )
        .is_err());
    }
}
