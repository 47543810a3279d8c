//! Minimal library walkthrough: build the two-institution model, simulate
//! it, and inspect its equilibria.

use lvniche_core::analysis::{enumerate_equilibria, interior_equilibrium};
use lvniche_core::dynamics::{simulate, Method, SimulationProtocol};
use lvniche_core::{CompetitionModel, PopulationState};

fn main() -> Result<(), lvniche_core::Error> {
    let model = CompetitionModel::new(
        vec!["external".into(), "unca".into()],
        vec![1.0, 1.0],   // intrinsic growth rates
        vec![26.0, 32.0], // carrying capacities
        vec![vec![1.0, 0.25], vec![1.0, 1.0]],
    )?;
    let start = PopulationState::new(vec![24.0, 8.0], 0.0)?;
    let protocol = SimulationProtocol::new(Method::Euler, 0.01, 1500, 10)?;
    let trajectory = simulate(&model, &start, &protocol)?;
    println!("final: {:?}", trajectory.final_state().populations());
    println!("interior: {:?}", interior_equilibrium(&model).into_feasible());
    println!("fixed points: {}", enumerate_equilibria(&model)?.len());
    Ok(())
}
