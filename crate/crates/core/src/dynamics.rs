//! Fixed-step time integration of the competition system: explicit Euler as
//! the workhorse scheme, classical RK4 as the verification integrator.
//!
//! Populations are physical counts, so any negative overshoot of a step is
//! clamped to zero and the clamp is recorded on the trajectory.

use crate::error::{Error, Result};
use crate::model::{CompetitionModel, PopulationState};

/// A species is reported extinct in summaries when its population falls
/// below a thousandth of a student.
pub const EXTINCTION_THRESHOLD: f64 = 1e-3;

/// A species counts as surviving a run when it ends with at least one whole
/// student enrolled.
pub const SURVIVAL_THRESHOLD: f64 = 1.0;

/// Integration scheme of a simulation protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Euler,
    Rk4,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Euler => write!(f, "euler"),
            Method::Rk4 => write!(f, "rk4"),
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "euler" => Ok(Method::Euler),
            "rk4" => Ok(Method::Rk4),
            other => Err(format!("unknown method {other:?} (expected euler or rk4)")),
        }
    }
}

/// Fixed-step iteration protocol: scheme, step size, iteration count, and
/// the sampling stride for recorded states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationProtocol {
    method: Method,
    step: f64,
    steps: usize,
    record_every: usize,
}

impl SimulationProtocol {
    pub fn new(method: Method, step: f64, steps: usize, record_every: usize) -> Result<Self> {
        if !step.is_finite() || step <= 0.0 {
            return Err(Error::NonpositiveStep { value: step });
        }
        if steps == 0 {
            return Err(Error::ZeroSteps);
        }
        if record_every == 0 || record_every > steps {
            return Err(Error::RecordEveryOutOfRange {
                record_every,
                steps,
            });
        }
        Ok(Self {
            method,
            step,
            steps,
            record_every,
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn record_every(&self) -> usize {
        self.record_every
    }
}

/// A step clamped species `species` to zero at iteration `step_index`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClampEvent {
    pub step_index: usize,
    pub time: f64,
    pub species: usize,
}

/// Time-ordered recorded states of one simulation, starting at the initial
/// state (t = 0) and ending at t = steps·step.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<PopulationState>,
    clamp_events: Vec<ClampEvent>,
}

impl Trajectory {
    /// Assembles a trajectory from pre-built samples, enforcing strictly
    /// increasing time and consistent dimensions.
    pub fn from_samples(samples: Vec<PopulationState>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::ZeroSteps);
        }
        let dim = samples[0].len();
        for pair in samples.windows(2) {
            if pair[1].time() <= pair[0].time() {
                return Err(Error::NonFiniteTime {
                    value: pair[1].time(),
                });
            }
        }
        if samples.iter().any(|s| s.len() != dim) {
            return Err(Error::DimensionMismatch {
                context: "trajectory sample dimensions",
                expected: dim,
                found: samples.iter().map(|s| s.len()).find(|&l| l != dim).unwrap_or(dim),
            });
        }
        Ok(Self {
            samples,
            clamp_events: Vec::new(),
        })
    }

    pub fn samples(&self) -> &[PopulationState] {
        &self.samples
    }

    pub fn final_state(&self) -> &PopulationState {
        self.samples.last().expect("trajectory is never empty")
    }

    pub fn clamp_events(&self) -> &[ClampEvent] {
        &self.clamp_events
    }
}

/// One population update; returns the clamped vector and which components
/// were clamped.
fn advance(
    model: &CompetitionModel,
    populations: &[f64],
    h: f64,
    method: Method,
) -> Result<(Vec<f64>, Vec<usize>)> {
    let proposed: Vec<f64> = match method {
        Method::Euler => {
            let f = model.growth_rates_at(populations)?;
            populations
                .iter()
                .zip(&f)
                .map(|(n, fi)| n + h * fi)
                .collect()
        }
        Method::Rk4 => {
            let k1 = model.growth_rates_at(populations)?;
            let mid1: Vec<f64> = populations
                .iter()
                .zip(&k1)
                .map(|(n, k)| n + 0.5 * h * k)
                .collect();
            let k2 = model.growth_rates_at(&mid1)?;
            let mid2: Vec<f64> = populations
                .iter()
                .zip(&k2)
                .map(|(n, k)| n + 0.5 * h * k)
                .collect();
            let k3 = model.growth_rates_at(&mid2)?;
            let end: Vec<f64> = populations
                .iter()
                .zip(&k3)
                .map(|(n, k)| n + h * k)
                .collect();
            let k4 = model.growth_rates_at(&end)?;
            populations
                .iter()
                .enumerate()
                .map(|(i, n)| n + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                .collect()
        }
    };
    let mut clamped = Vec::new();
    let next = proposed
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if v < 0.0 {
                clamped.push(i);
                0.0
            } else {
                v
            }
        })
        .collect();
    Ok((next, clamped))
}

fn single_step(
    model: &CompetitionModel,
    state: &PopulationState,
    h: f64,
    method: Method,
) -> Result<PopulationState> {
    if !h.is_finite() || h <= 0.0 {
        return Err(Error::NonpositiveStep { value: h });
    }
    let (next, _) = advance(model, state.populations(), h, method)?;
    if next.iter().any(|v| !v.is_finite()) {
        return Err(Error::IntegrationDiverged { step: 1 });
    }
    PopulationState::new(next, state.time() + h)
}

/// One explicit Euler step `N_i' = max(0, N_i + h·f_i(N))`, `t' = t + h`.
pub fn step_euler(
    model: &CompetitionModel,
    state: &PopulationState,
    h: f64,
) -> Result<PopulationState> {
    single_step(model, state, h, Method::Euler)
}

/// One classical 4-stage Runge-Kutta step of the same vector field, clamped
/// at zero identically to [`step_euler`].
pub fn step_rk4(
    model: &CompetitionModel,
    state: &PopulationState,
    h: f64,
) -> Result<PopulationState> {
    single_step(model, state, h, Method::Rk4)
}

/// Applies the protocol's stepper `steps` times from the initial state,
/// recording every `record_every`-th state plus the final one.
///
/// The trajectory clock starts at zero and sample `k` is stamped `k·step`
/// (computed by multiplication, so the final time is exactly `steps·step`);
/// the initial state's own timestamp is not consulted. Deterministic: equal
/// inputs produce bitwise-equal trajectories.
pub fn simulate(
    model: &CompetitionModel,
    initial: &PopulationState,
    protocol: &SimulationProtocol,
) -> Result<Trajectory> {
    if initial.len() != model.len() {
        return Err(Error::DimensionMismatch {
            context: "initial state vs model",
            expected: model.len(),
            found: initial.len(),
        });
    }
    let h = protocol.step();
    let mut populations = initial.populations().to_vec();
    let mut samples = vec![PopulationState::new(populations.clone(), 0.0)?];
    let mut clamp_events = Vec::new();

    for k in 1..=protocol.steps() {
        let (next, clamped) = advance(model, &populations, h, protocol.method())?;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::IntegrationDiverged { step: k });
        }
        populations = next;
        let t = h * k as f64;
        for species in clamped {
            clamp_events.push(ClampEvent {
                step_index: k,
                time: t,
                species,
            });
        }
        if k % protocol.record_every() == 0 || k == protocol.steps() {
            samples.push(PopulationState::new(populations.clone(), t)?);
        }
    }
    Ok(Trajectory {
        samples,
        clamp_events,
    })
}

/// Settle check over the last `window` recorded samples: settled when the
/// relative change of every component between consecutive samples,
/// `|Δ| / max(1, |previous|)`, stays at or below `tol`. Returns the final
/// state when settled.
pub fn detect_settled(
    trajectory: &Trajectory,
    tol: f64,
    window: usize,
) -> Result<Option<PopulationState>> {
    if window < 2 {
        return Err(Error::SettleWindowTooSmall { window });
    }
    let samples = trajectory.samples();
    if window > samples.len() {
        return Err(Error::SettleWindowExceedsSamples {
            window,
            samples: samples.len(),
        });
    }
    let tail = &samples[samples.len() - window..];
    for pair in tail.windows(2) {
        let (prev, next) = (pair[0].populations(), pair[1].populations());
        for (p, n) in prev.iter().zip(next) {
            let rel = (n - p).abs() / p.abs().max(1.0);
            // a NaN tolerance or change must count as not settled
            #[allow(clippy::neg_cmp_op_on_partial_ord)]
            if !(rel <= tol) {
                return Ok(None);
            }
        }
    }
    Ok(Some(trajectory.final_state().clone()))
}
