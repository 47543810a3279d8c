//! Implementations of the five subcommands.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use lvniche_core::analysis::{
    classify_two_species, enumerate_equilibria, interior_equilibrium, invasion_threshold_capacity,
    percent_change_for_target, perturbed_equilibrium, sensitivity_matrix, sweep,
    InteriorEquilibrium, SupportEquilibrium, SWEEP_SETTLE_TOL, SWEEP_SETTLE_WINDOW,
};
use lvniche_core::dynamics::{
    detect_settled, simulate, Method, SimulationProtocol, EXTINCTION_THRESHOLD, SURVIVAL_THRESHOLD,
};
use lvniche_core::scenario::write_trajectory_csv;
use lvniche_core::{CompetitionModel, ParamPath, Scenario};
use serde::Serialize;

use crate::param::{format_param, parse_param};

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read scenario file {}", path.display()))?;
    Scenario::parse(&text).with_context(|| format!("invalid scenario {}", path.display()))
}

/// Output files are written whole or not at all: the content is staged to a
/// sibling temp file and renamed into place.
fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let Some(name) = path.file_name() else {
        bail!("output path {} has no file name", path.display());
    };
    let tmp = path.with_file_name(format!("{}.tmp", name.to_string_lossy()));
    std::fs::write(&tmp, content)
        .with_context(|| format!("cannot write {}", tmp.display()))?;
    std::fs::rename(&tmp, path)
        .with_context(|| format!("cannot move output into place at {}", path.display()))?;
    Ok(())
}

fn fmt6(v: f64) -> String {
    let s = format!("{v:.6}");
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    if trimmed == "-0" {
        "0".to_string()
    } else {
        trimmed.to_string()
    }
}

fn populations_line(names: &[String], values: &[f64]) -> String {
    names
        .iter()
        .zip(values)
        .map(|(n, v)| format!("{n} = {}", fmt6(*v)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn eigenvalue_string(z: lvniche_core::Complex64) -> String {
    if z.im == 0.0 {
        fmt6(z.re)
    } else if z.im > 0.0 {
        format!("{}+{}i", fmt6(z.re), fmt6(z.im))
    } else {
        format!("{}-{}i", fmt6(z.re), fmt6(-z.im))
    }
}

fn interior_line(model: &CompetitionModel) -> String {
    match interior_equilibrium(model) {
        InteriorEquilibrium::Feasible(state) => {
            populations_line(model.species_names(), state.populations())
        }
        InteriorEquilibrium::Infeasible { .. } => {
            "none (solution leaves the positive orthant)".to_string()
        }
        InteriorEquilibrium::Singular => "none (singular alpha matrix)".to_string(),
    }
}

#[allow(clippy::too_many_arguments)]
pub fn run_simulate(
    scenario_path: PathBuf,
    out: PathBuf,
    method: Option<Method>,
    step: Option<f64>,
    steps: Option<usize>,
    record_every: Option<usize>,
) -> Result<()> {
    let scenario = load_scenario(&scenario_path)?;
    let base = scenario.protocol();
    let protocol = SimulationProtocol::new(
        method.unwrap_or_else(|| base.method()),
        step.unwrap_or_else(|| base.step()),
        steps.unwrap_or_else(|| base.steps()),
        record_every.unwrap_or_else(|| base.record_every()),
    )?;
    let scenario = scenario.with_protocol(protocol);
    let model = scenario.model();

    let trajectory = simulate(model, scenario.initial(), scenario.protocol())?;
    let csv = write_trajectory_csv(&trajectory, model.species_names())?;

    let final_state = trajectory.final_state();
    println!("title: {}", scenario.title());
    println!(
        "method {}, step {}, steps {} (horizon t = {}), {} samples recorded",
        protocol.method(),
        protocol.step(),
        protocol.steps(),
        fmt6(final_state.time()),
        trajectory.samples().len()
    );
    println!(
        "state at t = {}: {}",
        fmt6(final_state.time()),
        populations_line(model.species_names(), final_state.populations())
    );
    match detect_settled(&trajectory, SWEEP_SETTLE_TOL, SWEEP_SETTLE_WINDOW) {
        Ok(Some(_)) => println!(
            "settled (relative change <= {SWEEP_SETTLE_TOL} over the last {SWEEP_SETTLE_WINDOW} samples): yes"
        ),
        Ok(None) => println!(
            "settled (relative change <= {SWEEP_SETTLE_TOL} over the last {SWEEP_SETTLE_WINDOW} samples): no — the endpoint is a transient, not an equilibrium"
        ),
        Err(_) => println!(
            "settled: n/a (needs at least {SWEEP_SETTLE_WINDOW} recorded samples)"
        ),
    }
    let extinct: Vec<&str> = model
        .species_names()
        .iter()
        .zip(final_state.populations())
        .filter(|(_, &n)| n < EXTINCTION_THRESHOLD)
        .map(|(name, _)| name.as_str())
        .collect();
    println!(
        "extinct (N < {EXTINCTION_THRESHOLD}): {}",
        if extinct.is_empty() {
            "none".to_string()
        } else {
            extinct.join(", ")
        }
    );
    println!("clamp events: {}", trajectory.clamp_events().len());
    println!("analytic interior equilibrium: {}", interior_line(model));

    write_atomic(&out, &csv)?;
    println!("wrote {}", out.display());
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Table,
    Json,
}

#[derive(Serialize)]
struct EquilibriumJson {
    support: Vec<String>,
    singular: bool,
    populations: Vec<f64>,
    eigenvalues: Vec<EigenvalueJson>,
    feasible: bool,
    stable: bool,
    marginal: bool,
}

#[derive(Serialize)]
struct EigenvalueJson {
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct EquilibriaJson {
    title: String,
    species: Vec<String>,
    equilibria: Vec<EquilibriumJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    regime: Option<String>,
}

fn regime_line(model: &CompetitionModel) -> Option<String> {
    if model.len() != 2 {
        return None;
    }
    Some(match classify_two_species(model) {
        Ok(regime) => regime.to_string(),
        Err(err) => format!("not classifiable: {err}"),
    })
}

pub fn run_equilibria(scenario_path: PathBuf, format: OutputFormat) -> Result<()> {
    let scenario = load_scenario(&scenario_path)?;
    let model = scenario.model();
    let entries = enumerate_equilibria(model)?;
    let names = model.species_names();

    match format {
        OutputFormat::Table => {
            println!("title: {}", scenario.title());
            println!("equilibria ({} supports):", entries.len());
            for entry in &entries {
                let support_names = entry
                    .support()
                    .iter()
                    .map(|&i| names[i].as_str())
                    .collect::<Vec<_>>();
                let support_label = if support_names.is_empty() {
                    "(none)".to_string()
                } else {
                    support_names.join("+")
                };
                match entry {
                    SupportEquilibrium::Singular { .. } => {
                        println!("  support {support_label}: singular subsystem");
                    }
                    SupportEquilibrium::Equilibrium(report) => {
                        let verdict = if report.stable {
                            "stable"
                        } else if report.marginal {
                            "marginal"
                        } else {
                            "unstable"
                        };
                        println!(
                            "  support {support_label}: N = ({}), eigenvalues = ({}), {}{}",
                            report.populations.iter().map(|&v| fmt6(v)).collect::<Vec<_>>().join(", "),
                            report
                                .eigenvalues
                                .iter()
                                .map(|&z| eigenvalue_string(z))
                                .collect::<Vec<_>>()
                                .join(", "),
                            verdict,
                            if report.feasible { ", feasible" } else { ", infeasible" },
                        );
                    }
                }
            }
            if let Some(regime) = regime_line(model) {
                println!("regime: {regime}");
            }
            println!("analytic interior equilibrium: {}", interior_line(model));
        }
        OutputFormat::Json => {
            let equilibria = entries
                .iter()
                .map(|entry| match entry {
                    SupportEquilibrium::Singular { support } => EquilibriumJson {
                        support: support.iter().map(|&i| names[i].clone()).collect(),
                        singular: true,
                        populations: Vec::new(),
                        eigenvalues: Vec::new(),
                        feasible: false,
                        stable: false,
                        marginal: false,
                    },
                    SupportEquilibrium::Equilibrium(report) => EquilibriumJson {
                        support: report.support.iter().map(|&i| names[i].clone()).collect(),
                        singular: false,
                        populations: report.populations.clone(),
                        eigenvalues: report
                            .eigenvalues
                            .iter()
                            .map(|z| EigenvalueJson { re: z.re, im: z.im })
                            .collect(),
                        feasible: report.feasible,
                        stable: report.stable,
                        marginal: report.marginal,
                    },
                })
                .collect();
            let doc = EquilibriaJson {
                title: scenario.title().to_string(),
                species: names.to_vec(),
                equilibria,
                regime: regime_line(model),
            };
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
    }
    Ok(())
}

fn all_param_paths(model: &CompetitionModel) -> Vec<ParamPath> {
    let n = model.len();
    let mut paths: Vec<ParamPath> = (0..n).map(ParamPath::Capacity).collect();
    for row in 0..n {
        for col in 0..n {
            if row != col {
                paths.push(ParamPath::Alpha { row, col });
            }
        }
    }
    paths
}

pub fn run_sensitivity(
    scenario_path: PathBuf,
    species: Option<usize>,
    target_delta: Option<f64>,
) -> Result<()> {
    let scenario = load_scenario(&scenario_path)?;
    let model = scenario.model();
    let names = model.species_names();
    let n = model.len();
    let report = sensitivity_matrix(model)?;

    println!("title: {}", scenario.title());
    println!(
        "base interior equilibrium: {}",
        populations_line(names, report.base_equilibrium.populations())
    );

    println!("dN*/dK (row species i, column K[j]; constant in K):");
    for (name, row) in names.iter().zip(&report.dn_dk) {
        let rendered = row.iter().map(|&v| fmt6(v)).collect::<Vec<_>>().join(", ");
        println!("  {name}: {rendered}");
    }

    println!("dN*/dalpha (students per unit coefficient):");
    for row in 0..n {
        for col in 0..n {
            if row == col {
                continue;
            }
            let derivs = (0..n)
                .map(|i| fmt6(report.dn_dalpha[i][row][col]))
                .collect::<Vec<_>>()
                .join(", ");
            println!(
                "  d/d{}: ({})",
                format_param(ParamPath::Alpha { row, col }),
                derivs
            );
        }
    }

    println!("one-percent perturbations (exact re-solve vs first-order estimate):");
    for path in all_param_paths(model) {
        let raw = model.param_value(path)?;
        for sign in [1.0, -1.0] {
            let rel = 0.01 * sign;
            let label = format!("{} {}1%", format_param(path), if sign > 0.0 { "+" } else { "-" });
            match perturbed_equilibrium(model, path, rel) {
                Ok(eq) => {
                    let linear: Vec<f64> = (0..n)
                        .map(|i| {
                            let slope = match path {
                                ParamPath::Capacity(j) => report.dn_dk[i][j],
                                ParamPath::Alpha { row, col } => report.dn_dalpha[i][row][col],
                            };
                            report.base_equilibrium.populations()[i] + slope * rel * raw
                        })
                        .collect();
                    println!(
                        "  {label}: exact N* = ({}); linear estimate = ({})",
                        eq.populations().iter().map(|&v| fmt6(v)).collect::<Vec<_>>().join(", "),
                        linear.iter().map(|&v| fmt6(v)).collect::<Vec<_>>().join(", "),
                    );
                }
                Err(err) => println!("  {label}: {err}"),
            }
        }
    }

    if let Some(species_one_based) = species {
        if species_one_based == 0 || species_one_based > n {
            bail!("--species is 1-based and must be within 1..={n}");
        }
        let focal = species_one_based - 1;
        let delta = target_delta.unwrap_or(1.0);
        println!(
            "smallest relative change for {} to gain {} student(s) at equilibrium:",
            names[focal],
            fmt6(delta)
        );
        for path in all_param_paths(model) {
            match percent_change_for_target(model, path, focal, delta) {
                Ok(change) => println!(
                    "  {}: {:+.3}% (linearized {:+.3}%)",
                    format_param(path),
                    change.percent,
                    change.linearized_percent
                ),
                Err(err) => println!("  {}: unreachable ({err})", format_param(path)),
            }
        }
    }
    Ok(())
}

pub fn run_sweep(
    scenario_path: PathBuf,
    param_text: String,
    from: f64,
    to: f64,
    points: usize,
    out: PathBuf,
) -> Result<()> {
    let scenario = load_scenario(&scenario_path)?;
    let model = scenario.model();
    let path = parse_param(&param_text)?;
    if points == 0 {
        bail!("--points must be at least 1");
    }
    let values: Vec<f64> = if points == 1 {
        vec![from]
    } else {
        (0..points)
            .map(|k| from + (to - from) * k as f64 / (points - 1) as f64)
            .collect()
    };

    let rows = sweep(model, path, &values, scenario.initial(), scenario.protocol())?;

    let names = model.species_names();
    let mut csv = String::from("value");
    for name in names {
        csv.push_str(&format!(",{name}"));
    }
    csv.push_str(",settled");
    for name in names {
        csv.push_str(&format!(",extinct_{name}"));
    }
    for name in names {
        csv.push_str(&format!(",survives_{name}"));
    }
    csv.push('\n');
    for row in &rows {
        csv.push_str(&format!("{}", row.value));
        for v in row.final_state.populations() {
            csv.push_str(&format!(",{v}"));
        }
        csv.push_str(&format!(",{}", row.settled));
        for e in &row.extinct {
            csv.push_str(&format!(",{e}"));
        }
        for s in &row.survives {
            csv.push_str(&format!(",{s}"));
        }
        csv.push('\n');
    }

    println!("title: {}", scenario.title());
    println!(
        "sweep of {} over [{}, {}] in {} point(s), horizon t = {}",
        format_param(path),
        fmt6(from),
        fmt6(to),
        points,
        fmt6(scenario.protocol().step() * scenario.protocol().steps() as f64)
    );
    let focal = match path {
        ParamPath::Capacity(i) => i,
        ParamPath::Alpha { row, .. } => row,
    };
    match rows.iter().find(|row| row.survives[focal]) {
        Some(row) => println!(
            "smallest swept value where {} survives (N >= {SURVIVAL_THRESHOLD} at horizon): {}",
            names[focal],
            fmt6(row.value)
        ),
        None => println!(
            "{} does not survive (N >= {SURVIVAL_THRESHOLD} at horizon) at any swept value",
            names[focal]
        ),
    }
    if let ParamPath::Capacity(i) = path {
        let resident_support: Vec<usize> = (0..model.len()).filter(|&j| j != i).collect();
        let resident = enumerate_equilibria(model)?
            .into_iter()
            .filter_map(|entry| match entry {
                SupportEquilibrium::Equilibrium(r) => Some(r),
                SupportEquilibrium::Singular { .. } => None,
            })
            .find(|r| r.support == resident_support && r.feasible);
        if let Some(resident) = resident {
            let threshold = invasion_threshold_capacity(model, &resident, i)?;
            println!(
                "zero-invasion capacity threshold for {} against the resident community: {}",
                names[i],
                fmt6(threshold)
            );
        }
    }

    write_atomic(&out, &csv)?;
    println!("wrote {}", out.display());
    Ok(())
}

pub fn run_estimate(income_fraction: Option<f64>, pop_ratio: Option<Vec<f64>>) -> Result<()> {
    let pair = match (income_fraction, pop_ratio) {
        (Some(p), None) => lvniche_core::estimation::alpha_from_income_fraction(p)?,
        (None, Some(counts)) => {
            if counts.len() != 2 {
                bail!("--pop-ratio takes exactly two counts: SMALL LARGE");
            }
            lvniche_core::estimation::alpha_from_population_ratio(counts[0], counts[1])?
        }
        _ => bail!("provide exactly one of --income-fraction P or --pop-ratio SMALL LARGE"),
    };
    println!("forward  = {}", pair.forward);
    println!("backward = {}", pair.backward);
    Ok(())
}
