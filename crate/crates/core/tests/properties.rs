//! Structural invariants of the model, dynamics, and analysis modules,
//! checked over randomized inputs.

use lvniche_core::analysis::{
    classify_two_species, enumerate_equilibria, interior_equilibrium, percent_change_for_target,
    perturbed_equilibrium, TwoSpeciesRegime,
};
use lvniche_core::dynamics::{simulate, step_euler, step_rk4, Method, SimulationProtocol};
use lvniche_core::estimation::{alpha_from_income_fraction, alpha_from_population_ratio};
use lvniche_core::model::{CompetitionModel, ParamPath, PopulationState};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn model_from(
    n: usize,
    rates: Vec<f64>,
    capacities: Vec<f64>,
    offdiag: &[f64],
) -> CompetitionModel {
    let names = (0..n).map(|i| format!("s{i}")).collect();
    let mut it = offdiag.iter();
    let alpha = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { 1.0 } else { *it.next().unwrap() })
                .collect()
        })
        .collect();
    CompetitionModel::new(names, rates, capacities, alpha).unwrap()
}

/// Model with a guaranteed feasible interior equilibrium: pick the
/// equilibrium first, then back out the capacities.
fn random_feasible_model(rng: &mut ChaCha8Rng, n: usize) -> (CompetitionModel, Vec<f64>) {
    let rates: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..3.0)).collect();
    let offdiag: Vec<f64> = (0..n * (n - 1))
        .map(|_| rng.gen_range(0.05..0.8))
        .collect();
    let nstar: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..50.0)).collect();
    let names = (0..n).map(|i| format!("s{i}")).collect::<Vec<_>>();
    let mut it = offdiag.iter();
    let alpha: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { 1.0 } else { *it.next().unwrap() })
                .collect()
        })
        .collect();
    let capacities: Vec<f64> = alpha
        .iter()
        .map(|row| row.iter().zip(&nstar).map(|(a, x)| a * x).sum())
        .collect();
    (
        CompetitionModel::new(names, rates, capacities, alpha).unwrap(),
        nstar,
    )
}

fn state(populations: Vec<f64>) -> PopulationState {
    PopulationState::new(populations, 0.0).unwrap()
}

prop_compose! {
    fn arb_model_and_state()(
        n in 1usize..=4,
        seed in any::<u64>(),
    ) -> (CompetitionModel, PopulationState) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rates: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..3.0)).collect();
        let capacities: Vec<f64> = (0..n).map(|_| rng.gen_range(2.0..80.0)).collect();
        let offdiag: Vec<f64> = (0..n*(n-1)).map(|_| rng.gen_range(0.0..0.9)).collect();
        let model = model_from(n, rates, capacities.clone(), &offdiag);
        let populations = (0..n).map(|i| rng.gen_range(0.0..2.5 * capacities[i])).collect();
        (model, state(populations))
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobian_matches_central_finite_differences((model, st) in arb_model_and_state()) {
        let jac = model.jacobian(&st).unwrap();
        let n = model.len();
        for j in 0..n {
            let h = 1e-5 * st.populations()[j].abs().max(1.0);
            if st.populations()[j] < h {
                // the centered stencil would cross into negative populations
                continue;
            }
            let mut up = st.populations().to_vec();
            let mut down = up.clone();
            up[j] += h;
            down[j] -= h;
            let f_up = model.growth_rates(&state(up)).unwrap();
            let f_down = model.growth_rates(&state(down)).unwrap();
            for i in 0..n {
                let fd = (f_up[i] - f_down[i]) / (2.0 * h);
                let tol = 1e-6 * jac[i][j].abs().max(1.0);
                prop_assert!(
                    (fd - jac[i][j]).abs() <= tol,
                    "entry ({i},{j}): analytic {} vs fd {fd}", jac[i][j]
                );
            }
        }
    }

    #[test]
    fn growth_rate_zeros_are_invariant_under_rate_rescaling(
        (model, st) in arb_model_and_state(),
        scale in 0.1f64..10.0,
    ) {
        let scaled = CompetitionModel::new(
            model.species_names().to_vec(),
            model.intrinsic_rates().iter().map(|r| r * scale).collect(),
            model.capacities().to_vec(),
            model.alpha().to_vec(),
        ).unwrap();
        let f = model.growth_rates(&st).unwrap();
        let g = scaled.growth_rates(&st).unwrap();
        for (fi, gi) in f.iter().zip(&g) {
            prop_assert_eq!(*fi == 0.0, *gi == 0.0);
            prop_assert!(fi.signum() == gi.signum() || *fi == 0.0);
        }
    }

    #[test]
    fn growth_rates_and_jacobian_are_permutation_equivariant(
        (model, st) in arb_model_and_state(),
        seed in any::<u64>(),
    ) {
        let n = model.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..n).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        // permuted[k] describes original species perm[k]
        let permuted = CompetitionModel::new(
            perm.iter().map(|&p| model.species_names()[p].clone()).collect(),
            perm.iter().map(|&p| model.intrinsic_rates()[p]).collect(),
            perm.iter().map(|&p| model.capacities()[p]).collect(),
            perm.iter()
                .map(|&p| perm.iter().map(|&q| model.alpha()[p][q]).collect())
                .collect(),
        ).unwrap();
        let perm_state = state(perm.iter().map(|&p| st.populations()[p]).collect());

        let f = model.growth_rates(&st).unwrap();
        let fp = permuted.growth_rates(&perm_state).unwrap();
        for (k, &p) in perm.iter().enumerate() {
            prop_assert!((fp[k] - f[p]).abs() <= 1e-12 * f[p].abs().max(1.0));
        }

        let jac = model.jacobian(&st).unwrap();
        let jac_p = permuted.jacobian(&perm_state).unwrap();
        for (k, &p) in perm.iter().enumerate() {
            for (l, &q) in perm.iter().enumerate() {
                prop_assert!((jac_p[k][l] - jac[p][q]).abs() <= 1e-12 * jac[p][q].abs().max(1.0));
            }
        }
    }

    #[test]
    fn enumerated_equilibria_zero_the_vector_field(seed in any::<u64>(), n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (model, _) = random_feasible_model(&mut rng, n);
        for entry in enumerate_equilibria(&model).unwrap() {
            if let Some(report) = entry.report() {
                // the raw fixed point may sit outside the positive orthant;
                // evaluate through a clamped copy only when it is feasible
                if report.feasible {
                    let f = model.growth_rates(&state(report.populations.clone())).unwrap();
                    for (i, fi) in f.iter().enumerate() {
                        let scale = model.intrinsic_rates()[i] * model.capacities()[i];
                        prop_assert!(fi.abs() / scale <= 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn equilibria_are_unchanged_when_all_rates_scale_by_seven(
        seed in any::<u64>(),
        n in 1usize..=3,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (model, _) = random_feasible_model(&mut rng, n);
        let scaled = CompetitionModel::new(
            model.species_names().to_vec(),
            model.intrinsic_rates().iter().map(|r| 7.0 * r).collect(),
            model.capacities().to_vec(),
            model.alpha().to_vec(),
        ).unwrap();
        let base = enumerate_equilibria(&model).unwrap();
        let fast = enumerate_equilibria(&scaled).unwrap();
        prop_assert_eq!(base.len(), fast.len());
        for (b, f) in base.iter().zip(&fast) {
            prop_assert_eq!(b.support(), f.support());
            match (b.report(), f.report()) {
                (Some(rb), Some(rf)) => {
                    for (x, y) in rb.populations.iter().zip(&rf.populations) {
                        prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
                    }
                    prop_assert_eq!(rb.stable, rf.stable);
                    prop_assert_eq!(rb.feasible, rf.feasible);
                    prop_assert_eq!(rb.marginal, rf.marginal);
                }
                (None, None) => {}
                _ => prop_assert!(false, "singularity flags diverged"),
            }
        }
    }

    #[test]
    fn income_fraction_pair_sums_to_one_and_is_monotone(
        p in 0.0f64..=1.0,
        q in 0.0f64..=1.0,
    ) {
        let a = alpha_from_income_fraction(p).unwrap();
        prop_assert_eq!(a.forward + a.backward, 1.0 + p);
        if p < q {
            let b = alpha_from_income_fraction(q).unwrap();
            prop_assert!(a.forward < b.forward);
        }
    }

    #[test]
    fn population_ratio_pair_sums_to_one_exactly(
        small in 1.0f64..1e6,
        extra in 0.0f64..1e6,
    ) {
        let pair = alpha_from_population_ratio(small, small + extra).unwrap();
        prop_assert_eq!(pair.forward + pair.backward, 1.0);
        prop_assert!(pair.forward >= 0.0 && pair.forward <= 1.0);
    }

    #[test]
    fn simulations_stay_nonnegative_and_deterministic(
        (model, st) in arb_model_and_state(),
        steps in 1usize..400,
        method_rk in any::<bool>(),
    ) {
        let method = if method_rk { Method::Rk4 } else { Method::Euler };
        let protocol = SimulationProtocol::new(method, 0.21, steps, 1).unwrap();
        // a step this coarse may legitimately blow up under rk4; divergence
        // must be reported, never silently recorded
        match (simulate(&model, &st, &protocol), simulate(&model, &st, &protocol)) {
            (Ok(a), Ok(b)) => {
                for (sa, sb) in a.samples().iter().zip(b.samples()) {
                    for (x, y) in sa.populations().iter().zip(sb.populations()) {
                        prop_assert!(*x >= 0.0);
                        prop_assert_eq!(x.to_bits(), y.to_bits());
                    }
                }
            }
            (
                Err(lvniche_core::Error::IntegrationDiverged { step: sa }),
                Err(lvniche_core::Error::IntegrationDiverged { step: sb }),
            ) => prop_assert_eq!(sa, sb),
            (a, b) => prop_assert!(false, "runs disagreed: {a:?} vs {b:?}"),
        }
    }
}

#[test]
fn decoupled_components_match_single_species_runs() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..20 {
        let n = 3;
        let rates: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..2.0)).collect();
        let capacities: Vec<f64> = (0..n).map(|_| rng.gen_range(5.0..50.0)).collect();
        let initials: Vec<f64> = (0..n).map(|i| rng.gen_range(0.1..2.0 * capacities[i])).collect();
        let model = model_from(n, rates.clone(), capacities.clone(), &[0.0; 6]);
        let protocol = SimulationProtocol::new(Method::Euler, 0.05, 200, 10).unwrap();
        let joint = simulate(&model, &state(initials.clone()), &protocol).unwrap();
        for i in 0..n {
            let solo = CompetitionModel::new(
                vec!["solo".into()],
                vec![rates[i]],
                vec![capacities[i]],
                vec![vec![1.0]],
            )
            .unwrap();
            let single = simulate(&solo, &state(vec![initials[i]]), &protocol).unwrap();
            for (js, ss) in joint.samples().iter().zip(single.samples()) {
                let a = js.populations()[i];
                let b = ss.populations()[0];
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
            }
        }
    }
}

#[test]
fn doubling_rates_and_halving_step_reproduces_the_run() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..10 {
        let (model, _) = random_feasible_model(&mut rng, 3);
        let doubled = CompetitionModel::new(
            model.species_names().to_vec(),
            model.intrinsic_rates().iter().map(|r| 2.0 * r).collect(),
            model.capacities().to_vec(),
            model.alpha().to_vec(),
        )
        .unwrap();
        let initial = state(vec![1.5, 2.5, 3.5]);
        let base = simulate(
            &model,
            &initial,
            &SimulationProtocol::new(Method::Euler, 0.02, 500, 10).unwrap(),
        )
        .unwrap();
        let rescaled = simulate(
            &doubled,
            &initial,
            &SimulationProtocol::new(Method::Euler, 0.01, 500, 10).unwrap(),
        )
        .unwrap();
        assert_eq!(base.samples().len(), rescaled.samples().len());
        for (b, r) in base.samples().iter().zip(rescaled.samples()) {
            // sample k of the rescaled run sits at half the model time but the
            // same point of the rescaled flow
            assert!((r.time() - 0.5 * b.time()).abs() <= 1e-12);
            for (x, y) in b.populations().iter().zip(r.populations()) {
                assert!((x - y).abs() <= 1e-6 * x.abs().max(1.0));
            }
        }
    }
}

#[test]
fn euler_and_rk4_converge_at_their_orders_on_the_logistic() {
    let logistic = CompetitionModel::new(
        vec!["solo".into()],
        vec![1.0],
        vec![10.0],
        vec![vec![1.0]],
    )
    .unwrap();
    let closed_form = |t: f64| 10.0 / (1.0 + (10.0 / 5.0 - 1.0) * (-t).exp());
    let error_at_t5 = |method: Method, h: f64| -> f64 {
        let steps = (5.0 / h).round() as usize;
        let protocol = SimulationProtocol::new(method, h, steps, steps).unwrap();
        let traj = simulate(&logistic, &state(vec![5.0]), &protocol).unwrap();
        (traj.final_state().populations()[0] - closed_form(5.0)).abs()
    };

    let euler_ratio = error_at_t5(Method::Euler, 0.1) / error_at_t5(Method::Euler, 0.05);
    assert!(
        (1.7..=2.3).contains(&euler_ratio),
        "euler halving ratio {euler_ratio} outside [1.7, 2.3]"
    );
    let rk4_ratio = error_at_t5(Method::Rk4, 0.1) / error_at_t5(Method::Rk4, 0.05);
    assert!(
        (12.0..=20.0).contains(&rk4_ratio),
        "rk4 halving ratio {rk4_ratio} outside [12, 20]"
    );
}

#[test]
fn single_steps_agree_with_simulate() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (model, _) = random_feasible_model(&mut rng, 3);
    let initial = state(vec![3.0, 4.0, 5.0]);
    for method in [Method::Euler, Method::Rk4] {
        let protocol = SimulationProtocol::new(method, 0.05, 10, 1).unwrap();
        let traj = simulate(&model, &initial, &protocol).unwrap();
        let mut s = initial.clone();
        for sample in traj.samples().iter().skip(1) {
            s = match method {
                Method::Euler => step_euler(&model, &s, 0.05).unwrap(),
                Method::Rk4 => step_rk4(&model, &s, 0.05).unwrap(),
            };
            for (a, b) in s.populations().iter().zip(sample.populations()) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}

#[test]
fn stable_coexistence_attracts_and_exclusion_reaches_the_boundary() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut coexistence_checked = 0;
    let mut exclusion_checked = 0;
    while coexistence_checked < 6 || exclusion_checked < 6 {
        let k1: f64 = rng.gen_range(5.0..50.0);
        let k2: f64 = rng.gen_range(5.0..50.0);
        let a12: f64 = rng.gen_range(0.1..1.5);
        let a21: f64 = rng.gen_range(0.1..1.5);
        // wide margins keep the convergence horizon moderate
        if (k1 - a12 * k2).abs() < 0.3 * k1.max(a12 * k2)
            || (k2 - a21 * k1).abs() < 0.3 * k2.max(a21 * k1)
            || (a12 * a21 - 1.0).abs() < 0.2
        {
            continue;
        }
        let model = model_from(2, vec![1.0, 1.0], vec![k1, k2], &[a12, a21]);
        let regime = classify_two_species(&model).unwrap();
        let protocol = SimulationProtocol::new(Method::Euler, 0.05, 20000, 2000).unwrap();
        match regime {
            TwoSpeciesRegime::StableCoexistence if coexistence_checked < 6 => {
                let target = interior_equilibrium(&model).into_feasible().unwrap();
                for _ in 0..20 {
                    let start = state(vec![
                        rng.gen_range(0.05 * k1..1.5 * k1),
                        rng.gen_range(0.05 * k2..1.5 * k2),
                    ]);
                    let traj = simulate(&model, &start, &protocol).unwrap();
                    let fin = traj.final_state().populations();
                    for (f, t) in fin.iter().zip(target.populations()) {
                        assert!(
                            (f - t).abs() < 1e-3,
                            "k=({k1},{k2}) a=({a12},{a21}): {f} vs {t}"
                        );
                    }
                }
                coexistence_checked += 1;
            }
            TwoSpeciesRegime::Species1Excludes | TwoSpeciesRegime::Species2Excludes
                if exclusion_checked < 6 =>
            {
                let (winner, loser) = match regime {
                    TwoSpeciesRegime::Species1Excludes => (0usize, 1usize),
                    _ => (1, 0),
                };
                for _ in 0..20 {
                    let start = state(vec![
                        rng.gen_range(0.05 * k1..1.5 * k1),
                        rng.gen_range(0.05 * k2..1.5 * k2),
                    ]);
                    let traj = simulate(&model, &start, &protocol).unwrap();
                    let fin = traj.final_state().populations();
                    assert!((fin[winner] - model.capacities()[winner]).abs() < 1e-3);
                    assert!(fin[loser] < 1e-3);
                }
                exclusion_checked += 1;
            }
            _ => {}
        }
    }
}

#[test]
fn founder_control_depends_on_the_starting_point() {
    let model = model_from(2, vec![1.0, 1.0], vec![10.0, 10.0], &[2.0, 2.0]);
    assert_eq!(
        classify_two_species(&model).unwrap(),
        TwoSpeciesRegime::UnstableCoexistence
    );
    let protocol = SimulationProtocol::new(Method::Euler, 0.01, 40000, 4000).unwrap();
    let first = simulate(&model, &state(vec![6.0, 4.0]), &protocol).unwrap();
    let second = simulate(&model, &state(vec![4.0, 6.0]), &protocol).unwrap();
    let f1 = first.final_state().populations();
    let f2 = second.final_state().populations();
    assert!((f1[0] - 10.0).abs() < 1e-3 && f1[1] < 1e-3);
    assert!((f2[1] - 10.0).abs() < 1e-3 && f2[0] < 1e-3);
}

#[test]
fn target_percent_round_trips_through_the_perturbed_equilibrium() {
    let mut rng = ChaCha8Rng::seed_from_u64(5150);
    let mut checked = 0;
    while checked < 40 {
        let n = rng.gen_range(2..=4);
        let (model, _) = random_feasible_model(&mut rng, n);
        let species = rng.gen_range(0..n);
        let path = if rng.gen_bool(0.5) {
            ParamPath::Capacity(rng.gen_range(0..n))
        } else {
            let row = rng.gen_range(0..n);
            let mut col = rng.gen_range(0..n);
            if col == row {
                col = (col + 1) % n;
            }
            ParamPath::Alpha { row, col }
        };
        let delta = rng.gen_range(0.01..2.0);
        let Ok(change) = percent_change_for_target(&model, path, species, delta) else {
            continue;
        };
        let base = interior_equilibrium(&model).into_feasible().unwrap();
        let eq = perturbed_equilibrium(&model, path, change.percent / 100.0).unwrap();
        let target = base.populations()[species] + delta;
        let achieved = eq.populations()[species];
        assert!(
            (achieved - target).abs() <= 1e-6,
            "path {path:?} delta {delta}: achieved {achieved}, target {target}"
        );
        checked += 1;
    }
}
