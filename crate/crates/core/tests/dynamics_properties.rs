mod common;

use netinfer::analysis::gram_convexity;
use netinfer::autodiff::{Tape, Tensor};
use netinfer::dynamics::{
    equilibrate, first_order_plain, generate_kuramoto_dataset, harris_wilson_step, harris_wilson_step_plain,
    second_order_plain, simulate_power_cut, HarrisWilsonParams, KuramotoParams, KuramotoTape, NoiseScheme, Order,
    PowerCutSpec,
};
use netinfer::graphs::{assign_powers, random_graph, synthetic_power_grid, AdjacencyMatrix, GridSpec};
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;

fn hw_params(sigma: f64, dt: f64, scheme: NoiseScheme) -> HarrisWilsonParams {
    HarrisWilsonParams {
        sigma,
        dt,
        scheme,
        ..HarrisWilsonParams::london()
    }
}

#[test]
fn taped_coupling_equals_double_sum() {
    let mut r = common::rng(1);
    let params = KuramotoParams::first_order(1.0, 1.0, 0.1, vec![]);
    for _ in 0..20 {
        let a = common::random_tensor(&mut r, 5, 5, 0.0, 1.0);
        let phases = common::random_tensor(&mut r, 5, 1, -10.0, 10.0);
        let mut tape = Tape::new();
        let k = KuramotoTape::new(&mut tape, &params, Order::First, 5).unwrap();
        let (pv, av) = (tape.constant(phases.clone()), tape.constant(a.clone()));
        let c = k.coupling(&mut tape, pv, av).unwrap();
        let oracle = common::coupling_loop(a.data(), phases.data());
        for (x, y) in tape.value(c).unwrap().data().iter().zip(&oracle) {
            assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        }
    }
}

#[test]
fn noiseless_harris_wilson_follows_the_ode() {
    let mut r = common::rng(2);
    let (n, m) = (4, 3);
    let c: Vec<f64> = (0..n * m).map(|_| r.random_range(0.1..1.0)).collect();
    let o: Vec<f64> = (0..n).map(|_| r.random_range(0.5..1.5)).collect();
    let p = hw_params(0.0, 0.01, NoiseScheme::Stratonovich);
    let mut w: Vec<f64> = (0..m).map(|_| r.random_range(0.1..1.0)).collect();
    for step in 0..200 {
        let oracle = common::hw_ode_step(&w, &o, &c, p.alpha, p.beta, p.kappa, p.epsilon, p.dt);
        let plain = harris_wilson_step_plain(&w, &o, &c, &p, None);
        let zero_noise = harris_wilson_step_plain(&w, &o, &c, &p, Some(&vec![0.7; m]));
        let mut tape = Tape::new();
        let wv = tape.constant(Tensor::column(w.clone()).unwrap());
        let ov = tape.constant(Tensor::column(o.clone()).unwrap());
        let cv = tape.constant(Tensor::matrix(n, m, c.clone()).unwrap());
        let taped = harris_wilson_step(&mut tape, wv, ov, cv, &p, None).unwrap();
        let taped = tape.value(taped).unwrap().data().to_vec();
        for j in 0..m {
            for got in [plain[j], zero_noise[j], taped[j]] {
                assert!((got - oracle[j]).abs() < 1e-12, "step {step}, destination {j}: {got} vs {}", oracle[j]);
            }
        }
        w = oracle;
    }
}

/// Mean one-step increment over `paths` scalar paths started at the
/// fixed point `W = O/κ` of the drift.
fn monte_carlo_increment(p: &HarrisWilsonParams, paths: usize, seed: u64) -> (f64, f64) {
    let mut r = common::rng(seed);
    let (w, o, c) = ([1.0], [p.kappa], [1.0]);
    let increments: Vec<f64> = (0..paths)
        .map(|_| {
            let xi: f64 = r.sample(StandardNormal);
            harris_wilson_step_plain(&w, &o, &c, p, Some(&[xi]))[0] - w[0]
        })
        .collect();
    common::mean_and_se(&increments)
}

#[test]
fn monte_carlo_increment_matches_corrected_drift() {
    let sigma = 0.05;
    let strat = hw_params(sigma, 1.0, NoiseScheme::Stratonovich);
    let (mean, se) = monte_carlo_increment(&strat, 100_000, 7);
    // zero drift at the fixed point leaves only the correction σ²W/2
    let expected = 0.5 * sigma * sigma;
    assert!((mean - expected).abs() < 3.0 * se, "mean {mean:.3e} vs {expected:.3e} (se {se:.1e})");
    // the correction is several standard errors, so the check can tell
    // the schemes apart
    let (ito_mean, ito_se) = monte_carlo_increment(&hw_params(sigma, 1.0, NoiseScheme::Ito), 100_000, 7);
    assert!(ito_mean.abs() < 3.0 * ito_se);
    assert!((mean - ito_mean).abs() > 5.0 * se);
}

#[test]
fn full_rank_data_determines_every_row() {
    let a = random_graph(10, 0.5, (0.0, 1.0), 4).unwrap();
    let p = KuramotoParams::first_order(1.0, 1.0, 0.1, vec![]);
    let ts = generate_kuramoto_dataset(&a, &p, Order::First, 20, 2, 9).unwrap();
    let g = gram_convexity(&ts, &p, Order::First).unwrap();
    assert_eq!(g.convexity, 9);
    assert!(g.fully_determined());
}

fn grid_params(seed: u64) -> (AdjacencyMatrix, KuramotoParams) {
    let a0 = synthetic_power_grid(&GridSpec::new(16, 8), seed).unwrap();
    let powers = assign_powers(16, &[], seed).unwrap().iter().map(|p| 0.1 * p).collect();
    let params = KuramotoParams {
        alpha: 1.0,
        beta: 0.2,
        kappa: 30.0,
        dt: 0.05,
        sigma: 0.0,
        omega: powers,
    };
    (a0, params)
}

fn spec(window_len: usize) -> PowerCutSpec {
    PowerCutSpec {
        window_len,
        record_delay: 1.0,
        max_equilibration_steps: 1_000_000,
        tolerance: 0.01,
    }
}

#[test]
fn heavy_inertia_grid_phase_locks() {
    for seed in 0..3 {
        let (a0, params) = grid_params(seed);
        let eq = equilibrate(&a0, &params, &spec(2)).unwrap();
        for (phi, v) in eq.phases.iter().zip(&eq.velocities) {
            assert!(v.abs() <= 0.01 * phi.abs().max(1.0));
        }
    }
}

#[test]
fn cutting_an_absent_line_changes_nothing() {
    let (a0, params) = grid_params(1);
    let (i, j) = (0..16)
        .flat_map(|i| (0..16).map(move |j| (i, j)))
        .find(|&(i, j)| i != j && a0.get(i, j) == 0.0)
        .unwrap();
    let cut = simulate_power_cut(&a0, &[(i, j)], &params, &spec(5), 3).unwrap();
    let intact = simulate_power_cut(&a0, &[], &params, &spec(5), 3).unwrap();
    assert_eq!(cut.series, intact.series);
    assert_eq!(cut.perturbed, a0);
}

proptest! {
    #[test]
    fn first_order_steps_are_rotation_equivariant(
        phases in proptest::collection::vec(-5.0f64..5.0, 5),
        shift in -10.0f64..10.0,
        seed in 0u64..100,
    ) {
        let a = random_graph(5, 0.6, (0.0, 1.0), seed).unwrap();
        let omega = vec![0.3, -0.1, 0.2, 0.0, -0.4];
        let p = KuramotoParams::first_order(1.0, 2.0, 0.1, omega.clone());
        let moved: Vec<f64> = phases.iter().map(|x| x + shift).collect();
        let base = first_order_plain(&phases, &a, &p, &omega, None);
        let rotated = first_order_plain(&moved, &a, &p, &omega, None);
        for i in 0..5 {
            prop_assert!(((rotated[i] - moved[i]) - (base[i] - phases[i])).abs() < 1e-12);
        }
    }

    #[test]
    fn second_order_steps_are_rotation_equivariant(
        phases in proptest::collection::vec(-5.0f64..5.0, 4),
        velocities in proptest::collection::vec(-1.0f64..1.0, 4),
        shift in -10.0f64..10.0,
    ) {
        let a = AdjacencyMatrix::complete(4);
        let omega = vec![0.5, -0.5, 0.25, -0.25];
        let p = KuramotoParams { alpha: 1.0, beta: 0.2, kappa: 3.0, dt: 0.05, sigma: 0.0, omega: omega.clone() };
        let moved: Vec<f64> = phases.iter().map(|x| x + shift).collect();
        let (b_phi, b_v) = second_order_plain(&phases, &velocities, &a, &p, &omega, None);
        let (r_phi, r_v) = second_order_plain(&moved, &velocities, &a, &p, &omega, None);
        for i in 0..4 {
            prop_assert!(((r_phi[i] - moved[i]) - (b_phi[i] - phases[i])).abs() < 1e-12);
            prop_assert!((r_v[i] - b_v[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn cuts_zero_exactly_their_entries(picks in proptest::collection::vec(0usize..23, 1..4)) {
        let (a0, params) = grid_params(0);
        let edges = a0.undirected_edges();
        let mut cuts: Vec<(usize, usize)> = picks.iter().map(|&k| (edges[k % edges.len()].0, edges[k % edges.len()].1)).collect();
        cuts.sort();
        cuts.dedup();
        let rec = simulate_power_cut(&a0, &cuts, &params, &spec(2), 0).unwrap();
        let changed = a0.weights().iter().zip(rec.perturbed.weights()).filter(|(x, y)| x != y).count();
        prop_assert_eq!(changed, 2 * cuts.len());
        for &(i, j) in &cuts {
            prop_assert_eq!(rec.perturbed.get(i, j), 0.0);
            prop_assert_eq!(rec.perturbed.get(j, i), 0.0);
        }
    }
}
