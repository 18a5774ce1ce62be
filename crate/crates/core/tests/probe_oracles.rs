mod oracle;

use proptest::prelude::*;
use rand::Rng;
use sim2real_gauge_core::probe::standardize_columns;
use sim2real_gauge_core::synth::{generate, SynthSpec};
use sim2real_gauge_core::{
    action_score, evaluate_as, probe_gradient, split_dataset, standardize_actions, train_probe, EncoderDataset,
    LinearProbe, Matrix, ProbeConfig,
};

fn linear_task(seed: u64) -> EncoderDataset {
    let spec = SynthSpec {
        n_per_domain: 1000,
        dim: 16,
        action_dim: 4,
        domain_shift: 0.5,
        signal_fraction: 1.0,
        noise_sigma: 0.0,
        seed,
    };
    generate(&spec, "linear").unwrap()
}

/// AS of the exact least-squares probe on the same split and scaling the
/// engine uses.
fn closed_form_as(ds: &EncoderDataset, cfg: &ProbeConfig) -> f64 {
    let split = split_dataset(ds.len(), cfg, ds.domains()).unwrap();
    let z = oracle::zscore_on(ds.embeddings(), &split.train_indices);
    let a = oracle::zscore_on(ds.actions(), &split.train_indices);
    let probe = oracle::least_squares_probe(&z, &a, &split.train_indices);
    (1.0 - oracle::mse(&probe, &z, &a, &split.val_indices)).max(0.0)
}

#[test]
fn noiseless_linear_task_is_recovered() {
    let ds = linear_task(77);
    let cfg = ProbeConfig::default();
    let result = evaluate_as(&ds, &cfg).unwrap();
    let reference = closed_form_as(&ds, &cfg);
    assert!(result.action_score >= 0.99, "{}", result.action_score);
    assert!((result.action_score - reference).abs() <= 0.02, "{} vs {reference}", result.action_score);
    assert_eq!(result.train_mse_curve.len(), cfg.epochs);
}

#[test]
fn sgd_tracks_least_squares_on_noisy_data() {
    for (seed, fraction, sigma) in [(1, 0.5, 0.5), (2, 0.25, 1.0), (3, 1.0, 0.3)] {
        let spec = SynthSpec {
            n_per_domain: 1000,
            dim: 16,
            action_dim: 3,
            domain_shift: 1.0,
            signal_fraction: fraction,
            noise_sigma: sigma,
            seed,
        };
        let ds = generate(&spec, "noisy").unwrap();
        let cfg = ProbeConfig::default();
        let got = evaluate_as(&ds, &cfg).unwrap().action_score;
        let reference = closed_form_as(&ds, &cfg);
        assert!((got - reference).abs() <= 0.02, "seed {seed}: {got} vs {reference}");
    }
}

#[test]
fn scaling_matches_library_standardization() {
    let ds = linear_task(5);
    let split = split_dataset(ds.len(), &ProbeConfig::default(), ds.domains()).unwrap();
    let (z, _) = standardize_columns(ds.embeddings(), &split.train_indices).unwrap();
    let (a, _) = standardize_actions(ds.actions(), &split.train_indices).unwrap();
    assert!(z.max_abs_diff(&oracle::zscore_on(ds.embeddings(), &split.train_indices)).unwrap() < 1e-9);
    assert!(a.max_abs_diff(&oracle::zscore_on(ds.actions(), &split.train_indices)).unwrap() < 1e-9);
}

#[test]
fn signal_beats_noise_and_noise_scores_near_zero() {
    let base = SynthSpec {
        n_per_domain: 1000,
        dim: 16,
        action_dim: 4,
        domain_shift: 0.0,
        signal_fraction: 0.5,
        noise_sigma: 0.0,
        seed: 31,
    };
    let ds = generate(&base, "mixed").unwrap();
    let cfg = ProbeConfig::default();
    let full = evaluate_as(&ds, &cfg).unwrap().action_score;

    let noise_cols: Vec<usize> = (8..16).collect();
    let noise_only = Matrix::new(
        ds.len(),
        8,
        (0..ds.len()).flat_map(|r| noise_cols.iter().map(move |&c| (r, c))).map(|(r, c)| ds.embeddings().get(r, c)).collect(),
    )
    .unwrap();
    let blind = EncoderDataset::new("blind", noise_only, ds.domains().clone(), ds.actions().clone()).unwrap();
    let noise = evaluate_as(&blind, &cfg).unwrap().action_score;
    assert!(full >= noise - 0.01, "{full} vs {noise}");
    assert!(noise <= 0.1, "{noise}");
}

#[test]
fn training_is_bit_reproducible() {
    let ds = linear_task(8);
    let cfg = ProbeConfig::default().for_encoder("repeat");
    let split = split_dataset(ds.len(), &cfg, ds.domains()).unwrap();
    let (z, _) = standardize_columns(ds.embeddings(), &split.train_indices).unwrap();
    let (a, _) = standardize_actions(ds.actions(), &split.train_indices).unwrap();
    let first = train_probe(&z, &a, &split, &cfg).unwrap();
    let second = train_probe(&z, &a, &split, &cfg).unwrap();
    assert_eq!(first, second);
    let s1 = action_score(&first.probe, &z, &a, &split.val_indices).unwrap();
    let s2 = action_score(&second.probe, &z, &a, &split.val_indices).unwrap();
    assert_eq!(s1.action_score.to_bits(), s2.action_score.to_bits());
}

fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-8)
}

proptest! {
    #[test]
    fn gradient_matches_finite_differences(seed in any::<u64>(), dz in 1usize..=8, da in 1usize..=3, b in 1usize..=16) {
        let mut rng = oracle::seeded(seed);
        let z = oracle::random_matrix(&mut rng, b, dz);
        let a = oracle::random_matrix(&mut rng, b, da);
        let w = oracle::random_matrix(&mut rng, da, dz);
        let bias: Vec<f64> = (0..da).map(|_| rng.random_range(-1.0..1.0)).collect();
        let p = LinearProbe::new(w, bias).unwrap();
        let (gw, gb) = probe_gradient(&p, &z, &a).unwrap();
        let (fw, fb) = oracle::finite_difference_gradient(&p, &z, &a, 1e-6);
        for (x, y) in gw.as_slice().iter().zip(fw.as_slice()) {
            prop_assert!(relative_error(*x, *y) < 1e-5, "{} vs {}", x, y);
        }
        for (x, y) in gb.iter().zip(&fb) {
            prop_assert!(relative_error(*x, *y) < 1e-5, "{} vs {}", x, y);
        }
    }

    #[test]
    fn action_score_stays_in_unit_interval(seed in any::<u64>()) {
        let mut rng = oracle::seeded(seed);
        let z = oracle::random_matrix(&mut rng, 30, 3);
        let a = oracle::random_matrix(&mut rng, 30, 2);
        let w = oracle::random_matrix(&mut rng, 2, 3);
        let p = LinearProbe::new(w, vec![rng.random_range(-5.0..5.0), 0.0]).unwrap();
        let val: Vec<usize> = (0..30).collect();
        let r = action_score(&p, &z, &a, &val).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.action_score));
        prop_assert!((r.action_score - (1.0 - r.val_mse).max(0.0)).abs() < 1e-12);
    }
}
