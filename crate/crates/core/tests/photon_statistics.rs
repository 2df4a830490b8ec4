mod common;

use qst_sim::channel::{crosstalk_rate_per_s, raman_rate_per_s};
use qst_sim::{
    born_probabilities, poisson_sample, pure_state_density, sic_povm, simulate_counts_full,
    simulate_counts_shot, transmittance, ChannelParams, PureStateAngles, RngStream, SourceParams,
};

const RUNS: usize = 10_000;

fn operator_streams(seed: u64, run: usize) -> [RngStream; 4] {
    [0u64, 1, 2, 3].map(|j| RngStream::new(seed, (run as u64) << 2 | j))
}

#[test]
fn full_noise_without_classical_light_matches_shot_noise() {
    let povm = sic_povm();
    let rho = pure_state_density(PureStateAngles::new(1.2, 0.7).unwrap());
    let source = SourceParams::new(300.0).unwrap();
    let channel = ChannelParams::default().with_length(20.0);
    let eta = transmittance(&channel);

    let mut full = vec![Vec::new(); 4];
    let mut shot = vec![Vec::new(); 4];
    for run in 0..RUNS {
        let f = simulate_counts_full(
            &rho,
            &source,
            &channel,
            &povm,
            &mut operator_streams(1, run),
        )
        .unwrap();
        let s =
            simulate_counts_shot(&rho, &source, eta, &povm, &mut operator_streams(2, run)).unwrap();
        for j in 0..4 {
            full[j].push(f.0[j]);
            shot[j].push(s.0[j]);
        }
    }
    for j in 0..4 {
        let p = common::two_sample_chi_square(&full[j], &shot[j]);
        assert!(p > 0.01, "operator {j}: p = {p}");
    }
}

#[test]
fn measured_counts_have_the_analytic_mean() {
    let povm = sic_povm();
    let rho = pure_state_density(PureStateAngles::new(2.0, 4.0).unwrap());
    let source = SourceParams::new(1000.0).unwrap();
    let channel = ChannelParams {
        p_in_watts: 1e-3,
        xi_per_km: 5e-11,
        length_km: 30.0,
        ..ChannelParams::default()
    };
    let eta = transmittance(&channel);
    let noise = channel.tau_s * (raman_rate_per_s(&channel) + crosstalk_rate_per_s(&channel));
    let probs = born_probabilities(&rho, &povm);

    let mut samples = vec![Vec::new(); 4];
    for run in 0..RUNS {
        let c = simulate_counts_full(
            &rho,
            &source,
            &channel,
            &povm,
            &mut operator_streams(3, run),
        )
        .unwrap();
        for j in 0..4 {
            samples[j].push(c.0[j] as f64);
        }
    }
    for j in 0..4 {
        let n = RUNS as f64;
        let mean = samples[j].iter().sum::<f64>() / n;
        let var = samples[j].iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let analytic = source.mean_photons() * eta * probs[j] + 0.5 * noise;
        let se = (var / n).sqrt();
        assert!(
            (mean - analytic).abs() < 4.0 * se,
            "operator {j}: {mean} vs {analytic} (se {se})"
        );
    }
}

#[test]
fn sum_of_raman_and_crosstalk_draws_is_poisson() {
    let channel = ChannelParams {
        p_in_watts: 1e-3,
        xi_per_km: 5e-11,
        length_km: 50.0,
        ..ChannelParams::default()
    };
    let raman = channel.tau_s * raman_rate_per_s(&channel);
    let crosstalk = channel.tau_s * crosstalk_rate_per_s(&channel);
    let mut rng = RngStream::new(17, 0);
    let sums: Vec<u64> = (0..RUNS)
        .map(|_| {
            poisson_sample(raman, &mut rng).unwrap() + poisson_sample(crosstalk, &mut rng).unwrap()
        })
        .collect();
    let p = common::poisson_goodness_of_fit(&sums, raman + crosstalk);
    assert!(p > 0.01, "p = {p}");
}

#[test]
fn sampler_fits_poisson_law_in_both_regimes() {
    for (i, mean) in [0.7, 4.0, 9.5, 10.0, 26.3, 250.0].into_iter().enumerate() {
        let mut rng = RngStream::new(23, i as u64);
        let draws: Vec<u64> = (0..RUNS)
            .map(|_| poisson_sample(mean, &mut rng).unwrap())
            .collect();
        let p = common::poisson_goodness_of_fit(&draws, mean);
        assert!(p > 0.01, "mean {mean}: p = {p}");
    }
}

#[test]
fn simulation_is_bit_reproducible() {
    let povm = sic_povm();
    let rho = pure_state_density(PureStateAngles::new(0.4, 5.5).unwrap());
    let source = SourceParams::new(500.0).unwrap();
    let channel = ChannelParams {
        p_in_watts: 1e-2,
        length_km: 35.0,
        ..ChannelParams::default()
    };
    let a: Vec<_> = (0..200)
        .map(|run| {
            simulate_counts_full(
                &rho,
                &source,
                &channel,
                &povm,
                &mut operator_streams(9, run),
            )
            .unwrap()
        })
        .collect();
    let b: Vec<_> = (0..200)
        .map(|run| {
            simulate_counts_full(
                &rho,
                &source,
                &channel,
                &povm,
                &mut operator_streams(9, run),
            )
            .unwrap()
        })
        .collect();
    assert_eq!(a, b);
}
