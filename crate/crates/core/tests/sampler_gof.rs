//! Goodness of fit of the output samplers against the model densities.

use oofsk::channel::{sample_output_given_input, ChannelParams, FadingState, SignalingConfig, ToneLikelihood};
use oofsk::validate::draw_link_sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF, Exp};

const N: usize = 100_000;

/// One-sample KS p-value (asymptotic Kolmogorov distribution).
fn ks_p_value(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max);
    let t = (n.sqrt() + 0.12 + 0.11 / n.sqrt()) * d;
    let p: f64 = (1..100).map(|k| 2.0 * (-1f64).powi(k - 1) * (-2.0 * (k * k) as f64 * t * t).exp()).sum();
    p.clamp(0.0, 1.0)
}

/// Chi-square p-value of samples of the on-tone energy against `e^{-r} f(r)`,
/// with bins of equal model probability built by numerical integration.
fn on_tone_chi_square(samples: &[f64], tone: &ToneLikelihood, bins: usize) -> f64 {
    let upper = 400.0;
    let steps = 400_000;
    let h = upper / steps as f64;
    let dens = |r: f64| (tone.log_f(r) - r).exp();
    let mut edges = Vec::new();
    let mut acc = 0.0;
    let mut next = 1.0 / bins as f64;
    for i in 0..steps {
        let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
        acc += h / 6.0 * (dens(a) + 4.0 * dens(0.5 * (a + b)) + dens(b));
        while acc >= next && edges.len() < bins - 1 {
            edges.push(b);
            next += 1.0 / bins as f64;
        }
    }
    let mut counts = vec![0usize; bins];
    for &r in samples {
        counts[edges.partition_point(|&e| e <= r)] += 1;
    }
    let expected = samples.len() as f64 / bins as f64;
    let stat: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    1.0 - ChiSquared::new((bins - 1) as f64).unwrap().cdf(stat)
}

#[test]
fn silent_tones_are_unit_exponential() {
    let ch = ChannelParams::from_rician_k(1.0).unwrap();
    let cfg = SignalingConfig::new(3, 0.5, 2.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut xs = Vec::with_capacity(N);
    for _ in 0..N {
        xs.push(sample_output_given_input(0, &FadingState::Unknown(ch), &cfg, &mut rng).unwrap().as_slice()[1]);
    }
    let exp = Exp::new(1.0).unwrap();
    let p = ks_p_value(xs, |x| exp.cdf(x));
    assert!(p > 1e-3, "p = {p}");
}

#[test]
fn on_tone_energy_matches_density() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for (k, snr) in [(0.0, 1.0), (1.0, 2.0), (4.0, 0.5)] {
        let ch = ChannelParams::from_rician_k(k).unwrap();
        let cfg = SignalingConfig::new(2, 0.5, snr).unwrap();
        let xs: Vec<f64> = (0..N)
            .map(|_| sample_output_given_input(2, &FadingState::Unknown(ch), &cfg, &mut rng).unwrap().as_slice()[1])
            .collect();
        let p = on_tone_chi_square(&xs, &ToneLikelihood::imperfect(&ch, cfg.alpha_sq()), 40);
        assert!(p > 1e-3, "K={k} snr={snr}: p = {p}");

        let h = 0.8;
        let xs: Vec<f64> = (0..N)
            .map(|_| sample_output_given_input(1, &FadingState::Magnitude(h), &cfg, &mut rng).unwrap().as_slice()[0])
            .collect();
        let p = on_tone_chi_square(&xs, &ToneLikelihood::perfect(cfg.alpha_sq(), h * h), 40);
        assert!(p > 1e-3, "known |h| snr={snr}: p = {p}");
    }
}

#[test]
fn link_simulator_energies_match_density() {
    let ch = ChannelParams::from_rician_k(0.5).unwrap();
    let cfg = SignalingConfig::new(2, 0.5, 1.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut on = Vec::with_capacity(N);
    let mut off = Vec::with_capacity(N);
    for _ in 0..N {
        let s = draw_link_sample(&ch, &cfg, Some(1), &mut rng).unwrap();
        on.push(s.r.as_slice()[0]);
        off.push(s.r.as_slice()[1]);
    }
    let p = on_tone_chi_square(&on, &ToneLikelihood::imperfect(&ch, cfg.alpha_sq()), 40);
    assert!(p > 1e-3, "on tone p = {p}");
    let exp = Exp::new(1.0).unwrap();
    let p = ks_p_value(off, |x| exp.cdf(x));
    assert!(p > 1e-3, "silent tone p = {p}");
}

#[test]
fn chi_square_rejects_wrong_snr() {
    let ch = ChannelParams::from_rician_k(1.0).unwrap();
    let cfg = SignalingConfig::new(2, 0.5, 2.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let xs: Vec<f64> = (0..N)
        .map(|_| sample_output_given_input(1, &FadingState::Unknown(ch), &cfg, &mut rng).unwrap().as_slice()[0])
        .collect();
    let p = on_tone_chi_square(&xs, &ToneLikelihood::imperfect(&ch, 1.1 * cfg.alpha_sq()), 40);
    assert!(p < 1e-3, "p = {p}");
}
