//! Property tests across modules.

use oofsk::capacity::{capacity, input_entropy, Estimator, Scheme};
use oofsk::channel::{log_mixture_density, ChannelParams, SignalingConfig};
use oofsk::cli::parse_snr_grid;
use oofsk::lowpower::received_eb_n0_db;
use oofsk::numerics::{ln_i0, mc_mean, stencil_weights, BaseVar, McConfig, Stencil};
use proptest::prelude::*;

const QUAD: Estimator = Estimator::Quadrature { order: 16 };

fn cfg() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn ln_i0_bounds_and_monotone(x in 0.0f64..500.0, dx in 1e-6f64..5.0) {
        let v = ln_i0(x);
        prop_assert!(v >= (x * x / 4.0).ln_1p() - 1e-15);
        prop_assert!(v <= x + 1e-12);
        if x > 1.0 {
            prop_assert!(v >= x - 0.5 * (2.0 * std::f64::consts::PI * x).ln());
        }
        prop_assert!(ln_i0(x + dx) > v);
    }

    #[test]
    fn mixture_lies_between_silence_and_strongest_tone(l in proptest::collection::vec(-20.0f64..20.0, 1..8), nu in 0.0f64..=1.0) {
        let lm = log_mixture_density(&l, nu);
        let max = l.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = l.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert!(lm <= max.max(0.0) + 1e-12);
        prop_assert!(lm >= min.min(0.0) - 1e-12);
    }

    #[test]
    fn energy_capacity_within_entropy(k in 0.0f64..5.0, nu in 0.01f64..=1.0, snr_db in -15.0f64..15.0, m in 1usize..=3) {
        let ch = ChannelParams::from_rician_k(k).unwrap();
        let c = capacity(&ch, &SignalingConfig::new(m, nu, 10f64.powf(snr_db / 10.0)).unwrap(), Scheme::ENERGY_IMPERFECT, &QUAD).unwrap();
        prop_assert!(c.nats_per_symbol >= -1e-12);
        prop_assert!(c.nats_per_symbol <= input_entropy(nu, m) + 1e-9);
    }

    #[test]
    fn received_bit_energy_ignores_channel_scale(k in 0.0f64..4.0, scale in 0.1f64..10.0, snr in 0.05f64..5.0) {
        let ch = ChannelParams::from_rician_k(k).unwrap();
        let scaled = ch.scaled(scale).unwrap();
        let a = capacity(&ch, &SignalingConfig::new(2, 0.5, snr).unwrap(), Scheme::PHASE_IMPERFECT, &QUAD).unwrap();
        let b = capacity(&scaled, &SignalingConfig::new(2, 0.5, snr / scale).unwrap(), Scheme::PHASE_IMPERFECT, &QUAD).unwrap();
        prop_assert!((a.nats_per_symbol - b.nats_per_symbol).abs() < 1e-10);
        let ea = received_eb_n0_db(&ch, snr, a.nats_per_symbol);
        let eb = received_eb_n0_db(&scaled, snr / scale, b.nats_per_symbol);
        prop_assert!((ea - eb).abs() < 1e-8);
    }

    #[test]
    fn monte_carlo_is_reproducible(seed in any::<u64>(), n in 1u64..5000) {
        let c = McConfig::new(n, seed).unwrap();
        let g = |u: &[f64]| u[0] * u[1];
        let dims = [BaseVar::Exp1, BaseVar::StdNormal];
        let a = mc_mean(&dims, &c, g).unwrap();
        prop_assert_eq!(a, mc_mean(&dims, &c, g).unwrap());
        prop_assert_eq!(a.samples, n);
    }

    #[test]
    fn one_sided_stencils_exact_on_quadratics(a in -5.0f64..5.0, b in -5.0f64..5.0, c in -5.0f64..5.0, h in 1e-3f64..1.0) {
        let f = |x: f64| a + b * x + c * x * x;
        let d1: f64 = stencil_weights(1, Stencil::OneSided).unwrap().iter().map(|&(k, w)| w * f(k * h)).sum::<f64>() / h;
        let d2: f64 = stencil_weights(2, Stencil::OneSided).unwrap().iter().map(|&(k, w)| w * f(k * h)).sum::<f64>() / (h * h);
        prop_assert!((d1 - b).abs() < 1e-9 * (1.0 + b.abs() + c.abs() / h));
        prop_assert!((d2 - 2.0 * c).abs() < 1e-7 * (1.0 + (a.abs() + b.abs()) / (h * h)));
    }

    #[test]
    fn snr_grid_spans_endpoints(a in -40.0f64..0.0, span in 0.5f64..40.0, n in 2usize..50) {
        let g = parse_snr_grid(&format!("{a}:{}:{n}", a + span)).unwrap();
        prop_assert_eq!(g.len(), n);
        prop_assert!((g[0] - a).abs() < 1e-12 && (g[n - 1] - a - span).abs() < 1e-9);
        prop_assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
