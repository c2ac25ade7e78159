//! Minimum received bit energy at a fixed duty factor, found by a grid plus
//! golden-section search over SNR.
//!
//! cargo run --release --example minimum_bit_energy -- [samples]

use oofsk::capacity::{Estimator, Scheme};
use oofsk::channel::ChannelParams;
use oofsk::lowpower::{minimum_bit_energy, MinSearch};
use oofsk::numerics::McConfig;

fn main() -> oofsk::Result<()> {
    let samples = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200_000);
    let est = Estimator::MonteCarlo(McConfig::new(samples, 7)?);
    let search = MinSearch::default();
    let gauss = ChannelParams::unfaded(1.0)?;
    let k1 = ChannelParams::from_rician_k(1.0)?;

    let cases = [
        ("unfaded, energy detection, nu = 1", gauss, 1.0, Scheme::ENERGY_IMPERFECT),
        ("unfaded, energy detection, nu = 1e-4", gauss, 1e-4, Scheme::ENERGY_IMPERFECT),
        ("K = 1, OOFPSK, nu = 0.01", k1, 0.01, Scheme::PHASE_IMPERFECT),
    ];
    for (label, ch, nu, scheme) in cases {
        let min = minimum_bit_energy(&ch, 2, nu, scheme, &est, &search)?;
        println!(
            "{label:<40} Eb/N0 min = {:7.3} dB at SNR = {:.4e} (C = {:.4e} +- {:.1e} nats)",
            min.eb_n0_min_db,
            min.snr_at_min,
            min.capacity.nats_per_symbol,
            min.capacity.std_error()
        );
    }
    Ok(())
}
