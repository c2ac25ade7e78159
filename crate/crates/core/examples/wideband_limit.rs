//! Capacity as the number of tones grows, next to its M -> infinity limit.
//!
//! cargo run --release --example wideband_limit

use oofsk::capacity::{capacity, capacity_limit, Estimator, Scheme};
use oofsk::channel::{ChannelParams, SignalingConfig};
use oofsk::numerics::McConfig;

fn main() -> oofsk::Result<()> {
    let ch = ChannelParams::rayleigh(1.0)?;
    let (nu, snr) = (1.0, 1.0);
    let est = Estimator::MonteCarlo(McConfig::new(200_000, 11)?);

    for scheme in [Scheme::ENERGY_IMPERFECT, Scheme::ENERGY_PERFECT] {
        let lim = capacity_limit(&ch, nu, snr, scheme, &est)?;
        println!("{}: limit {:.5} nats", scheme.name(), lim.nats_per_symbol);
        for m in [2, 8, 32, 128] {
            let c = capacity(&ch, &SignalingConfig::new(m, nu, snr)?, scheme, &est)?;
            println!(
                "  M = {m:<4} C = {:.5} +- {:.1e}  gap {:.4}",
                c.nats_per_symbol,
                c.std_error(),
                lim.nats_per_symbol - c.nats_per_symbol
            );
        }
    }
    Ok(())
}
