//! Capacity of all four receiver variants at one operating point.
//!
//! cargo run --release --example capacity_point -- [K] [snr_db] [nu] [M]

use oofsk::capacity::{capacity, input_entropy, Estimator, Scheme};
use oofsk::channel::{ChannelParams, SignalingConfig};
use oofsk::numerics::McConfig;

fn arg(i: usize, default: f64) -> f64 {
    std::env::args().nth(i).and_then(|s| s.parse().ok()).unwrap_or(default)
}

fn main() -> oofsk::Result<()> {
    let k = arg(1, 1.0);
    let snr = 10f64.powf(arg(2, 0.0) / 10.0);
    let nu = arg(3, 0.5);
    let m = arg(4, 2.0) as usize;

    let ch = ChannelParams::from_rician_k(k)?;
    let cfg = SignalingConfig::new(m, nu, snr)?;
    let est = Estimator::MonteCarlo(McConfig::new(400_000, 1)?);

    println!("K = {k}, SNR = {snr:.4}, nu = {nu}, M = {m}");
    println!("input entropy (on-off part only) = {:.4} nats", input_entropy(nu, m));
    for scheme in Scheme::ALL {
        let c = capacity(&ch, &cfg, scheme, &est)?;
        println!(
            "{:<18} {:.5} +- {:.1e} nats  ({:.5} bits)",
            scheme.name(),
            c.nats_per_symbol,
            c.std_error(),
            c.bits_per_symbol()
        );
    }
    Ok(())
}
