//! The same capacity by tensor Gauss quadrature and by Monte Carlo.
//!
//! cargo run --release --example quadrature_vs_monte_carlo

use oofsk::capacity::{capacity, Estimator, Scheme};
use oofsk::channel::{ChannelParams, SignalingConfig};
use oofsk::numerics::McConfig;

fn main() -> oofsk::Result<()> {
    let ch = ChannelParams::from_rician_k(0.5)?;
    let quad = Estimator::Quadrature { order: 24 };
    let mc = Estimator::MonteCarlo(McConfig::new(1_000_000, 2)?);

    println!("{:<18} {:>6} {:>12} {:>12} {:>9}", "scheme", "snr", "quadrature", "monte carlo", "z");
    for scheme in Scheme::ALL {
        for snr in [0.1, 1.0, 10.0] {
            let cfg = SignalingConfig::new(2, 0.5, snr)?;
            let q = capacity(&ch, &cfg, scheme, &quad)?;
            let m = capacity(&ch, &cfg, scheme, &mc)?;
            let z = (m.nats_per_symbol - q.nats_per_symbol) / m.std_error();
            println!("{:<18} {snr:>6} {:>12.6} {:>12.6} {z:>9.2}", scheme.name(), q.nats_per_symbol, m.nats_per_symbol);
        }
    }
    Ok(())
}
