//! Simulate the link sample by sample and check the analytic capacity:
//! mutual information from the simulated likelihoods, and the KKT
//! condition for the on-off input.
//!
//! cargo run --release --example link_simulation

use oofsk::capacity::Scheme;
use oofsk::channel::{ChannelParams, SignalingConfig};
use oofsk::numerics::McConfig;
use oofsk::validate::{draw_link_sample, kkt_residual, simulate_mi};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> oofsk::Result<()> {
    let ch = ChannelParams::from_rician_k(1.0)?;
    let cfg = SignalingConfig::new(4, 0.25, 2.0)?;
    let mc = McConfig::new(200_000, 9)?;

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..3 {
        let s = draw_link_sample(&ch, &cfg, None, &mut rng)?;
        let r: Vec<String> = s.r.as_slice().iter().map(|v| format!("{v:.2}")).collect();
        println!("x = {}  |h|^2 = {:.3}  r = [{}]", s.x, s.h.norm_sqr(), r.join(", "));
    }

    for scheme in Scheme::ALL {
        let rep = simulate_mi(&ch, &cfg, scheme, &mc)?;
        let kkt = kkt_residual(&ch, &cfg, scheme, &mc)?;
        println!(
            "{:<18} simulated {:.5}  analytic {:.5}  z = {:+.2}  kkt residual {:.4} (floor {:.4})  {}",
            scheme.name(),
            rep.mi_estimate.value,
            rep.analytic_value,
            rep.z_score,
            kkt.residual,
            kkt.noise_floor,
            if rep.pass && kkt.pass() { "ok" } else { "MISMATCH" }
        );
    }
    Ok(())
}
