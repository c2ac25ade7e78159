//! Bit energy against spectral efficiency for a few duty factors, the
//! classic wideband tradeoff. Writes CSV to stdout.
//!
//! cargo run --release --example spectral_efficiency_curve > curve.csv

use oofsk::capacity::{Estimator, Scheme};
use oofsk::channel::{ChannelParams, PeakConstraint};
use oofsk::lowpower::{bit_energy_curve, log_grid};
use oofsk::numerics::McConfig;

fn main() -> oofsk::Result<()> {
    let ch = ChannelParams::from_rician_k(0.5)?;
    let est = Estimator::MonteCarlo(McConfig::new(100_000, 3)?);

    println!("nu,snr,spectral_eff_bpshz,eb_n0_db");
    for nu in [1.0, 0.1, 0.01] {
        let snrs = log_grid(1e-2 * nu, 1e2, 25);
        let curve = bit_energy_curve(&ch, &snrs, 2, PeakConstraint::FixedPar, nu, Scheme::ENERGY_IMPERFECT, &est)?;
        for p in &curve.points {
            println!("{nu},{:.6e},{:.6e},{:.4}", p.snr, p.spectral_efficiency, p.eb_n0_db);
        }
        if let Some(best) = curve.minimum() {
            eprintln!("nu = {nu}: lowest Eb/N0 on grid {:.3} dB at SNR {:.3e}", best.eb_n0_db, best.snr);
        }
    }
    Ok(())
}
