//! Zero-SNR slope, curvature, bit energy and wideband slope for both
//! detectors, under a fixed duty factor and under a fixed peak.
//!
//! cargo run --release --example low_power_summary

use oofsk::capacity::Estimator;
use oofsk::channel::{ChannelParams, Csi};
use oofsk::lowpower::{
    par_limited_oofpsk_summary, par_limited_summary, peak_limited_energy_summary, peak_limited_oofpsk_summary,
    LowPowerSummary, MinSearch,
};
use oofsk::numerics::McConfig;

fn show(label: &str, s: &LowPowerSummary) {
    let min = s.eb_n0_min_db.map_or("   n/a".to_string(), |v| format!("{v:6.3}"));
    println!(
        "{label:<32} C'(0) = {:.4}  Eb/N0(0) = {:7.3} dB  min = {min} dB  S0 = {:.4}{}",
        s.c_dot0,
        s.eb_n0_at_zero_se_db,
        s.s0,
        if s.minimum_at_nonzero_rate { "  (minimum at nonzero rate)" } else { "" }
    );
}

fn main() -> oofsk::Result<()> {
    let ch = ChannelParams::from_rician_k(1.0)?;
    let mc = Estimator::MonteCarlo(McConfig::new(100_000, 5)?);
    let quad = Estimator::Quadrature { order: 64 };
    let search = MinSearch::default();

    println!("K = 1, M = 2, receiver without fading knowledge");
    for nu in [1.0, 0.1] {
        show(&format!("energy, nu = {nu}"), &par_limited_summary(&ch, 2, nu, Csi::Imperfect, &mc, &search)?);
        show(
            &format!("phase,  nu = {nu}"),
            &par_limited_oofpsk_summary(&ch, 2, nu, Csi::Imperfect)?.refine_minimum(&mc, &search)?,
        );
    }
    for eta in [0.5, 2.0, 50.0] {
        show(&format!("energy, peak eta = {eta}"), &peak_limited_energy_summary(&ch, 2, eta, Csi::Imperfect, &quad)?);
        show(&format!("phase,  peak eta = {eta}"), &peak_limited_oofpsk_summary(&ch, 2, eta, Csi::Imperfect)?);
    }
    Ok(())
}
