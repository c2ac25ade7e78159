//! Capacity and low-power analysis of M-ary on-off frequency-shift keying
//! (OOFSK, energy detection) and on-off frequency-phase keying (OOFPSK) over
//! Rician fading channels.
//!
//! - [`numerics`]: log-domain Bessel function, Gauss rules, seeded Monte Carlo, finite differences.
//! - [`channel`]: channel and signaling parameters, conditional output densities.
//! - [`capacity`]: finite-M capacities and their M -> infinity limits.
//! - [`lowpower`]: derivatives at zero SNR, minimum bit energy, wideband slope, bit-energy curves.
//! - [`validate`]: link-level mutual-information simulator and optimality checks.
//! - [`cli`]: command-line front end used by the `oofsk` binary.

pub mod capacity;
pub mod channel;
pub mod cli;
pub mod error;
pub mod lowpower;
pub mod numerics;
pub mod validate;

pub use error::{Error, Result};
