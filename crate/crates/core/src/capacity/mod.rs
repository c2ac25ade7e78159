//! Capacities of M-ary OOFSK (energy detection) and OOFPSK signaling.
//!
//! Finite-M capacities are expectations of log density ratios under the
//! exact conditional output laws. They are written as a constant plus two
//! strata, the silent symbol (weight `1 - nu`) and the signaled symbol
//! (weight `nu`, tone 1 by symmetry), each an expectation over a vector of
//! primitive Exp(1) and N(0,1) variates. The same integrand feeds Monte
//! Carlo and tensor-product Gauss quadrature. The M -> infinity limits are
//! closed forms or low-dimensional expectations.

mod limits;
mod problem;

pub(crate) use limits::normal_expect;
pub use limits::{c_inf_energy_imperfect, c_inf_energy_perfect, c_inf_oofpsk_imperfect, c_inf_oofpsk_perfect};
pub use problem::{estimate_combination, CapacityProblem, MAX_QUADRATURE_NODES};

use crate::channel::{ChannelParams, Csi, SignalingConfig};
use crate::error::{Error, Result};
use crate::numerics::{Estimate, McConfig};

/// Receiver front end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Detector {
    /// Per-tone energy detection (OOFSK).
    Energy,
    /// Full correlator outputs with information-bearing phase (OOFPSK).
    Phase,
}

impl Detector {
    pub fn as_str(self) -> &'static str {
        match self {
            Detector::Energy => "energy",
            Detector::Phase => "phase",
        }
    }
}

/// Detector and receiver side information.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Scheme {
    pub detector: Detector,
    pub csi: Csi,
}

impl Scheme {
    pub const ENERGY_PERFECT: Scheme = Scheme { detector: Detector::Energy, csi: Csi::Perfect };
    pub const ENERGY_IMPERFECT: Scheme = Scheme { detector: Detector::Energy, csi: Csi::Imperfect };
    pub const PHASE_PERFECT: Scheme = Scheme { detector: Detector::Phase, csi: Csi::Perfect };
    pub const PHASE_IMPERFECT: Scheme = Scheme { detector: Detector::Phase, csi: Csi::Imperfect };

    pub const ALL: [Scheme; 4] =
        [Self::ENERGY_PERFECT, Self::ENERGY_IMPERFECT, Self::PHASE_PERFECT, Self::PHASE_IMPERFECT];

    pub fn name(&self) -> String {
        let det = match self.detector {
            Detector::Energy => "energy",
            Detector::Phase => "oofpsk",
        };
        format!("{det}-{}", self.csi.as_str())
    }
}

/// How expectations are evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimator {
    MonteCarlo(McConfig),
    /// Tensor Gauss rules of this order in every dimension (Laguerre for
    /// Exp(1) coordinates, Hermite for Gaussian ones).
    Quadrature {
        order: usize,
    },
}

impl Default for Estimator {
    fn default() -> Self {
        Estimator::MonteCarlo(McConfig::default())
    }
}

/// A capacity in nats per symbol with the parameters that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityResult {
    pub nats_per_symbol: f64,
    pub estimate: Estimate,
    pub channel: ChannelParams,
    pub nu: f64,
    pub snr: f64,
    /// `None` for the M -> infinity limits.
    pub m: Option<usize>,
    pub scheme: Scheme,
}

impl CapacityResult {
    pub(crate) fn new(
        estimate: Estimate,
        channel: ChannelParams,
        nu: f64,
        snr: f64,
        m: Option<usize>,
        scheme: Scheme,
    ) -> Self {
        Self { nats_per_symbol: estimate.value, estimate, channel, nu, snr, m, scheme }
    }

    pub fn bits_per_symbol(&self) -> f64 {
        self.nats_per_symbol * std::f64::consts::LOG2_E
    }

    pub fn std_error(&self) -> f64 {
        self.estimate.std_error
    }
}

/// The scalar on-off input that appears in the M -> infinity limits:
/// `sqrt(snr / nu)` with probability `nu`, zero otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnOffScalarInput {
    pub on_value: f64,
    pub on_prob: f64,
}

impl OnOffScalarInput {
    pub fn new(nu: f64, snr: f64) -> Result<Self> {
        let cfg = SignalingConfig::new(1, nu, snr)?;
        Ok(Self { on_value: cfg.alpha_sq().sqrt(), on_prob: nu })
    }

    /// `E[x^2]`, equal to the SNR.
    pub fn second_moment(&self) -> f64 {
        self.on_prob * self.on_value * self.on_value
    }
}

/// Entropy of the on-off input in nats, `H2(nu) + nu log M`.
pub fn input_entropy(nu: f64, m: usize) -> f64 {
    let h2 = if nu >= 1.0 { 0.0 } else { -nu * nu.ln() - (1.0 - nu) * (-nu).ln_1p() };
    h2 + nu * (m as f64).ln()
}

/// Capacity of `scheme` at the given parameters.
pub fn capacity(ch: &ChannelParams, cfg: &SignalingConfig, scheme: Scheme, est: &Estimator) -> Result<CapacityResult> {
    let problem = CapacityProblem::new(*ch, *cfg, scheme);
    let e = estimate_combination(&[(1.0, problem)], est)?;
    Ok(CapacityResult::new(e, *ch, cfg.nu, cfg.snr, Some(cfg.m), scheme))
}

/// Energy detection, receiver knows only the Rician statistics.
pub fn capacity_energy_imperfect(ch: &ChannelParams, cfg: &SignalingConfig, est: &Estimator) -> Result<CapacityResult> {
    capacity(ch, cfg, Scheme::ENERGY_IMPERFECT, est)
}

/// Energy detection, receiver knows the fading magnitude.
pub fn capacity_energy_perfect(ch: &ChannelParams, cfg: &SignalingConfig, est: &Estimator) -> Result<CapacityResult> {
    capacity(ch, cfg, Scheme::ENERGY_PERFECT, est)
}

/// OOFPSK, receiver knows only the Rician statistics.
pub fn capacity_oofpsk_imperfect(ch: &ChannelParams, cfg: &SignalingConfig, est: &Estimator) -> Result<CapacityResult> {
    capacity(ch, cfg, Scheme::PHASE_IMPERFECT, est)
}

/// OOFPSK, receiver knows the fading coefficient.
pub fn capacity_oofpsk_perfect(ch: &ChannelParams, cfg: &SignalingConfig, est: &Estimator) -> Result<CapacityResult> {
    capacity(ch, cfg, Scheme::PHASE_PERFECT, est)
}

/// Large-M limit of `scheme` at the given duty factor and SNR.
pub fn capacity_limit(
    ch: &ChannelParams,
    nu: f64,
    snr: f64,
    scheme: Scheme,
    est: &Estimator,
) -> Result<CapacityResult> {
    match scheme {
        Scheme { detector: Detector::Energy, csi: Csi::Perfect } => c_inf_energy_perfect(ch, nu, snr, est),
        Scheme { detector: Detector::Energy, csi: Csi::Imperfect } => c_inf_energy_imperfect(ch, nu, snr, est),
        Scheme { detector: Detector::Phase, csi: Csi::Perfect } => c_inf_oofpsk_perfect(ch, snr),
        Scheme { detector: Detector::Phase, csi: Csi::Imperfect } => c_inf_oofpsk_imperfect(ch, nu, snr),
    }
}

pub(crate) fn check_snr(snr: f64) -> Result<()> {
    if snr >= 0.0 && snr.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("SNR must be finite and >= 0, got {snr}")))
    }
}
