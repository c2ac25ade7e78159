use std::cell::RefCell;

use super::{Detector, Estimator, Scheme};
use crate::channel::{log_mixture_density, ChannelParams, Csi, OnToneLaw, SignalingConfig, ToneLikelihood};
use crate::error::{Error, Result};
use crate::numerics::{
    complex_gaussian_energy, gauss_hermite, gauss_laguerre, mc_mean_with, tensor_expect, BaseVar, Estimate,
    QuadratureRule,
};

/// Upper bound on tensor-product nodes per stratum.
pub const MAX_QUADRATURE_NODES: u64 = 200_000_000;

const MAX_QUADRATURE_TONES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Stratum {
    /// `X = 0`
    Off,
    /// `X = 1`
    On,
}

impl Stratum {
    fn stream_tag(self) -> u64 {
        match self {
            Stratum::Off => 0x5110,
            Stratum::On => 0x0A11,
        }
    }
}

/// One capacity evaluation: channel, signaling and receiver scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityProblem {
    pub channel: ChannelParams,
    pub signaling: SignalingConfig,
    pub scheme: Scheme,
}

#[derive(Debug, Clone, Copy)]
enum FadingDraw {
    /// Likelihood and on-tone law do not depend on the sample.
    Fixed(ToneLikelihood, OnToneLaw),
    /// Perfect side information over a faded channel: `|h|` is drawn per sample.
    Drawn { d_mag_sq: f64, gamma_sq: f64, alpha_sq: f64 },
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct StratumEval {
    fading: FadingDraw,
    stratum: Stratum,
    detector: Detector,
    nu: f64,
}

impl StratumEval {
    /// Integrand at base point `u = [fading (2)] [on-tone noise (2)] [Exp(1) tones]`.
    #[inline]
    pub(crate) fn eval(&self, u: &[f64], log_f: &mut Vec<f64>) -> f64 {
        let mut idx = 0;
        let (tone, law) = match self.fading {
            FadingDraw::Fixed(t, l) => (t, l),
            FadingDraw::Drawn { d_mag_sq, gamma_sq, alpha_sq } => {
                let h2 = complex_gaussian_energy(d_mag_sq, gamma_sq, u[0], u[1]);
                idx = 2;
                (ToneLikelihood::perfect(alpha_sq, h2), OnToneLaw::perfect(alpha_sq, h2))
            }
        };
        log_f.clear();
        if self.stratum == Stratum::On {
            log_f.push(tone.log_f(law.energy(u[idx], u[idx + 1])));
            idx += 2;
        }
        log_f.extend(u[idx..].iter().map(|&r| tone.log_f(r)));
        let lm = log_mixture_density(log_f, self.nu);
        match (self.detector, self.stratum) {
            (Detector::Energy, Stratum::On) => log_f[0] - lm,
            _ => -lm,
        }
    }
}

impl CapacityProblem {
    pub fn new(channel: ChannelParams, signaling: SignalingConfig, scheme: Scheme) -> Self {
        Self { channel, signaling, scheme }
    }

    fn draws_fading(&self) -> bool {
        self.scheme.csi == Csi::Perfect && self.channel.is_faded()
    }

    /// Deterministic part of the capacity.
    ///
    /// OOFPSK reinstates `e^{-sum R_j}` in `log p_R`; its conditional mean
    /// is added in closed form together with the `-M` entropy offset and the
    /// conditional output entropy.
    pub fn constant(&self) -> f64 {
        let ch = &self.channel;
        let cfg = &self.signaling;
        match (self.scheme.detector, self.scheme.csi) {
            (Detector::Energy, _) => 0.0,
            (Detector::Phase, Csi::Perfect) => cfg.snr * ch.mean_power(),
            (Detector::Phase, Csi::Imperfect) => {
                cfg.snr * ch.mean_power() - cfg.nu * (ch.gamma_sq * cfg.alpha_sq()).ln_1p()
            }
        }
    }

    pub(crate) fn weight(&self, stratum: Stratum) -> f64 {
        match stratum {
            Stratum::Off => 1.0 - self.signaling.nu,
            Stratum::On => self.signaling.nu,
        }
    }

    pub(crate) fn dims(&self, stratum: Stratum) -> Vec<BaseVar> {
        let m = self.signaling.m;
        let mut dims = Vec::with_capacity(m + 4);
        if self.draws_fading() {
            dims.extend([BaseVar::StdNormal; 2]);
        }
        let exp_tones = match stratum {
            Stratum::Off => m,
            Stratum::On => {
                dims.extend([BaseVar::StdNormal; 2]);
                m - 1
            }
        };
        dims.extend(std::iter::repeat_n(BaseVar::Exp1, exp_tones));
        dims
    }

    pub(crate) fn evaluator(&self, stratum: Stratum) -> StratumEval {
        let ch = &self.channel;
        let a = self.signaling.alpha_sq();
        let fading = match self.scheme.csi {
            Csi::Imperfect => FadingDraw::Fixed(ToneLikelihood::imperfect(ch, a), OnToneLaw::imperfect(ch, a)),
            Csi::Perfect if !ch.is_faded() => {
                FadingDraw::Fixed(ToneLikelihood::perfect(a, ch.d_mag_sq), OnToneLaw::perfect(a, ch.d_mag_sq))
            }
            Csi::Perfect => FadingDraw::Drawn { d_mag_sq: ch.d_mag_sq, gamma_sq: ch.gamma_sq, alpha_sq: a },
        };
        StratumEval { fading, stratum, detector: self.scheme.detector, nu: self.signaling.nu }
    }
}

fn rules_for(dims: &[BaseVar], order: usize) -> Result<Vec<QuadratureRule>> {
    let lag = gauss_laguerre(order)?;
    let her = gauss_hermite(order)?;
    Ok(dims
        .iter()
        .map(|d| match d {
            BaseVar::Exp1 => lag.clone(),
            BaseVar::StdNormal => her.clone(),
        })
        .collect())
}

/// Estimate `sum_k c_k C(problem_k)` in one pass over shared draws.
///
/// All problems must share `M`, the scheme, and whether fading is drawn, so
/// that their integrands live on the same base vector. Under Monte Carlo the
/// per-sample combination gives a standard error for differences and
/// finite-difference stencils that reflects the common random numbers.
pub fn estimate_combination(terms: &[(f64, CapacityProblem)], est: &Estimator) -> Result<Estimate> {
    let Some((_, first)) = terms.first() else {
        return Err(Error::Config("empty capacity combination".into()));
    };
    for (_, p) in terms {
        if p.signaling.m != first.signaling.m || p.scheme != first.scheme || p.draws_fading() != first.draws_fading() {
            return Err(Error::Config("combined capacity problems must share M, scheme and fading layout".into()));
        }
    }
    let m = first.signaling.m;
    if let Estimator::Quadrature { .. } = est {
        if m > MAX_QUADRATURE_TONES {
            return Err(Error::Config(format!(
                "tensor quadrature is limited to M <= {MAX_QUADRATURE_TONES}, got M = {m}"
            )));
        }
    }

    let constant: f64 = terms.iter().map(|(c, p)| c * p.constant()).sum();
    let mut total = match est {
        Estimator::MonteCarlo(_) => {
            Estimate { method: crate::numerics::Method::MonteCarlo, ..Estimate::exact(constant) }
        }
        Estimator::Quadrature { .. } => Estimate::quadrature(constant),
    };

    for stratum in [Stratum::Off, Stratum::On] {
        let parts: Vec<(f64, StratumEval)> = terms
            .iter()
            .filter_map(|(c, p)| {
                let a = c * p.weight(stratum);
                (a != 0.0).then(|| (a, p.evaluator(stratum)))
            })
            .collect();
        if parts.is_empty() {
            continue;
        }
        let dims = first.dims(stratum);
        let g =
            |u: &[f64], scratch: &mut Vec<f64>| -> f64 { parts.iter().map(|(a, ev)| a * ev.eval(u, scratch)).sum() };
        let e = match est {
            Estimator::MonteCarlo(cfg) => {
                mc_mean_with(&dims, &cfg.derive(stratum.stream_tag()), || Vec::with_capacity(m), g)?
            }
            Estimator::Quadrature { order } => {
                let nodes = (*order as u64).checked_pow(dims.len() as u32).unwrap_or(u64::MAX);
                if nodes > MAX_QUADRATURE_NODES {
                    return Err(Error::Config(format!(
                        "tensor quadrature with order {order} over {} dimensions needs {nodes} nodes",
                        dims.len()
                    )));
                }
                let rules = rules_for(&dims, *order)?;
                let refs: Vec<&QuadratureRule> = rules.iter().collect();
                let scratch = RefCell::new(Vec::with_capacity(m));
                let v = tensor_expect(&refs, |u| g(u, &mut scratch.borrow_mut()));
                if !v.is_finite() {
                    return Err(Error::Estimation { index: 0, reason: format!("quadrature returned {v}") });
                }
                Estimate::quadrature(v)
            }
        };
        total = total.combine(1.0, e, 1.0);
    }
    Ok(total)
}
