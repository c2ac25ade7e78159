//! Cross-checks that do not go through the capacity integrands.
//!
//! [`simulate_mi`] runs the correlator-level link (random symbol, phase,
//! fading and noise, complex outputs `y`) and averages the exact log
//! likelihood ratio of what the receiver observes. [`kkt_residual`] checks
//! that every tone carries the same conditional divergence, the optimality
//! condition for equiprobable tones. [`martingale_convergence_check`]
//! tracks the gap between finite-M and large-M energy detection.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::capacity::{capacity, Detector, Estimator, Scheme};
use crate::channel::{
    log_mixture_density, ChannelParams, Csi, EnergyVector, OnToneLaw, SignalingConfig, ToneLikelihood,
};
use crate::error::{Error, Result};
use crate::numerics::{mc_mean_rng, mc_mean_with, BaseVar, Estimate, McConfig, McRng};

/// Default `|z|` above which a comparison fails.
pub const DEFAULT_Z_THRESHOLD: f64 = 4.0;

/// One use of the channel.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkSample {
    /// 0 for silence, `1..=M` for the signaled tone.
    pub x: usize,
    pub theta: f64,
    pub h: Complex64,
    pub y: Vec<Complex64>,
    pub r: EnergyVector,
}

#[inline]
fn cn01<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let a: f64 = rng.sample(StandardNormal);
    let b: f64 = rng.sample(StandardNormal);
    Complex64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
}

/// Fill `y` for symbol `x` (or a random one when `None`); returns `(x, theta, h)`.
fn draw_outputs<R: Rng + ?Sized>(
    ch: &ChannelParams,
    cfg: &SignalingConfig,
    x: Option<usize>,
    rng: &mut R,
    y: &mut Vec<Complex64>,
) -> (usize, f64, Complex64) {
    let x = x.unwrap_or_else(|| if rng.random::<f64>() < 1.0 - cfg.nu { 0 } else { rng.random_range(1..=cfg.m) });
    let theta = rng.random::<f64>() * TAU;
    let h = ch.d_mag_sq.sqrt() + ch.gamma_sq.sqrt() * cn01(rng);
    y.clear();
    y.extend((0..cfg.m).map(|_| cn01(rng)));
    if x > 0 {
        y[x - 1] += cfg.alpha_sq().sqrt() * h * Complex64::from_polar(1.0, theta);
    }
    (x, theta, h)
}

/// Draw one channel use; `x = None` draws the symbol from the on-off input.
pub fn draw_link_sample<R: Rng + ?Sized>(
    ch: &ChannelParams,
    cfg: &SignalingConfig,
    x: Option<usize>,
    rng: &mut R,
) -> Result<LinkSample> {
    if let Some(x) = x {
        if x > cfg.m {
            return Err(Error::Domain(format!("symbol {x} outside 0..={}", cfg.m)));
        }
    }
    let mut y = Vec::with_capacity(cfg.m);
    let (x, theta, h) = draw_outputs(ch, cfg, x, rng, &mut y);
    let r = EnergyVector::new(y.iter().map(|v| v.norm_sqr()).collect())?;
    Ok(LinkSample { x, theta, h, y, r })
}

#[derive(Default)]
struct Scratch {
    y: Vec<Complex64>,
    l: Vec<f64>,
}

/// `log p(obs | x, side info) / p(obs | side info)` for one drawn channel use.
fn link_log_ratio(
    ch: &ChannelParams,
    cfg: &SignalingConfig,
    scheme: Scheme,
    x: Option<usize>,
    rng: &mut McRng,
    s: &mut Scratch,
) -> f64 {
    let (x, theta, h) = draw_outputs(ch, cfg, x, rng, &mut s.y);
    let a = cfg.alpha_sq();
    let tone = match scheme.csi {
        Csi::Perfect => ToneLikelihood::perfect(a, h.norm_sqr()),
        Csi::Imperfect => ToneLikelihood::imperfect(ch, a),
    };
    s.l.clear();
    s.l.extend(s.y.iter().map(|v| tone.log_f(v.norm_sqr())));
    let lm = log_mixture_density(&s.l, cfg.nu);
    if x == 0 {
        return -lm;
    }
    let yx = s.y[x - 1];
    let rot = Complex64::from_polar(a.sqrt(), theta);
    let num = match (scheme.detector, scheme.csi) {
        (Detector::Energy, _) => s.l[x - 1],
        (Detector::Phase, Csi::Perfect) => yx.norm_sqr() - (yx - rot * h).norm_sqr(),
        (Detector::Phase, Csi::Imperfect) => {
            let var = 1.0 + ch.gamma_sq * a;
            yx.norm_sqr() - var.ln() - (yx - rot * ch.d_mag_sq.sqrt()).norm_sqr() / var
        }
    };
    num - lm
}

/// Mutual information estimated from simulated channel uses.
pub fn simulate_mi_estimate(
    ch: &ChannelParams,
    cfg: &SignalingConfig,
    scheme: Scheme,
    mc: &McConfig,
) -> Result<Estimate> {
    mc_mean_rng(mc, Scratch::default, |rng, s| link_log_ratio(ch, cfg, scheme, None, rng, s))
}

/// Comparison of a simulated estimate against the capacity module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    pub mi_estimate: Estimate,
    pub analytic: Estimate,
    pub analytic_value: f64,
    pub z_score: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl ValidationReport {
    pub fn compare(mi_estimate: Estimate, analytic: Estimate, threshold: f64) -> Self {
        let diff = mi_estimate.value - analytic.value;
        let sd = mi_estimate.std_error.hypot(analytic.std_error);
        let z_score = if sd > 0.0 {
            diff / sd
        } else if diff.abs() <= 1e-12 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        };
        Self {
            mi_estimate,
            analytic,
            analytic_value: analytic.value,
            z_score,
            threshold,
            pass: z_score.abs() <= threshold,
        }
    }
}

/// Link-level mutual information against the capacity module evaluated on
/// an independent stream.
pub fn simulate_mi(
    ch: &ChannelParams,
    cfg: &SignalingConfig,
    scheme: Scheme,
    mc: &McConfig,
) -> Result<ValidationReport> {
    let mi = simulate_mi_estimate(ch, cfg, scheme, mc)?;
    let reference = capacity(ch, cfg, scheme, &Estimator::MonteCarlo(mc.derive(0xC0FFEE)))?;
    Ok(ValidationReport::compare(mi, reference.estimate, DEFAULT_Z_THRESHOLD))
}

/// Spread of the per-tone conditional divergences.
#[derive(Debug, Clone, PartialEq)]
pub struct KktResidual {
    /// `max_i |D_i - mean D| / mean D`
    pub residual: f64,
    /// Four standard errors of the residual under exact symmetry.
    pub noise_floor: f64,
    pub divergences: Vec<Estimate>,
}

impl KktResidual {
    pub fn pass(&self) -> bool {
        self.residual <= self.noise_floor
    }
}

/// Conditional divergence of each tone from the output law.
///
/// Each tone is estimated on its own substream, so the residual reflects
/// sampling noise only when the tones are truly equivalent.
pub fn kkt_residual(ch: &ChannelParams, cfg: &SignalingConfig, scheme: Scheme, mc: &McConfig) -> Result<KktResidual> {
    let divergences = (1..=cfg.m)
        .map(|i| {
            mc_mean_rng(&mc.derive(i as u64), Scratch::default, |rng, s| {
                link_log_ratio(ch, cfg, scheme, Some(i), rng, s)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mean = divergences.iter().map(|d| d.value).sum::<f64>() / cfg.m as f64;
    if cfg.m == 1 || mean == 0.0 {
        return Ok(KktResidual { residual: 0.0, noise_floor: 0.0, divergences });
    }
    let spread = divergences.iter().map(|d| (d.value - mean).abs()).fold(0.0, f64::max);
    let sd = divergences.iter().map(|d| d.std_error).fold(0.0, f64::max);
    Ok(KktResidual { residual: spread / mean.abs(), noise_floor: DEFAULT_Z_THRESHOLD * sd / mean.abs(), divergences })
}

/// `chi_M = E0[mix log mix]` for energy detection without side information,
/// where `mix = S_M / M` is the output likelihood ratio against silence.
///
/// Evaluated through the change of measure
/// `E0[mix g] = (1 - nu) E0[g] + nu E1[g]` with `g = log mix`, whose
/// integrand stays bounded where `mix` itself has heavy tails.
pub fn martingale_convergence_check(
    ch: &ChannelParams,
    nu: f64,
    snr: f64,
    m_list: &[usize],
    mc: &McConfig,
) -> Result<Vec<(usize, Estimate)>> {
    if m_list.is_empty() || m_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("M list must be nonempty and strictly increasing".into()));
    }
    m_list
        .iter()
        .map(|&m| {
            let cfg = SignalingConfig::new(m, nu, snr)?;
            let tone = ToneLikelihood::imperfect(ch, cfg.alpha_sq());
            let law = OnToneLaw::imperfect(ch, cfg.alpha_sq());
            let mut total = Estimate::exact(0.0);
            if nu < 1.0 {
                let dims = vec![BaseVar::Exp1; m];
                let off = mc_mean_with(&dims, &mc.derive(2 * m as u64), Vec::new, |u, l: &mut Vec<f64>| {
                    l.clear();
                    l.extend(u.iter().map(|&r| tone.log_f(r)));
                    log_mixture_density(l, nu)
                })?;
                total = total.combine(1.0, off, 1.0 - nu);
            }
            let mut dims = vec![BaseVar::StdNormal; 2];
            dims.extend(std::iter::repeat_n(BaseVar::Exp1, m - 1));
            let on = mc_mean_with(&dims, &mc.derive(2 * m as u64 + 1), Vec::new, |u, l: &mut Vec<f64>| {
                l.clear();
                l.push(tone.log_f(law.energy(u[0], u[1])));
                l.extend(u[2..].iter().map(|&r| tone.log_f(r)));
                log_mixture_density(l, nu)
            })?;
            Ok((m, total.combine(1.0, on, nu)))
        })
        .collect()
}
