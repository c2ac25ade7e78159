use super::{check_snr, CapacityResult, Estimator, Scheme};
use crate::channel::{ChannelParams, OnToneLaw, SignalingConfig, ToneLikelihood};
use crate::error::{Error, Result};
use crate::numerics::{
    complex_gaussian_energy, gauss_hermite, ln_i0, mc_mean, tensor_expect, BaseVar, Estimate, QuadratureRule,
};

const LIMIT_STREAM: u64 = 0x11_0F;

/// Expectation of `g` over i.i.d. standard normals.
pub(crate) fn normal_expect<F>(dims: usize, est: &Estimator, g: F) -> Result<Estimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    match est {
        Estimator::MonteCarlo(cfg) => mc_mean(&vec![BaseVar::StdNormal; dims], &cfg.derive(LIMIT_STREAM), g),
        Estimator::Quadrature { order } => {
            let rule = gauss_hermite(*order)?;
            let rules: Vec<&QuadratureRule> = vec![&rule; dims];
            let v = tensor_expect(&rules, g);
            if v.is_finite() {
                Ok(Estimate::quadrature(v))
            } else {
                Err(Error::Estimation { index: 0, reason: format!("quadrature returned {v}") })
            }
        }
    }
}

/// Large-M OOFPSK capacity with a receiver that knows `h`: `E|h|^2 snr`.
pub fn c_inf_oofpsk_perfect(ch: &ChannelParams, snr: f64) -> Result<CapacityResult> {
    check_snr(snr)?;
    let e = Estimate::exact(ch.mean_power() * snr);
    Ok(CapacityResult::new(e, *ch, 1.0, snr, None, Scheme::PHASE_PERFECT))
}

/// Large-M OOFPSK capacity over Rician fading unknown to the receiver.
pub fn c_inf_oofpsk_imperfect(ch: &ChannelParams, nu: f64, snr: f64) -> Result<CapacityResult> {
    let cfg = SignalingConfig::new(1, nu, snr)?;
    let v = ch.mean_power() * snr - nu * (ch.gamma_sq * cfg.alpha_sq()).ln_1p();
    Ok(CapacityResult::new(Estimate::exact(v), *ch, nu, snr, None, Scheme::PHASE_IMPERFECT))
}

/// Large-M energy-detection capacity over Rician fading unknown to the receiver.
///
/// Closed form except for `E[log I0(c sqrt R)]` under the on-tone law, which
/// vanishes when there is no specular component.
pub fn c_inf_energy_imperfect(ch: &ChannelParams, nu: f64, snr: f64, est: &Estimator) -> Result<CapacityResult> {
    let cfg = SignalingConfig::new(1, nu, snr)?;
    let a = cfg.alpha_sq();
    let s = 1.0 + ch.gamma_sq * a;
    let closed = ch.mean_power() * snr - nu * (ch.gamma_sq * a).ln_1p() - 2.0 * snr * ch.d_mag_sq / s;
    let e = if ch.d_mag_sq == 0.0 || snr == 0.0 {
        Estimate::exact(closed)
    } else {
        let law = OnToneLaw::imperfect(ch, a);
        let coef = ToneLikelihood::imperfect(ch, a).bessel_coef;
        normal_expect(2, est, |u| ln_i0(coef * law.energy(u[0], u[1]).sqrt()))?.scale(nu).shift(closed)
    };
    Ok(CapacityResult::new(e, *ch, nu, snr, None, Scheme::ENERGY_IMPERFECT))
}

/// Large-M energy-detection capacity with known fading magnitude: the
/// conditional divergence `nu E_h E_R[log f(R; |h|)]`.
pub fn c_inf_energy_perfect(ch: &ChannelParams, nu: f64, snr: f64, est: &Estimator) -> Result<CapacityResult> {
    let cfg = SignalingConfig::new(1, nu, snr)?;
    let a = cfg.alpha_sq();
    let e = if snr == 0.0 {
        Estimate::exact(0.0)
    } else if ch.is_faded() {
        let (d2, g2) = (ch.d_mag_sq, ch.gamma_sq);
        normal_expect(4, est, |u| {
            let h2 = complex_gaussian_energy(d2, g2, u[0], u[1]);
            let r = OnToneLaw::perfect(a, h2).energy(u[2], u[3]);
            ToneLikelihood::perfect(a, h2).log_f(r)
        })?
        .scale(nu)
    } else {
        let law = OnToneLaw::perfect(a, ch.d_mag_sq);
        let tone = ToneLikelihood::perfect(a, ch.d_mag_sq);
        normal_expect(2, est, |u| tone.log_f(law.energy(u[0], u[1])))?.scale(nu)
    };
    Ok(CapacityResult::new(e, *ch, nu, snr, None, Scheme::ENERGY_PERFECT))
}
