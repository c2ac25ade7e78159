//! Low-power regime: first and second derivatives of capacity at zero SNR,
//! bit energy, wideband slope and bit-energy curves.
//!
//! Bit energies are received bit energies, `E|h|^2 snr log 2 / C` with `C`
//! in nats, reported in dB. The wideband slope `S0 = 2 C'(0)^2 / (-M C''(0))`
//! is in bits/s/Hz per 3 dB.

use std::f64::consts::{LN_2, PI};

use rayon::prelude::*;

use crate::capacity::{
    capacity, estimate_combination, normal_expect, CapacityProblem, CapacityResult, Detector, Estimator, Scheme,
};
use crate::channel::{ChannelParams, Csi, OnToneLaw, PeakConstraint, ToneLikelihood};
use crate::error::{Error, Result};
use crate::numerics::{complex_gaussian_energy, ln_i0, stencil_weights, Estimate, Stencil};

/// Linear ratio to dB.
pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Received `Eb/N0` in dB for capacity `c_nats` at `snr`; `+inf` when `c_nats <= 0`.
pub fn received_eb_n0_db(ch: &ChannelParams, snr: f64, c_nats: f64) -> f64 {
    if c_nats > 0.0 {
        to_db(ch.mean_power() * snr * LN_2 / c_nats)
    } else {
        f64::INFINITY
    }
}

/// Low-SNR characterization of one signaling regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowPowerSummary {
    /// `C'(0)` in nats per unit SNR.
    pub c_dot0: f64,
    /// `C''(0)`; `None` when no closed form is used, `-inf` when it diverges.
    pub c_ddot0: Option<f64>,
    /// `+inf` when `c_dot0 <= 0`.
    pub eb_n0_at_zero_se_db: f64,
    /// `None` while the minimum lies at a nonzero rate and has not been searched.
    pub eb_n0_min_db: Option<f64>,
    /// Zero when the minimum is approached as the rate vanishes.
    pub snr_at_min: f64,
    pub s0: f64,
    pub minimum_at_nonzero_rate: bool,
    pub regime: PeakConstraint,
    pub scheme: Scheme,
    pub channel: ChannelParams,
    pub m: usize,
    /// Duty factor under [`PeakConstraint::FixedPar`].
    pub nu: f64,
}

impl LowPowerSummary {
    #[allow(clippy::too_many_arguments)]
    fn from_derivatives(
        c_dot0: f64,
        c_ddot0: Option<f64>,
        ch: &ChannelParams,
        m: usize,
        nu: f64,
        regime: PeakConstraint,
        scheme: Scheme,
        concave: bool,
    ) -> Self {
        let eb_zero = if c_dot0 > 0.0 { to_db(ch.mean_power() * LN_2 / c_dot0) } else { f64::INFINITY };
        let s0 = match c_ddot0 {
            Some(cdd) if cdd == f64::NEG_INFINITY => 0.0,
            Some(cdd) => 2.0 * c_dot0 * c_dot0 / (-cdd * m as f64),
            None => 0.0,
        };
        let nonzero = !concave && (c_dot0 <= 0.0 || s0 < 0.0);
        Self {
            c_dot0,
            c_ddot0,
            eb_n0_at_zero_se_db: eb_zero,
            eb_n0_min_db: (!nonzero).then_some(eb_zero),
            snr_at_min: 0.0,
            s0,
            minimum_at_nonzero_rate: nonzero,
            regime,
            scheme,
            channel: *ch,
            m,
            nu,
        }
    }

    /// Locate the minimum numerically when it lies at a nonzero rate.
    pub fn refine_minimum(mut self, est: &Estimator, search: &MinSearch) -> Result<Self> {
        if !self.minimum_at_nonzero_rate {
            return Ok(self);
        }
        let min = minimum_bit_energy(&self.channel, self.m, self.nu, self.scheme, est, search)?;
        self.eb_n0_min_db = Some(min.eb_n0_min_db);
        self.snr_at_min = min.snr_at_min;
        Ok(self)
    }
}

fn check_eta(eta: f64) -> Result<()> {
    PeakConstraint::fixed_peak(eta).map(|_| ())
}

/// `E0[f^2] - 1` for the imperfect-CSI tone likelihood at peak SNR `eta`;
/// `None` when the moment diverges (`eta gamma^2 >= 1`).
pub fn imperfect_likelihood_second_moment_excess(ch: &ChannelParams, eta: f64) -> Option<f64> {
    let x = eta * ch.gamma_sq;
    if x >= 1.0 {
        return None;
    }
    let q = 1.0 - x * x;
    let ln_m = -(-x * x).ln_1p() + 2.0 * eta * eta * ch.gamma_sq * ch.d_mag_sq / q + ln_i0(2.0 * eta * ch.d_mag_sq / q);
    Some(ln_m.exp_m1())
}

/// `E[I0(2 eta |h|^2)] - 1` over Rician `h`; `None` when `2 eta gamma^2 >= 1`.
///
/// Averages the moment generating function of `|h|^2` over the angle in
/// `I0(z) = (1/pi) int_0^pi e^{z cos phi} dphi` with a trapezoid rule, which
/// converges geometrically for this smooth periodic integrand.
pub fn rician_i0_moment_excess(ch: &ChannelParams, eta: f64) -> Option<f64> {
    if 2.0 * eta * ch.gamma_sq >= 1.0 {
        return None;
    }
    let excess = |phi: f64| {
        let t = 2.0 * eta * phi.cos();
        let q = 1.0 - t * ch.gamma_sq;
        (-(-t * ch.gamma_sq).ln_1p() + t * ch.d_mag_sq / q).exp_m1()
    };
    let trapezoid = |n: usize| {
        let h = PI / n as f64;
        let inner: f64 = (1..n).map(|k| excess(k as f64 * h)).sum();
        (0.5 * (excess(0.0) + excess(PI)) + inner) / n as f64
    };
    let mut n = 64;
    let mut prev = trapezoid(n);
    while n < 1 << 22 {
        n *= 2;
        let next = trapezoid(n);
        if (next - prev).abs() <= 1e-13 * next.abs() || !next.is_finite() {
            return Some(next);
        }
        prev = next;
    }
    Some(prev)
}

/// Energy detection with a fixed duty factor.
///
/// `C'(0) = 0`, so the bit energy at zero rate is infinite and the minimum
/// is found numerically.
pub fn par_limited_summary(
    ch: &ChannelParams,
    m: usize,
    nu: f64,
    csi: Csi,
    est: &Estimator,
    search: &MinSearch,
) -> Result<LowPowerSummary> {
    PeakConstraint::FixedPar.signaling(m, nu, 1.0)?;
    let scheme = Scheme { detector: Detector::Energy, csi };
    LowPowerSummary::from_derivatives(0.0, None, ch, m, nu, PeakConstraint::FixedPar, scheme, false)
        .refine_minimum(est, search)
}

/// Energy detection under a fixed normalized peak power `eta`.
///
/// The capacity is concave in SNR, so the minimum bit energy is reached as
/// the rate vanishes.
pub fn peak_limited_energy_summary(
    ch: &ChannelParams,
    m: usize,
    eta: f64,
    csi: Csi,
    est: &Estimator,
) -> Result<LowPowerSummary> {
    check_eta(eta)?;
    if m == 0 {
        return Err(Error::Config("number of tones M must be at least 1".into()));
    }
    let regime = PeakConstraint::FixedPeak { eta };
    let (c_dot0, excess) = match csi {
        Csi::Imperfect => {
            let s = 1.0 + eta * ch.gamma_sq;
            let e_ln_i0 = if ch.d_mag_sq == 0.0 {
                0.0
            } else {
                let law = OnToneLaw::imperfect(ch, eta);
                let coef = ToneLikelihood::imperfect(ch, eta).bessel_coef;
                normal_expect(2, est, |u| ln_i0(coef * law.energy(u[0], u[1]).sqrt()))?.value
            };
            let c = ch.mean_power() - 2.0 * ch.d_mag_sq / s - s.ln() / eta + e_ln_i0 / eta;
            (c, imperfect_likelihood_second_moment_excess(ch, eta))
        }
        Csi::Perfect => {
            let e_ln_i0 = perfect_log_i0_mean(ch, eta, est)?.value;
            (e_ln_i0 / eta - ch.mean_power(), rician_i0_moment_excess(ch, eta))
        }
    };
    let c_ddot0 = match excess {
        Some(e) => -e / (eta * eta * m as f64),
        None => f64::NEG_INFINITY,
    };
    let scheme = Scheme { detector: Detector::Energy, csi };
    Ok(LowPowerSummary::from_derivatives(c_dot0, Some(c_ddot0), ch, m, 1.0, regime, scheme, true))
}

/// `E_h E_R[log I0(2 sqrt(eta |h|^2 R))]` with `R` the on-tone energy at peak SNR `eta`.
fn perfect_log_i0_mean(ch: &ChannelParams, eta: f64, est: &Estimator) -> Result<Estimate> {
    if ch.is_faded() {
        let (d2, g2) = (ch.d_mag_sq, ch.gamma_sq);
        normal_expect(4, est, |u| {
            let h2 = complex_gaussian_energy(d2, g2, u[0], u[1]);
            let r = OnToneLaw::perfect(eta, h2).energy(u[2], u[3]);
            ln_i0(2.0 * (eta * h2 * r).sqrt())
        })
    } else {
        let law = OnToneLaw::perfect(eta, ch.d_mag_sq);
        normal_expect(2, est, |u| ln_i0(2.0 * (eta * ch.d_mag_sq * law.energy(u[0], u[1])).sqrt()))
    }
}

/// OOFPSK with a fixed duty factor.
///
/// With side information the minimum is `log 2` at zero rate. Without it,
/// the zero-rate bit energy is `(1 + 1/K) log 2` and a negative wideband
/// slope (`(1 + K)^2 < M / nu`) moves the minimum to a nonzero rate; see
/// [`LowPowerSummary::refine_minimum`].
pub fn par_limited_oofpsk_summary(ch: &ChannelParams, m: usize, nu: f64, csi: Csi) -> Result<LowPowerSummary> {
    PeakConstraint::FixedPar.signaling(m, nu, 1.0)?;
    let mf = m as f64;
    let (c_dot0, c_ddot0) = match csi {
        Csi::Perfect => (ch.mean_power(), -ch.fourth_moment() / mf),
        Csi::Imperfect => {
            let p = ch.mean_power();
            (ch.d_mag_sq, -p * p / mf + ch.gamma_sq * ch.gamma_sq / nu)
        }
    };
    let scheme = Scheme { detector: Detector::Phase, csi };
    Ok(LowPowerSummary::from_derivatives(c_dot0, Some(c_ddot0), ch, m, nu, PeakConstraint::FixedPar, scheme, false))
}

/// OOFPSK under a fixed normalized peak power `eta`.
pub fn peak_limited_oofpsk_summary(ch: &ChannelParams, m: usize, eta: f64, csi: Csi) -> Result<LowPowerSummary> {
    check_eta(eta)?;
    if m == 0 {
        return Err(Error::Config("number of tones M must be at least 1".into()));
    }
    let (c_dot0, excess) = match csi {
        Csi::Perfect => (ch.mean_power(), rician_i0_moment_excess(ch, eta)),
        Csi::Imperfect => {
            (ch.mean_power() - (ch.gamma_sq * eta).ln_1p() / eta, imperfect_likelihood_second_moment_excess(ch, eta))
        }
    };
    let c_ddot0 = match excess {
        Some(e) => -e / (eta * eta * m as f64),
        None => f64::NEG_INFINITY,
    };
    let scheme = Scheme { detector: Detector::Phase, csi };
    Ok(LowPowerSummary::from_derivatives(
        c_dot0,
        Some(c_ddot0),
        ch,
        m,
        1.0,
        PeakConstraint::FixedPeak { eta },
        scheme,
        true,
    ))
}

/// Bit-energy minimization over SNR at a fixed duty factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinSearch {
    pub snr_lo: f64,
    pub snr_hi: f64,
    pub grid_points: usize,
    /// Final bracket width in `ln snr`.
    pub tolerance: f64,
}

impl Default for MinSearch {
    fn default() -> Self {
        Self { snr_lo: 1e-5, snr_hi: 1e2, grid_points: 40, tolerance: 1e-3 }
    }
}

impl MinSearch {
    pub fn grid(&self) -> Vec<f64> {
        log_grid(self.snr_lo, self.snr_hi, self.grid_points)
    }
}

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => (a + (b - a) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimumBitEnergy {
    pub eb_n0_min_db: f64,
    pub snr_at_min: f64,
    pub capacity: CapacityResult,
    /// The coarse grid minimum sat on an end of the search range.
    pub at_grid_boundary: bool,
}

/// Minimum received bit energy at fixed duty factor `nu`.
///
/// Evaluates a coarse log grid, then golden-section search on `ln snr`
/// inside the bracketing cells. Every evaluation uses the same estimator
/// seed so the objective is smooth in SNR.
pub fn minimum_bit_energy(
    ch: &ChannelParams,
    m: usize,
    nu: f64,
    scheme: Scheme,
    est: &Estimator,
    search: &MinSearch,
) -> Result<MinimumBitEnergy> {
    if !(search.snr_lo > 0.0 && search.snr_hi > search.snr_lo && search.grid_points >= 3 && search.tolerance > 0.0) {
        return Err(Error::Config(format!("invalid minimum search {search:?}")));
    }
    let eval = |snr: f64| -> Result<(f64, CapacityResult)> {
        let cfg = PeakConstraint::FixedPar.signaling(m, nu, snr)?;
        let c = capacity(ch, &cfg, scheme, est)?;
        Ok((received_eb_n0_db(ch, snr, c.nats_per_symbol), c))
    };
    let grid = search.grid();
    let values: Vec<(f64, CapacityResult)> = grid.par_iter().map(|&s| eval(s)).collect::<Result<_>>()?;
    let (best, _) = values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.0.is_finite())
        .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
        .ok_or_else(|| Error::Minimization("no SNR on the search grid gives positive capacity".into()))?;
    let n = grid.len();
    if best == 0 || best == n - 1 {
        let (eb, c) = values[best];
        return Ok(MinimumBitEnergy { eb_n0_min_db: eb, snr_at_min: grid[best], capacity: c, at_grid_boundary: true });
    }
    let (x, (eb, c)) = golden_section(
        |x| eval(x.exp()),
        grid[best - 1].ln(),
        grid[best + 1].ln(),
        search.tolerance,
        (grid[best].ln(), values[best]),
    )?;
    Ok(MinimumBitEnergy { eb_n0_min_db: eb, snr_at_min: x.exp(), capacity: c, at_grid_boundary: false })
}

/// Golden-section minimization of `f(x).0` on `[a, b]`, returning the best
/// point seen (including `seed`).
fn golden_section<T: Copy, F>(f: F, mut a: f64, mut b: f64, tol: f64, seed: (f64, (f64, T))) -> Result<(f64, (f64, T))>
where
    F: Fn(f64) -> Result<(f64, T)>,
{
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut best = seed;
    let mut keep = |x: f64, v: (f64, T)| {
        if v.0 < best.1 .0 {
            best = (x, v);
        }
        v.0
    };
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = keep(c, f(c)?);
    let mut fd = keep(d, f(d)?);
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = keep(c, f(c)?);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = keep(d, f(d)?);
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BitEnergyPoint {
    pub snr: f64,
    pub nu: f64,
    pub capacity: CapacityResult,
    /// `C / M` in bits/s/Hz.
    pub spectral_efficiency: f64,
    /// `+inf` where the capacity estimate is not positive.
    pub eb_n0_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BitEnergyCurve {
    pub points: Vec<BitEnergyPoint>,
    pub regime: PeakConstraint,
    pub scheme: Scheme,
    pub m: usize,
}

impl BitEnergyCurve {
    /// Point with the smallest finite bit energy.
    pub fn minimum(&self) -> Option<&BitEnergyPoint> {
        self.points.iter().filter(|p| p.eb_n0_db.is_finite()).min_by(|a, b| a.eb_n0_db.total_cmp(&b.eb_n0_db))
    }
}

/// Capacity, spectral efficiency and bit energy along an SNR grid.
///
/// Under a fixed peak the duty factor at each point is `snr / eta`.
pub fn bit_energy_curve(
    ch: &ChannelParams,
    snrs: &[f64],
    m: usize,
    regime: PeakConstraint,
    nu: f64,
    scheme: Scheme,
    est: &Estimator,
) -> Result<BitEnergyCurve> {
    if snrs.is_empty() || snrs.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
        return Err(Error::Config("SNR grid must be nonempty and positive".into()));
    }
    if snrs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("SNR grid must be strictly increasing".into()));
    }
    let points = snrs
        .par_iter()
        .map(|&snr| {
            let cfg = regime.signaling(m, nu, snr)?;
            let c = capacity(ch, &cfg, scheme, est)?;
            Ok(BitEnergyPoint {
                snr,
                nu: cfg.nu,
                capacity: c,
                spectral_efficiency: c.bits_per_symbol() / m as f64,
                eb_n0_db: received_eb_n0_db(ch, snr, c.nats_per_symbol),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BitEnergyCurve { points, regime, scheme, m })
}

/// One-sided finite-difference derivative of capacity at zero SNR with step `h`.
///
/// All stencil points share random numbers, so the returned standard error
/// is that of the difference itself.
#[allow(clippy::too_many_arguments)]
pub fn capacity_derivative_at_zero(
    ch: &ChannelParams,
    m: usize,
    regime: PeakConstraint,
    nu: f64,
    scheme: Scheme,
    order: u8,
    h: f64,
    est: &Estimator,
) -> Result<Estimate> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Config(format!("step must be positive, got {h}")));
    }
    let scale = h.powi(order as i32);
    let terms = stencil_weights(order, Stencil::OneSided)?
        .iter()
        .filter(|(k, _)| *k > 0.0)
        .map(|&(k, w)| Ok((w / scale, CapacityProblem::new(*ch, regime.signaling(m, nu, k * h)?, scheme))))
        .collect::<Result<Vec<_>>>()?;
    estimate_combination(&terms, est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{gauss_laguerre, McConfig};

    fn k(k: f64) -> ChannelParams {
        ChannelParams::from_rician_k(k).unwrap()
    }

    #[test]
    fn oofpsk_par_limited_slopes() {
        let s = par_limited_oofpsk_summary(&k(0.25), 2, 1.0, Csi::Imperfect).unwrap();
        assert!((s.s0 - (-0.285_714_285_714)).abs() < 1e-9, "{}", s.s0);
        assert!(s.minimum_at_nonzero_rate && s.eb_n0_min_db.is_none());
        let s = par_limited_oofpsk_summary(&k(1.0), 2, 1.0, Csi::Imperfect).unwrap();
        assert!((s.s0 - 1.0).abs() < 1e-12);
        assert!((s.eb_n0_at_zero_se_db - to_db(2.0 * LN_2)).abs() < 1e-12);
        let s = par_limited_oofpsk_summary(&ChannelParams::rayleigh(1.0).unwrap(), 4, 0.3, Csi::Perfect).unwrap();
        assert!((s.s0 - 1.0).abs() < 1e-12);
        assert!((s.eb_n0_min_db.unwrap() - to_db(LN_2)).abs() < 1e-12);
        let s = par_limited_oofpsk_summary(&k(0.0), 2, 1.0, Csi::Imperfect).unwrap();
        assert_eq!(s.eb_n0_at_zero_se_db, f64::INFINITY);
    }

    #[test]
    fn oofpsk_par_slope_sign_law() {
        for kk in [0.1, 0.5, 1.0, 3.0] {
            for (m, nu) in [(2, 1.0), (3, 0.5), (8, 1.0), (2, 0.1)] {
                let s = par_limited_oofpsk_summary(&k(kk), m, nu, Csi::Imperfect).unwrap();
                let sign = ((1.0 + kk) * (1.0 + kk) - m as f64 / nu).signum();
                assert_eq!(s.s0.signum(), sign);
            }
        }
    }

    #[test]
    fn oofpsk_peak_limited() {
        let s = peak_limited_oofpsk_summary(&k(1.0), 2, 1.0, Csi::Imperfect).unwrap();
        let expect = LN_2 / (1.0 - 1.5f64.ln());
        assert!((s.eb_n0_min_db.unwrap() - to_db(expect)).abs() < 1e-12);
        assert!((s.eb_n0_min_db.unwrap() - 0.667).abs() < 1e-3);
        let far = peak_limited_oofpsk_summary(&k(1.0), 2, 1e6, Csi::Imperfect).unwrap();
        assert!((far.eb_n0_min_db.unwrap() - to_db(LN_2)).abs() < 0.01);
        assert_eq!(far.s0, 0.0);

        let par = par_limited_oofpsk_summary(&k(1.0), 2, 1.0, Csi::Perfect).unwrap();
        for eta in [0.1, 0.5, 0.9] {
            let s = peak_limited_oofpsk_summary(&k(1.0), 2, eta, Csi::Perfect).unwrap();
            assert!(s.s0 < par.s0);
            assert!((s.eb_n0_min_db.unwrap() - to_db(LN_2)).abs() < 1e-12);
        }
        assert_eq!(
            peak_limited_oofpsk_summary(&k(1.0), 2, 2.0, Csi::Perfect).unwrap().c_ddot0,
            Some(f64::NEG_INFINITY)
        );
    }

    #[test]
    fn i0_moment_matches_series() {
        // Unfaded: E[I0(2 eta |d|^2)] exactly.
        let ch = ChannelParams::unfaded(0.7).unwrap();
        let e = rician_i0_moment_excess(&ch, 1.3).unwrap();
        assert!((e - (crate::numerics::bessel_i0(2.0 * 1.3 * 0.7).unwrap() - 1.0)).abs() < 1e-12);
        // Rayleigh: E[I0(2 eta |h|^2)] = sum_k (eta^k)^2 E|h|^{4k} / (k!)^2 = sum_k eta^{2k} (2k)! / (k!)^2.
        let ch = ChannelParams::rayleigh(1.0).unwrap();
        let eta: f64 = 0.2;
        let mut series = 0.0;
        let mut term = 1.0;
        for kk in 1..60 {
            let kf = kk as f64;
            term *= eta * eta * (2.0 * kf) * (2.0 * kf - 1.0) / (kf * kf);
            series += term;
        }
        let e = rician_i0_moment_excess(&ch, eta).unwrap();
        assert!((e - series).abs() < 1e-12 * series, "{e} vs {series}");
        assert!(rician_i0_moment_excess(&ch, 0.5).is_none());
    }

    #[test]
    fn imperfect_second_moment_matches_quadrature() {
        let ch = k(1.0);
        for eta in [0.3, 1.0, 1.8] {
            let tone = ToneLikelihood::imperfect(&ch, eta);
            // r = t / b absorbs the exponential growth of f^2 into the weight.
            let b = 1.0 - 2.0 * tone.slope;
            let q = gauss_laguerre(200)
                .unwrap()
                .expect(|t| (2.0 * (tone.offset + ln_i0(tone.bessel_coef * (t / b).sqrt()))).exp())
                / b
                - 1.0;
            let c = imperfect_likelihood_second_moment_excess(&ch, eta).unwrap();
            assert!((q - c).abs() < 1e-8 * c.max(1.0), "eta={eta}: {q} vs {c}");
        }
        assert!(imperfect_likelihood_second_moment_excess(&ch, 2.0).is_none());
    }

    #[test]
    fn energy_peak_limited() {
        let q = Estimator::Quadrature { order: 64 };
        let s =
            peak_limited_energy_summary(&ChannelParams::rayleigh(1.0).unwrap(), 2, 1.0, Csi::Imperfect, &q).unwrap();
        assert_eq!(s.s0, 0.0);
        assert_eq!(s.c_ddot0, Some(f64::NEG_INFINITY));
        let mut prev = f64::INFINITY;
        for eta in [1.0, 10.0, 100.0, 1000.0] {
            let s = peak_limited_energy_summary(&k(1.0), 2, eta, Csi::Imperfect, &q).unwrap();
            let eb = s.eb_n0_min_db.unwrap();
            assert!(eb < prev);
            prev = eb;
            if eta == 100.0 {
                assert!(eb < -1.3, "{eb}");
            }
        }
        assert!(prev > to_db(LN_2));
        let p =
            peak_limited_energy_summary(&k(1.0), 2, 0.4, Csi::Perfect, &Estimator::Quadrature { order: 32 }).unwrap();
        assert!(p.s0 > 0.0 && p.c_dot0 > 0.0);
    }

    #[test]
    fn received_normalization_is_scale_invariant() {
        let q = Estimator::Quadrature { order: 64 };
        let base = peak_limited_energy_summary(&k(1.0), 2, 3.0, Csi::Imperfect, &q).unwrap();
        for c in [0.5, 2.0] {
            let ch = k(1.0).scaled(c).unwrap();
            let s = peak_limited_energy_summary(&ch, 2, 3.0 / c, Csi::Imperfect, &q).unwrap();
            assert!((s.eb_n0_min_db.unwrap() - base.eb_n0_min_db.unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn derivative_stencil_matches_closed_form_limit() {
        // Large-M OOFPSK over Rayleigh has slope 1 at zero; finite M at
        // fixed PAR has slope |d|^2 = 0.5 for K = 1.
        let ch = k(1.0);
        let est = Estimator::Quadrature { order: 48 };
        let d =
            capacity_derivative_at_zero(&ch, 2, PeakConstraint::FixedPar, 1.0, Scheme::PHASE_IMPERFECT, 1, 1e-3, &est)
                .unwrap();
        assert!((d.value - 0.5).abs() < 5e-3, "{}", d.value);
    }

    #[test]
    fn curve_checks_grid_and_regime() {
        let est = Estimator::MonteCarlo(McConfig::new(2000, 1).unwrap());
        let ch = k(1.0);
        assert!(bit_energy_curve(&ch, &[0.2, 0.1], 2, PeakConstraint::FixedPar, 1.0, Scheme::ENERGY_IMPERFECT, &est)
            .is_err());
        let peak = PeakConstraint::fixed_peak(1.0).unwrap();
        assert!(bit_energy_curve(&ch, &[0.5, 2.0], 2, peak, 1.0, Scheme::ENERGY_IMPERFECT, &est).is_err());
        let c = bit_energy_curve(&ch, &[0.25, 0.5], 2, peak, 1.0, Scheme::ENERGY_IMPERFECT, &est).unwrap();
        assert_eq!(c.points[0].nu, 0.25);
        let p = &c.points[1];
        assert!((p.spectral_efficiency - p.capacity.bits_per_symbol() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, (v, ())) = golden_section(|x| Ok(((x - 0.3).powi(2), ())), -1.0, 1.0, 1e-8, (1.0, (0.49, ()))).unwrap();
        assert!((x - 0.3).abs() < 1e-7 && v < 1e-13);
    }
}
