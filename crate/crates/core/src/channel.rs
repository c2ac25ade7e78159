//! Channel and signaling parameters and the conditional output densities.
//!
//! Given input symbol `X = i`, the energies `R_j = |Y_j|^2` are independent,
//! `Exp(1)` off the signaled tone. On the signaled tone the density equals
//! `e^{-R} f(R)`, and every density here is reported through `log f` only:
//! the common factor `e^{-sum R_j}` cancels in every capacity integrand.

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::numerics::{complex_gaussian_energy, ln_i0};

/// Rician fading `h ~ CN(d, gamma_sq)`, described by `|d|^2` and `gamma_sq`.
///
/// `gamma_sq = 0` is the unfaded Gaussian channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub d_mag_sq: f64,
    pub gamma_sq: f64,
}

impl ChannelParams {
    pub fn new(d_mag_sq: f64, gamma_sq: f64) -> Result<Self> {
        let finite = d_mag_sq.is_finite() && gamma_sq.is_finite();
        if !finite || d_mag_sq < 0.0 || gamma_sq < 0.0 || d_mag_sq + gamma_sq <= 0.0 {
            return Err(Error::Config(format!(
                "channel needs |d|^2 >= 0, gamma^2 >= 0 and a positive sum, got |d|^2={d_mag_sq}, gamma^2={gamma_sq}"
            )));
        }
        Ok(Self { d_mag_sq, gamma_sq })
    }

    /// Unfaded channel with gain `|d|^2`.
    pub fn unfaded(d_mag_sq: f64) -> Result<Self> {
        Self::new(d_mag_sq, 0.0)
    }

    pub fn rayleigh(gamma_sq: f64) -> Result<Self> {
        Self::new(0.0, gamma_sq)
    }

    /// Unit-power channel (`E|h|^2 = 1`) with Rician factor `k`; `k = inf` gives the unfaded channel.
    pub fn from_rician_k(k: f64) -> Result<Self> {
        if k.is_nan() || k < 0.0 {
            return Err(Error::Config(format!("Rician factor must be >= 0, got {k}")));
        }
        if k.is_infinite() {
            return Self::unfaded(1.0);
        }
        Self::new(k / (1.0 + k), 1.0 / (1.0 + k))
    }

    /// `|d|^2 / gamma^2`, infinite when unfaded.
    pub fn rician_k(&self) -> f64 {
        if self.gamma_sq == 0.0 {
            f64::INFINITY
        } else {
            self.d_mag_sq / self.gamma_sq
        }
    }

    /// `E|h|^2`
    pub fn mean_power(&self) -> f64 {
        self.gamma_sq + self.d_mag_sq
    }

    /// `E|h|^4 = 2 gamma^4 + 4 gamma^2 |d|^2 + |d|^4`
    pub fn fourth_moment(&self) -> f64 {
        let g = self.gamma_sq;
        let d = self.d_mag_sq;
        2.0 * g * g + 4.0 * g * d + d * d
    }

    /// Kurtosis of the fading magnitude, `E|h|^4 / (E|h|^2)^2`.
    pub fn kurtosis(&self) -> f64 {
        self.fourth_moment() / self.mean_power().powi(2)
    }

    pub fn is_faded(&self) -> bool {
        self.gamma_sq > 0.0
    }

    /// Same Rician factor with both powers multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(c * self.d_mag_sq, c * self.gamma_sq)
    }
}

/// `M`-ary on-off signaling with duty factor `nu` at per-symbol `snr` (linear).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalingConfig {
    pub m: usize,
    pub nu: f64,
    pub snr: f64,
}

impl SignalingConfig {
    pub fn new(m: usize, nu: f64, snr: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Config("number of tones M must be at least 1".into()));
        }
        if !(nu > 0.0 && nu <= 1.0) {
            return Err(Error::Config(format!("duty factor must lie in (0, 1], got {nu}")));
        }
        if !(snr >= 0.0 && snr.is_finite()) {
            return Err(Error::Config(format!("SNR must be finite and >= 0, got {snr}")));
        }
        Ok(Self { m, nu, snr })
    }

    /// Peak (on-symbol) SNR `snr / nu`.
    pub fn alpha_sq(&self) -> f64 {
        self.snr / self.nu
    }

    pub fn peak_to_average(&self) -> f64 {
        1.0 / self.nu
    }

    pub fn with_snr(&self, snr: f64) -> Result<Self> {
        Self::new(self.m, self.nu, snr)
    }
}

/// How the duty factor moves as the SNR is swept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PeakConstraint {
    /// Duty factor held fixed (limited peak-to-average ratio).
    FixedPar,
    /// Normalized peak power `eta = A T / N0` held fixed, so `nu = snr / eta`.
    FixedPeak { eta: f64 },
}

impl PeakConstraint {
    pub fn fixed_peak(eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::Config(format!("peak power eta must be positive, got {eta}")));
        }
        Ok(PeakConstraint::FixedPeak { eta })
    }

    /// Signaling at `snr`; `nu` is used only under [`PeakConstraint::FixedPar`].
    pub fn signaling(&self, m: usize, nu: f64, snr: f64) -> Result<SignalingConfig> {
        match *self {
            PeakConstraint::FixedPar => SignalingConfig::new(m, nu, snr),
            PeakConstraint::FixedPeak { eta } => {
                if snr <= 0.0 || snr > eta {
                    return Err(Error::Config(format!("fixed peak eta={eta} admits 0 < SNR <= eta, got {snr}")));
                }
                SignalingConfig::new(m, snr / eta, snr)
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PeakConstraint::FixedPar => "fixed-par",
            PeakConstraint::FixedPeak { .. } => "fixed-peak",
        }
    }
}

/// Receiver fading side information.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Csi {
    /// The receiver knows the fading realization.
    Perfect,
    /// The receiver knows only the fading statistics.
    Imperfect,
}

impl Csi {
    pub fn as_str(self) -> &'static str {
        match self {
            Csi::Perfect => "perfect",
            Csi::Imperfect => "imperfect",
        }
    }
}

/// Per-tone energies `R_i = |Y_i|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyVector(Vec<f64>);

impl EnergyVector {
    pub fn new(r: Vec<f64>) -> Result<Self> {
        if r.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
            return Err(Error::Domain("energies must be finite and >= 0".into()));
        }
        Ok(Self(r))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// `log f(r) = offset + slope r + log I0(bessel_coef sqrt r)`, the log ratio
/// of the on-tone density to `e^{-r}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToneLikelihood {
    pub offset: f64,
    pub slope: f64,
    pub bessel_coef: f64,
}

impl ToneLikelihood {
    /// Known fading magnitude `|h|^2` at peak SNR `alpha_sq`.
    pub fn perfect(alpha_sq: f64, h_mag_sq: f64) -> Self {
        let a = alpha_sq * h_mag_sq;
        Self { offset: -a, slope: 0.0, bessel_coef: 2.0 * a.sqrt() }
    }

    /// Unknown Rician fading at peak SNR `alpha_sq`.
    pub fn imperfect(ch: &ChannelParams, alpha_sq: f64) -> Self {
        let s = 1.0 + ch.gamma_sq * alpha_sq;
        let spec = alpha_sq * ch.d_mag_sq;
        Self {
            offset: -(ch.gamma_sq * alpha_sq).ln_1p() - spec / s,
            slope: alpha_sq * ch.gamma_sq / s,
            bessel_coef: 2.0 * spec.sqrt() / s,
        }
    }

    #[inline]
    pub fn log_f(&self, r: f64) -> f64 {
        self.offset + self.slope * r + ln_i0(self.bessel_coef * r.sqrt())
    }
}

/// Law of the signaled tone's correlator output: `CN(mu, var)` with `|mu|^2 = mean_sq`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnToneLaw {
    pub mean_sq: f64,
    pub var: f64,
}

impl OnToneLaw {
    pub fn perfect(alpha_sq: f64, h_mag_sq: f64) -> Self {
        Self { mean_sq: alpha_sq * h_mag_sq, var: 1.0 }
    }

    pub fn imperfect(ch: &ChannelParams, alpha_sq: f64) -> Self {
        Self { mean_sq: alpha_sq * ch.d_mag_sq, var: 1.0 + ch.gamma_sq * alpha_sq }
    }

    /// Energy from two standard normals.
    #[inline]
    pub fn energy(&self, z0: f64, z1: f64) -> f64 {
        complex_gaussian_energy(self.mean_sq, self.var, z0, z1)
    }

    /// `E[R]`
    pub fn mean_energy(&self) -> f64 {
        self.mean_sq + self.var
    }
}

fn check_energy(r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("energy must be finite and >= 0, got {r}")))
    }
}

/// `log f(R_i, |h|, SNR)` for a receiver that knows `|h|`.
pub fn log_f_perfect(r: f64, h_mag: f64, cfg: &SignalingConfig) -> Result<f64> {
    check_energy(r)?;
    if !(h_mag >= 0.0 && h_mag.is_finite()) {
        return Err(Error::Domain(format!("fading magnitude must be finite and >= 0, got {h_mag}")));
    }
    Ok(ToneLikelihood::perfect(cfg.alpha_sq(), h_mag * h_mag).log_f(r))
}

/// `log f(R_i, SNR)` for a receiver that knows only the Rician statistics.
pub fn log_f_imperfect(r: f64, ch: &ChannelParams, cfg: &SignalingConfig) -> Result<f64> {
    check_energy(r)?;
    Ok(ToneLikelihood::imperfect(ch, cfg.alpha_sq()).log_f(r))
}

/// `log[(1 - nu) + (nu / M) sum_i exp(l_i)]` for per-tone log ratios `l_i`.
///
/// The common `e^{-sum R_j}` factor is excluded.
#[inline]
pub fn log_mixture_density(per_tone_log_f: &[f64], nu: f64) -> f64 {
    let m = per_tone_log_f.len() as f64;
    let mut max = f64::NEG_INFINITY;
    let mut min = f64::INFINITY;
    for &l in per_tone_log_f {
        max = max.max(l);
        min = min.min(l);
    }
    if max <= 1.0 && min >= -1.0 {
        // near-unit mixture: keep relative precision of the deviation
        let dev: f64 = per_tone_log_f.iter().map(|&l| l.exp_m1()).sum();
        return (nu / m * dev).ln_1p();
    }
    let lead = (nu / m).ln();
    let top = if nu < 1.0 { max.max((1.0 - nu).ln() - lead) } else { max };
    let mut sum: f64 = per_tone_log_f.iter().map(|&l| (l - top).exp()).sum();
    if nu < 1.0 {
        sum += ((-nu).ln_1p() - lead - top).exp();
    }
    lead + top + sum.ln()
}

/// What the receiver model knows about the fading when drawing outputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FadingState {
    /// Perfect side information: the realized magnitude `|h|`.
    Magnitude(f64),
    /// Imperfect side information: the Rician law.
    Unknown(ChannelParams),
}

/// Draw the energy vector for input symbol `x` (0 = silence, `1..=M` = tone).
pub fn sample_output_given_input<R: Rng + ?Sized>(
    x: usize,
    fading: &FadingState,
    cfg: &SignalingConfig,
    rng: &mut R,
) -> Result<EnergyVector> {
    if x > cfg.m {
        return Err(Error::Domain(format!("input symbol {x} outside 0..={}", cfg.m)));
    }
    let mut r: Vec<f64> = (0..cfg.m).map(|_| rng.sample(Exp1)).collect();
    if x >= 1 {
        let law = match *fading {
            FadingState::Magnitude(h) => OnToneLaw::perfect(cfg.alpha_sq(), h * h),
            FadingState::Unknown(ch) => OnToneLaw::imperfect(&ch, cfg.alpha_sq()),
        };
        let z0: f64 = rng.sample(StandardNormal);
        let z1: f64 = rng.sample(StandardNormal);
        r[x - 1] = law.energy(z0, z1);
    }
    Ok(EnergyVector(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{gauss_laguerre, log_bessel_i0};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(m: usize, nu: f64, snr: f64) -> SignalingConfig {
        SignalingConfig::new(m, nu, snr).unwrap()
    }

    #[test]
    fn zero_snr_gives_unit_ratio() {
        let ch = ChannelParams::new(0.3, 0.7).unwrap();
        for &r in &[0.0, 0.5, 3.0, 40.0] {
            assert_eq!(log_f_perfect(r, 1.3, &cfg(2, 0.5, 0.0)).unwrap(), 0.0);
            assert_eq!(log_f_imperfect(r, &ch, &cfg(2, 0.5, 0.0)).unwrap(), 0.0);
        }
    }

    #[test]
    fn zero_gain_is_noise() {
        assert_eq!(log_f_perfect(2.5, 0.0, &cfg(1, 1.0, 3.0)).unwrap(), 0.0);
    }

    #[test]
    fn perfect_reference_point() {
        // -1 + log I0(2), I0(2) by direct series
        let mut i0 = 0.0;
        let mut fact = 1.0;
        for k in 0..40 {
            if k > 0 {
                fact *= k as f64;
            }
            i0 += 1.0 / (fact * fact);
        }
        let v = log_f_perfect(1.0, 1.0, &cfg(1, 1.0, 1.0)).unwrap();
        assert!((v - (-1.0 + i0.ln())).abs() < 1e-13);
        assert!((i0.ln() - 0.823_0).abs() < 1e-3);
    }

    #[test]
    fn imperfect_rayleigh_reference_point() {
        let ch = ChannelParams::rayleigh(1.0).unwrap();
        let v = log_f_imperfect(2.0, &ch, &cfg(1, 1.0, 1.0)).unwrap();
        // direct formula: -log(g a + 1) + a (g r - d)/(g a + 1) + log I0(0)
        let direct = -(2.0f64).ln() + (2.0 - 0.0) / 2.0 + log_bessel_i0(0.0).unwrap();
        assert!((v - direct).abs() < 1e-14);
        assert!((v - 0.306_852_819_4).abs() < 1e-9);
    }

    #[test]
    fn mixture_examples() {
        assert_eq!(log_mixture_density(&[0.7], 1.0), 0.7f64.exp_m1().ln_1p());
        assert!((log_mixture_density(&[0.7], 1.0) - 0.7).abs() < 1e-15);
        assert_eq!(log_mixture_density(&[0.0, 0.0, 0.0], 0.3), 0.0);
        let v = log_mixture_density(&[0.0, 3f64.ln()], 0.5);
        assert!((v - 1.5f64.ln()).abs() < 1e-15);
        // large ratios take the log-sum-exp path without overflow
        let big = log_mixture_density(&[2000.0, -5.0], 1e-4);
        assert!((big - (2000.0 + (0.5e-4f64).ln())).abs() < 1e-9);
        let mixed = log_mixture_density(&[5.0, -3.0], 0.25);
        let direct = (0.75 + 0.125 * (5f64.exp() + (-3f64).exp())).ln();
        assert!((mixed - direct).abs() < 1e-14);
    }

    #[test]
    fn channel_validation_and_moments() {
        assert!(ChannelParams::new(0.0, 0.0).is_err());
        assert!(ChannelParams::new(-1.0, 1.0).is_err());
        let ch = ChannelParams::from_rician_k(1.0).unwrap();
        assert_eq!(ch.rician_k(), 1.0);
        assert!((ch.mean_power() - 1.0).abs() < 1e-15);
        assert!(ChannelParams::unfaded(1.0).unwrap().rician_k().is_infinite());
        assert_eq!(ChannelParams::rayleigh(1.0).unwrap().kurtosis(), 2.0);
        assert_eq!(ChannelParams::unfaded(2.0).unwrap().kurtosis(), 1.0);
        assert_eq!(ChannelParams::from_rician_k(f64::INFINITY).unwrap(), ChannelParams::unfaded(1.0).unwrap());
    }

    #[test]
    fn signaling_and_regimes() {
        assert!(SignalingConfig::new(0, 1.0, 1.0).is_err());
        assert!(SignalingConfig::new(2, 0.0, 1.0).is_err());
        assert!(SignalingConfig::new(2, 1.5, 1.0).is_err());
        assert_eq!(cfg(2, 0.25, 1.0).alpha_sq(), 4.0);
        let peak = PeakConstraint::fixed_peak(2.0).unwrap();
        let s = peak.signaling(2, 0.9, 0.5).unwrap();
        assert_eq!(s.nu, 0.25);
        assert!(peak.signaling(2, 0.9, 2.5).is_err());
        assert!(PeakConstraint::fixed_peak(0.0).is_err());
    }

    #[test]
    fn sampled_means() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 200_000;
        let c = cfg(2, 1.0, 2.0);
        let mut off = 0.0;
        let mut on = 0.0;
        for _ in 0..n {
            let r = sample_output_given_input(0, &FadingState::Magnitude(1.0), &c, &mut rng).unwrap();
            off += r.as_slice()[0];
            let r = sample_output_given_input(1, &FadingState::Magnitude(1.0), &c, &mut rng).unwrap();
            on += r.as_slice()[0];
        }
        // Exp(1): sd 1; noncentral with noncentrality 2: mean 3, var 1 + 2*2 = 5
        assert!((off / n as f64 - 1.0).abs() < 3.0 / (n as f64).sqrt());
        assert!((on / n as f64 - 3.0).abs() < 3.0 * 5f64.sqrt() / (n as f64).sqrt());

        let ch = ChannelParams::rayleigh(1.0).unwrap();
        let c = cfg(1, 1.0, 1.0);
        let mut on = 0.0;
        for _ in 0..n {
            on += sample_output_given_input(1, &FadingState::Unknown(ch), &c, &mut rng).unwrap().as_slice()[0];
        }
        // scale 2 exponential: mean 2, sd 2
        assert!((on / n as f64 - 2.0).abs() < 3.0 * 2.0 / (n as f64).sqrt());
        assert!(sample_output_given_input(3, &FadingState::Unknown(ch), &c, &mut rng).is_err());
    }

    fn normalization(ll: ToneLikelihood, scale: f64) -> f64 {
        // substitute r = scale * t so the Exp(1) weight absorbs the on-tone tail
        let rule = gauss_laguerre(128).unwrap();
        rule.expect(|t| {
            let r = scale * t;
            scale * (ll.log_f(r) - r + t).exp()
        })
    }

    #[test]
    fn densities_are_normalized() {
        for &(d2, g2) in &[(1.0, 0.0), (0.5, 0.5), (0.0, 1.0), (0.2, 0.8), (2.0, 0.3)] {
            let ch = ChannelParams::new(d2, g2).unwrap();
            for &a in &[0.1, 1.0, 4.0] {
                let s = 1.0 + g2 * a;
                let v = normalization(ToneLikelihood::imperfect(&ch, a), s);
                assert!((v - 1.0).abs() < 1e-8, "imperfect d2={d2} g2={g2} a={a}: {v}");
            }
        }
        for &h2 in &[0.0, 0.3, 1.0, 2.5] {
            for &a in &[0.1, 1.0, 4.0] {
                let v = normalization(ToneLikelihood::perfect(a, h2), 1.0);
                assert!((v - 1.0).abs() < 1e-8, "perfect h2={h2} a={a}: {v}");
            }
        }
    }

    proptest! {
        #[test]
        fn unfaded_imperfect_equals_perfect(r in 0.0f64..60.0, d2 in 0.01f64..4.0, snr in 0.0f64..20.0, nu in 0.01f64..1.0) {
            let ch = ChannelParams::unfaded(d2).unwrap();
            let c = cfg(2, nu, snr);
            let a = log_f_imperfect(r, &ch, &c).unwrap();
            let b = log_f_perfect(r, d2.sqrt(), &c).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }

        #[test]
        fn mixture_matches_direct_sum(l in proptest::collection::vec(-30.0f64..30.0, 1..6), nu in 0.01f64..1.0) {
            let m = l.len() as f64;
            let direct = ((1.0 - nu) + nu / m * l.iter().map(|x| x.exp()).sum::<f64>()).ln();
            let v = log_mixture_density(&l, nu);
            prop_assert!((v - direct).abs() <= 1e-12 * (1.0 + direct.abs()));
        }
    }
}
