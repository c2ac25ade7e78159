//! Seeded, schedule-independent Monte Carlo expectations.
//!
//! The sample index range is cut into fixed batches. Batch `b` draws from a
//! ChaCha8 stream selected by `set_stream(b)` on the configured seed, so the
//! estimate depends only on `(seed, sample_count, batch_size)` and not on how
//! rayon schedules the batches. Batch moments are merged in index order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};

pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_BATCH: u64 = 16_384;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub sample_count: u64,
    pub seed: u64,
    pub batch_size: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self { sample_count: DEFAULT_SAMPLES, seed: 0x0F5C_2007, batch_size: DEFAULT_BATCH }
    }
}

impl McConfig {
    pub fn new(sample_count: u64, seed: u64) -> Result<Self> {
        let cfg = Self { sample_count, seed, ..Self::default() };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_count == 0 {
            return Err(Error::Config("sample_count must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        Ok(())
    }

    /// Same budget on an independent seed derived from `tag`.
    pub fn derive(&self, tag: u64) -> Self {
        Self { seed: splitmix64(self.seed ^ splitmix64(tag)), ..*self }
    }

    pub fn with_samples(&self, sample_count: u64) -> Self {
        Self { sample_count, ..*self }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    MonteCarlo,
    Quadrature,
    ClosedForm,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::MonteCarlo => "mc",
            Method::Quadrature => "quadrature",
            Method::ClosedForm => "closed-form",
        }
    }
}

/// A scalar estimate. `std_error` is zero for deterministic methods.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub method: Method,
    pub samples: u64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self { value, std_error: 0.0, method: Method::ClosedForm, samples: 0 }
    }

    pub fn quadrature(value: f64) -> Self {
        Self { value, std_error: 0.0, method: Method::Quadrature, samples: 0 }
    }

    /// `a*self + b*other` for independent estimates.
    pub fn combine(self, a: f64, other: Estimate, b: f64) -> Estimate {
        let method = match (self.method, other.method) {
            (Method::MonteCarlo, _) | (_, Method::MonteCarlo) => Method::MonteCarlo,
            (Method::Quadrature, _) | (_, Method::Quadrature) => Method::Quadrature,
            _ => Method::ClosedForm,
        };
        Estimate {
            value: a * self.value + b * other.value,
            std_error: ((a * self.std_error).powi(2) + (b * other.std_error).powi(2)).sqrt(),
            method,
            samples: self.samples + other.samples,
        }
    }

    pub fn scale(self, a: f64) -> Estimate {
        Estimate { value: a * self.value, std_error: a.abs() * self.std_error, ..self }
    }

    pub fn shift(self, c: f64) -> Estimate {
        Estimate { value: self.value + c, ..self }
    }
}

/// Primitive variate driving one coordinate of an integrand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseVar {
    /// Exp(1)
    Exp1,
    /// N(0, 1)
    StdNormal,
}

#[inline]
pub fn draw_base<R: Rng + ?Sized>(dims: &[BaseVar], rng: &mut R, out: &mut [f64]) {
    for (slot, kind) in out.iter_mut().zip(dims) {
        *slot = match kind {
            BaseVar::Exp1 => rng.sample(Exp1),
            BaseVar::StdNormal => rng.sample(StandardNormal),
        };
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    #[inline]
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        Moments { n, mean, m2 }
    }
}

/// Monte Carlo mean of `g` over i.i.d. draws of the base vector `dims`.
///
/// Returns the sample mean with standard error `s / sqrt(N)`. A non-finite
/// integrand value aborts the estimate with the offending global sample index.
pub fn mc_mean<F>(dims: &[BaseVar], cfg: &McConfig, g: F) -> Result<Estimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    mc_mean_with(dims, cfg, || (), |u, _| g(u))
}

/// [`mc_mean`] with per-batch scratch state built by `init`.
pub fn mc_mean_with<S, I, F>(dims: &[BaseVar], cfg: &McConfig, init: I, g: F) -> Result<Estimate>
where
    I: Fn() -> S + Sync,
    F: Fn(&[f64], &mut S) -> f64 + Sync,
{
    mc_mean_rng(
        cfg,
        || (vec![0.0; dims.len()], init()),
        |rng, (buf, scratch)| {
            draw_base(dims, rng, buf);
            g(buf, scratch)
        },
    )
}

/// Generator handed to [`mc_mean_rng`] samplers.
pub type McRng = ChaCha8Rng;

/// Monte Carlo mean of a sampler that draws its own variates from the batch
/// generator; `init` builds per-batch scratch state.
pub fn mc_mean_rng<S, I, F>(cfg: &McConfig, init: I, g: F) -> Result<Estimate>
where
    I: Fn() -> S + Sync,
    F: Fn(&mut McRng, &mut S) -> f64 + Sync,
{
    cfg.validate()?;
    let n = cfg.sample_count;
    let batches = n.div_ceil(cfg.batch_size);
    let partials: Vec<Result<Moments>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(b);
            let start = b * cfg.batch_size;
            let end = (start + cfg.batch_size).min(n);
            let mut scratch = init();
            let mut m = Moments::default();
            for index in start..end {
                let v = g(&mut rng, &mut scratch);
                if !v.is_finite() {
                    return Err(Error::Estimation { index, reason: format!("integrand returned {v}") });
                }
                m.push(v);
            }
            Ok(m)
        })
        .collect();
    let mut total = Moments::default();
    for p in partials {
        total = total.merge(p?);
    }
    let var = if total.n > 1 { total.m2 / (total.n - 1) as f64 } else { 0.0 };
    Ok(Estimate {
        value: total.mean,
        std_error: (var / total.n as f64).sqrt(),
        method: Method::MonteCarlo,
        samples: total.n,
    })
}

/// Distributions accepted by [`mc_expectation`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampler {
    /// `m` i.i.d. Exp(1) coordinates.
    Exp1Vector { m: usize },
    /// `|h|` for `h ~ CN(d, gamma_sq)`, with `d_mag_sq = |d|^2`.
    RicianMagnitude { d_mag_sq: f64, gamma_sq: f64 },
    /// `R = |sqrt(noncentrality) + sqrt(scale) w|^2` with `w ~ CN(0, 1)`;
    /// mean `noncentrality + scale`.
    NoncentralChiSq { noncentrality: f64, scale: f64 },
}

impl Sampler {
    fn dims(&self) -> Vec<BaseVar> {
        match *self {
            Sampler::Exp1Vector { m } => vec![BaseVar::Exp1; m],
            _ => vec![BaseVar::StdNormal; 2],
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Sampler::Exp1Vector { m } => m >= 1,
            Sampler::RicianMagnitude { d_mag_sq, gamma_sq } => {
                d_mag_sq >= 0.0 && gamma_sq >= 0.0 && d_mag_sq.is_finite() && gamma_sq.is_finite()
            }
            Sampler::NoncentralChiSq { noncentrality, scale } => {
                noncentrality >= 0.0 && scale >= 0.0 && noncentrality.is_finite() && scale.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid sampler parameters {self:?}")))
        }
    }

    /// Map standard base variates to a draw of this sampler.
    pub fn transform(&self, base: &[f64], out: &mut Vec<f64>) {
        out.clear();
        match *self {
            Sampler::Exp1Vector { .. } => out.extend_from_slice(base),
            Sampler::RicianMagnitude { d_mag_sq, gamma_sq } => {
                out.push(complex_gaussian_energy(d_mag_sq, gamma_sq, base[0], base[1]).sqrt())
            }
            Sampler::NoncentralChiSq { noncentrality, scale } => {
                out.push(complex_gaussian_energy(noncentrality, scale, base[0], base[1]))
            }
        }
    }
}

/// `|mu + sqrt(var) (z0 + i z1)/sqrt 2|^2` for real `mu = sqrt(mean_sq)` and standard normals `z0, z1`.
#[inline]
pub fn complex_gaussian_energy(mean_sq: f64, var: f64, z0: f64, z1: f64) -> f64 {
    let sd = (0.5 * var).sqrt();
    let re = mean_sq.sqrt() + sd * z0;
    let im = sd * z1;
    re * re + im * im
}

/// Expectation of `integrand` under `sampler`.
pub fn mc_expectation<F>(sampler: Sampler, integrand: F, cfg: &McConfig) -> Result<Estimate>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    sampler.validate()?;
    let dims = sampler.dims();
    mc_mean(&dims, cfg, |base| {
        let mut draw = Vec::with_capacity(base.len());
        sampler.transform(base, &mut draw);
        integrand(&draw)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn within(e: &Estimate, target: f64, k: f64) -> bool {
        (e.value - target).abs() <= k * e.std_error
    }

    #[test]
    fn exp1_mean() {
        let cfg = McConfig::new(1_000_000, 1).unwrap();
        let e = mc_expectation(Sampler::Exp1Vector { m: 1 }, |x| x[0], &cfg).unwrap();
        assert!(within(&e, 1.0, 3.0), "{e:?}");
        assert_eq!(e.method, Method::MonteCarlo);
    }

    #[test]
    fn rayleigh_power() {
        let cfg = McConfig::new(1_000_000, 2).unwrap();
        let s = Sampler::RicianMagnitude { d_mag_sq: 0.0, gamma_sq: 1.0 };
        let e = mc_expectation(s, |x| x[0] * x[0], &cfg).unwrap();
        assert!(within(&e, 1.0, 3.0), "{e:?}");
    }

    #[test]
    fn noncentral_moment_identity() {
        // eta = 1, gamma^2 = 0.5, |d|^2 = 0.5
        let cfg = McConfig::new(1_000_000, 3).unwrap();
        let s = Sampler::NoncentralChiSq { noncentrality: 0.5, scale: 1.5 };
        let e = mc_expectation(s, |x| x[0], &cfg).unwrap();
        assert!(within(&e, 2.0, 3.0), "{e:?}");
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = McConfig { sample_count: 50_000, seed: 9, batch_size: 1000 };
        let dims = [BaseVar::Exp1, BaseVar::StdNormal];
        let a = mc_mean(&dims, &cfg, |u| u[0] * u[1].cos()).unwrap();
        let b = mc_mean(&dims, &cfg, |u| u[0] * u[1].cos()).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        let c = mc_mean(&dims, &cfg.derive(1), |u| u[0] * u[1].cos()).unwrap();
        assert_ne!(a.value, c.value);
    }

    #[test]
    fn schedule_independent() {
        let cfg = McConfig { sample_count: 40_000, seed: 5, batch_size: 1000 };
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let dims = [BaseVar::Exp1];
        let a = mc_mean(&dims, &cfg, |u| u[0].sqrt()).unwrap();
        let b = pool.install(|| mc_mean(&dims, &cfg, |u| u[0].sqrt()).unwrap());
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn non_finite_sample_reports_index() {
        let cfg = McConfig { sample_count: 100, seed: 0, batch_size: 10 };
        let err = mc_mean(&[BaseVar::Exp1], &cfg, |_| f64::NAN).unwrap_err();
        match err {
            Error::Estimation { index, .. } => assert_eq!(index, 0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(McConfig::new(0, 1).is_err());
    }

    #[test]
    fn doubling_samples_shrinks_error() {
        let mut ratios = Vec::new();
        for seed in 0..6 {
            let small = McConfig::new(20_000, seed).unwrap();
            let big = small.with_samples(40_000);
            let a = mc_mean(&[BaseVar::Exp1], &small, |u| u[0]).unwrap();
            let b = mc_mean(&[BaseVar::Exp1], &big, |u| u[0]).unwrap();
            ratios.push(b.std_error / a.std_error);
        }
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        assert!((0.6..=0.9).contains(&mean), "ratio {mean}");
    }
}
