//! Special functions, quadrature, Monte Carlo and finite differences.

mod bessel;
mod diff;
mod montecarlo;
mod quadrature;

pub use bessel::{bessel_i0, ln_i0, log_bessel_i0, SERIES_LIMIT};
pub use diff::{central_difference, stencil_weights, Stencil};
pub use montecarlo::{
    complex_gaussian_energy, draw_base, mc_expectation, mc_mean, mc_mean_rng, mc_mean_with, BaseVar, Estimate,
    McConfig, McRng, Method, Sampler, DEFAULT_BATCH, DEFAULT_SAMPLES,
};
pub use quadrature::{gauss_hermite, gauss_laguerre, tensor_expect, QuadratureRule, RuleKind, MAX_ORDER};

/// Default Gauss rule order.
pub const DEFAULT_QUADRATURE_ORDER: usize = 64;
