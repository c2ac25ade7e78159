//! Modified Bessel function of the first kind, order zero, in the log domain.
//!
//! Every density in this crate multiplies `exp(-a)` by `I0(b)` with `b`
//! growing like the square root of the received energy, so `I0` is never
//! formed directly. Up to [`SERIES_LIMIT`] the ascending power series is
//! summed, which keeps full relative precision of `log I0(x) ~ x^2/4` near
//! zero. Beyond it `e^{-x} I0(x)` is a Chebyshev expansion on `[2, 8]` and
//! `sqrt(x) e^{-x} I0(x)` one in `16/x - 1` on `[8, inf)`.

use crate::error::{Error, Result};

/// Largest argument handled by the power series.
pub const SERIES_LIMIT: f64 = 2.0;

const SERIES_TERMS: usize = 24;

const INV_K_SQUARED: [f64; SERIES_TERMS] = {
    let mut t = [0.0; SERIES_TERMS];
    let mut k = 1;
    while k < SERIES_TERMS {
        t[k] = 1.0 / ((k * k) as f64);
        k += 1;
    }
    t
};

// e^{-x} I0(x) at x = 3t + 5, t in [-1, 1]
#[allow(clippy::excessive_precision)]
const CHEB_MID: [f64; 25] = [
    0.2026545816963061857,
    -0.075301132859105631544,
    0.021009076548088394711,
    -0.0065092152177023661584,
    0.0020841295941255030656,
    -0.00066323769410926706477,
    0.00020447887099303193033,
    -0.000060084996919960706954,
    0.00001666854477411227464,
    -4.3448659069586604977e-6,
    1.062340878320291842e-6,
    -2.4368804943711353749e-7,
    5.2509005029147291257e-8,
    -1.0647984423707816566e-8,
    2.0364193995706203703e-9,
    -3.6814071073467946149e-10,
    6.3050697227614533658e-11,
    -1.0253058598220252206e-11,
    1.5864396362567645411e-12,
    -2.3403089423113130093e-13,
    3.2978168905694134399e-14,
    -4.4469160284981963644e-15,
    5.7477559001699618713e-16,
    -7.132266115074426678e-17,
    8.5091660779887800121e-18,
];

// sqrt(x) e^{-x} I0(x) at x = 16 / (u + 1), u in (-1, 1]
#[allow(clippy::excessive_precision)]
const CHEB_TAIL: [f64; 27] = [
    0.4022452055070544158,
    0.0033691164782556940899,
    0.000068897583469168239843,
    2.891370520834756483e-6,
    2.0489185894690637418e-7,
    2.2666689904981780646e-8,
    3.3962320257083863452e-9,
    4.9406023882249695891e-10,
    1.1889147107846438342e-11,
    -3.1499165279632413645e-11,
    -1.3215811840447713119e-11,
    -1.7941785315068061178e-12,
    7.1801244513836662337e-13,
    3.8527783827421427011e-13,
    1.5400862175214098269e-14,
    -4.1505693472872220866e-14,
    -9.5548466988283076487e-15,
    3.8116806693526224207e-15,
    1.7725601330565263836e-15,
    -3.4254856196772191346e-16,
    -2.8276239805165834849e-16,
    3.4612228676974610931e-17,
    4.465621420296759999e-17,
    -4.8305044859441820713e-18,
    -7.2331804878747539546e-18,
    9.9214754121736985989e-19,
    1.1936508908459820855e-18,
];

/// `log I0(x)` for `x >= 0`, with domain checking.
pub fn log_bessel_i0(x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!("log_bessel_i0 requires finite x >= 0, got {x}")));
    }
    Ok(ln_i0(x))
}

/// Unchecked `log I0(x)` for hot loops. The argument must be finite and nonnegative.
#[inline]
pub fn ln_i0(x: f64) -> f64 {
    debug_assert!(x >= 0.0 && x.is_finite(), "ln_i0 argument {x}");
    if x <= SERIES_LIMIT {
        ln_i0_series(x)
    } else if x <= 8.0 {
        x + clenshaw(&CHEB_MID, (x - 5.0) / 3.0).ln()
    } else {
        x - 0.5 * x.ln() + clenshaw(&CHEB_TAIL, 16.0 / x - 1.0).ln()
    }
}

#[inline]
fn ln_i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut tail = 0.0;
    for inv in INV_K_SQUARED.iter().skip(1) {
        term *= q * inv;
        tail += term;
        if term <= 1e-17 * (1.0 + tail) {
            break;
        }
    }
    tail.ln_1p()
}

/// `sum_k c_k T_k(t)`.
#[inline]
fn clenshaw(c: &[f64], t: f64) -> f64 {
    let two_t = 2.0 * t;
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c[1..].iter().rev() {
        let b0 = ck + two_t * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + t * b1 - b2
}

/// `I0(x)` itself; overflows to `+inf` beyond `x ~ 713`.
pub fn bessel_i0(x: f64) -> Result<f64> {
    log_bessel_i0(x).map(f64::exp)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series_oracle(x: f64, terms: usize) -> f64 {
        // direct sum of (x/2)^{2k}/(k!)^2 with explicit factorials
        let mut sum = 0.0;
        let mut fact = 1.0;
        for k in 0..terms {
            if k > 0 {
                fact *= k as f64;
            }
            sum += (x / 2.0).powi(2 * k as i32) / (fact * fact);
        }
        sum.ln()
    }

    fn asymptotic_oracle(x: f64, order: usize) -> f64 {
        let mut sum = 1.0;
        let mut coef = 1.0;
        for k in 1..=order {
            let odd = (2 * k - 1) as f64;
            coef *= odd * odd / (8.0 * k as f64);
            sum += coef / x.powi(k as i32);
        }
        x - 0.5 * (2.0 * std::f64::consts::PI * x).ln() + sum.ln()
    }

    #[test]
    fn zero_is_zero() {
        assert_eq!(log_bessel_i0(0.0).unwrap(), 0.0);
    }

    #[test]
    fn one_matches_series() {
        let oracle = series_oracle(1.0, 40);
        let v = log_bessel_i0(1.0).unwrap();
        assert!((v - oracle).abs() < 1e-12 * oracle, "{v} vs {oracle}");
        assert!((v - 0.235_914_358_507_178_1).abs() < 1e-12);
    }

    #[test]
    fn seven_hundred_matches_two_truncations() {
        let a = asymptotic_oracle(700.0, 4);
        let b = asymptotic_oracle(700.0, 8);
        assert!(((a - b) / b).abs() < 1e-9);
        let v = log_bessel_i0(700.0).unwrap();
        assert!(((v - b) / b).abs() < 1e-12);
        assert!((v - 695.806).abs() < 1e-3, "{v}");
    }

    #[test]
    fn branches_agree_near_crossover() {
        for (x, reference) in [
            (15.0, 12.735_669_109_476_906),
            (20.0, 17.589_610_428_244_274),
            (25.0, 22.476_728_004_999_244),
            (40.0, 37.239_786_861_352_36),
        ] {
            assert!(((ln_i0(x) - reference) / reference).abs() < 1e-15, "x={x}");
        }
        for &x in &[1.9, 2.0, 2.1, 5.0, 7.9, 8.0, 8.1, 12.0] {
            let s = series_oracle(x, 80);
            assert!(((ln_i0(x) - s) / s).abs() < 1e-14, "x={x}: {} vs {s}", ln_i0(x));
        }
    }

    #[test]
    fn small_arguments_keep_relative_precision() {
        for &x in &[1e-8, 1e-5, 1e-3, 0.1] {
            let v = ln_i0(x);
            let lead = x * x / 4.0 - x.powi(4) / 64.0 + x.powi(6) / 576.0;
            assert!(((v - lead) / lead).abs() < 1e-8, "x={x}");
        }
    }

    #[test]
    fn huge_arguments_do_not_overflow() {
        let v = ln_i0(1e8);
        assert!(v.is_finite());
        let expected = 1e8 - 0.5 * (std::f64::consts::TAU * 1e8).ln() + (1.0 / 8e8f64).ln_1p();
        assert!(((v - expected) / expected).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_domain() {
        assert!(log_bessel_i0(-1.0).is_err());
        assert!(log_bessel_i0(f64::NAN).is_err());
        assert!(log_bessel_i0(f64::INFINITY).is_err());
    }
}
