use crate::error::{Error, Result};

/// Which side of `x0` a finite-difference stencil samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stencil {
    Central,
    /// Forward-only points on `[x0, x0 + 3h]`, for derivatives at a boundary such as SNR = 0.
    OneSided,
}

/// `(offset in units of h, weight)` pairs; the derivative is `sum w f(x0 + k h) / h^order`.
pub fn stencil_weights(order: u8, stencil: Stencil) -> Result<&'static [(f64, f64)]> {
    Ok(match (order, stencil) {
        (1, Stencil::Central) => &[(-1.0, -0.5), (1.0, 0.5)],
        (2, Stencil::Central) => &[(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)],
        (1, Stencil::OneSided) => &[(0.0, -1.5), (1.0, 2.0), (2.0, -0.5)],
        (2, Stencil::OneSided) => &[(0.0, 2.0), (1.0, -5.0), (2.0, 4.0), (3.0, -1.0)],
        _ => return Err(Error::Config(format!("derivative order must be 1 or 2, got {order}"))),
    })
}

/// Finite-difference derivative of `f` at `x0` with step `h`.
///
/// Both stencils are second-order accurate in `h`.
pub fn central_difference<F: Fn(f64) -> f64>(f: F, x0: f64, h: f64, order: u8, stencil: Stencil) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Config(format!("step must be positive, got {h}")));
    }
    let weights = stencil_weights(order, stencil)?;
    let mut acc = 0.0;
    for (i, &(k, w)) in weights.iter().enumerate() {
        let v = f(x0 + k * h);
        if !v.is_finite() {
            return Err(Error::Estimation { index: i as u64, reason: format!("f({}) = {v}", x0 + k * h) });
        }
        acc += w * v;
    }
    Ok(acc / h.powi(order as i32))
}
