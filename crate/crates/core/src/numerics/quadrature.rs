//! Gauss-Laguerre and Gauss-Hermite rules normalized as expectations.
//!
//! Laguerre rules integrate against `e^{-x}` on `[0, inf)`, i.e. they are
//! expectations under Exp(1). Hermite rules use the probabilists' weight, so
//! they are expectations under N(0, 1). Nodes come from the Golub-Welsch
//! eigenproblem and are then polished by Newton steps on the three-term
//! recurrence; weights are the Christoffel numbers `1 / sum_k p_k(x)^2` of the
//! orthonormal polynomials, accumulated with rescaling so that large Laguerre
//! nodes do not overflow.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleKind {
    GaussLaguerre,
    GaussHermite,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub kind: RuleKind,
    pub order: usize,
    pub nodes: Vec<f64>,
    /// Weights that underflow `f64` (far Laguerre tail, order > ~180) are stored as zero.
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Weighted sum `sum_i w_i g(x_i)`.
    pub fn expect<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * g(x)).sum()
    }
}

/// Gauss-Laguerre rule of the given order (expectation under Exp(1)).
pub fn gauss_laguerre(order: usize) -> Result<QuadratureRule> {
    build(RuleKind::GaussLaguerre, order)
}

/// Gauss-Hermite rule of the given order (expectation under N(0,1)).
pub fn gauss_hermite(order: usize) -> Result<QuadratureRule> {
    build(RuleKind::GaussHermite, order)
}

// Recurrence b_{k+1} p_{k+1} = (x - a_k) p_k - b_k p_{k-1} for orthonormal p_k.
fn diag(kind: RuleKind, k: usize) -> f64 {
    match kind {
        RuleKind::GaussLaguerre => (2 * k + 1) as f64,
        RuleKind::GaussHermite => 0.0,
    }
}

fn offdiag(kind: RuleKind, k: usize) -> f64 {
    match kind {
        RuleKind::GaussLaguerre => k as f64,
        RuleKind::GaussHermite => (k as f64).sqrt(),
    }
}

struct Evaluation {
    /// p_n(x) / p_n'(x)
    newton_ratio: f64,
    /// ln of sum_{k<n} p_k(x)^2
    ln_christoffel_sum: f64,
}

fn evaluate(kind: RuleKind, n: usize, x: f64) -> Evaluation {
    const BIG: f64 = 1e100;
    let mut p_prev = 0.0;
    let mut p = 1.0;
    let mut dp_prev = 0.0;
    let mut dp = 0.0;
    let mut sum = 0.0;
    let mut ln_scale = 0.0;
    for k in 0..n {
        sum += p * p;
        let b_next = offdiag(kind, k + 1);
        let b_k = offdiag(kind, k);
        let a_k = diag(kind, k);
        let p_next = ((x - a_k) * p - b_k * p_prev) / b_next;
        let dp_next = (p + (x - a_k) * dp - b_k * dp_prev) / b_next;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
        if p.abs() > BIG || dp.abs() > BIG {
            let c = 1.0 / BIG;
            p *= c;
            p_prev *= c;
            dp *= c;
            dp_prev *= c;
            sum *= c * c;
            ln_scale += BIG.ln();
        }
    }
    Evaluation { newton_ratio: p / dp, ln_christoffel_sum: sum.ln() + 2.0 * ln_scale }
}

fn build(kind: RuleKind, order: usize) -> Result<QuadratureRule> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::Config(format!("quadrature order must lie in 1..={MAX_ORDER}, got {order}")));
    }
    let mut jacobi = DMatrix::<f64>::zeros(order, order);
    for k in 0..order {
        jacobi[(k, k)] = diag(kind, k);
        if k + 1 < order {
            let b = offdiag(kind, k + 1);
            jacobi[(k, k + 1)] = b;
            jacobi[(k + 1, k)] = b;
        }
    }
    let mut nodes: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));

    let mut weights = Vec::with_capacity(order);
    for x in nodes.iter_mut() {
        for _ in 0..8 {
            let step = evaluate(kind, order, *x).newton_ratio;
            *x -= step;
            if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300) {
                break;
            }
        }
        weights.push((-evaluate(kind, order, *x).ln_christoffel_sum).exp());
    }
    if kind == RuleKind::GaussHermite {
        // symmetric rule: pin the odd-order middle node and mirror the rest
        for i in 0..order / 2 {
            let j = order - 1 - i;
            let x = 0.5 * (nodes[j] - nodes[i]);
            let w = 0.5 * (weights[i] + weights[j]);
            nodes[i] = -x;
            nodes[j] = x;
            weights[i] = w;
            weights[j] = w;
        }
        if order % 2 == 1 {
            nodes[order / 2] = 0.0;
        }
    }
    Ok(QuadratureRule { kind, order, nodes, weights })
}

/// Tensor-product expectation over a list of one-dimensional rules.
///
/// `g` receives one node per rule. The cost is the product of the orders.
pub fn tensor_expect<F: Fn(&[f64]) -> f64>(rules: &[&QuadratureRule], g: F) -> f64 {
    let dims = rules.len();
    if dims == 0 {
        return g(&[]);
    }
    let mut idx = vec![0usize; dims];
    let mut point: Vec<f64> = rules.iter().map(|r| r.nodes[0]).collect();
    let mut total = 0.0;
    loop {
        let w: f64 = idx.iter().zip(rules).map(|(&i, r)| r.weights[i]).product();
        if w > 0.0 {
            total += w * g(&point);
        }
        let mut d = dims;
        loop {
            if d == 0 {
                return total;
            }
            d -= 1;
            idx[d] += 1;
            if idx[d] < rules[d].order {
                point[d] = rules[d].nodes[idx[d]];
                break;
            }
            idx[d] = 0;
            point[d] = rules[d].nodes[0];
        }
    }
}
