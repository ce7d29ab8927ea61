//! Gauss-Hermite (probabilists') and Gauss-Legendre rules.

use super::hermite::{hermite_value, hermite_zeros, MAX_HERMITE_DEGREE};
use crate::{Error, Result};

/// Nodes and weights of a 1-D quadrature rule, nodes strictly increasing.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn apply(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// n-point Gauss-Hermite rule in the probabilistic convention:
/// `sum_k w_k f(h_k) ~ E[f(Z)]` for standard normal Z, exact for polynomials
/// of degree <= 2n-1. Weights are `n! / (n H_{n-1}(h_k))^2 * n!`-free form
/// `n!/(n^2 H_{n-1}(h_k)^2)` and are validated to sum to 1.
pub fn gauss_hermite_rule(n: usize) -> Result<QuadratureRule> {
    if n == 0 || n > MAX_HERMITE_DEGREE {
        return Err(Error::invalid(format!(
            "gauss_hermite_rule: size {n} outside 1..={MAX_HERMITE_DEGREE}"
        )));
    }
    let nodes = hermite_zeros(n)?;
    let nf = n as f64;
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    let weights: Vec<f64> = nodes
        .iter()
        .map(|&h| {
            let (_, hm1) = hermite_value(n, h);
            fact / (nf * nf * hm1 * hm1)
        })
        .collect();
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::NoConvergence {
            routine: "gauss_hermite_rule",
            detail: format!("weights sum to {sum} at n = {n}"),
        });
    }
    Ok(QuadratureRule { nodes, weights })
}

/// n-point Gauss-Legendre rule mapped to `[lo, hi]`.
pub fn gauss_legendre_rule(n: usize, lo: f64, hi: f64) -> Result<QuadratureRule> {
    if n == 0 || n > 512 {
        return Err(Error::invalid(format!(
            "gauss_legendre_rule: size {n} outside 1..=512"
        )));
    }
    if !(lo.is_finite() && hi.is_finite()) || lo > hi {
        return Err(Error::invalid(format!(
            "gauss_legendre_rule: bad interval [{lo}, {hi}]"
        )));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for k in 0..half {
        // Tricomi-style seed, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_value(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // cos seed runs from the largest root downward
        nodes[n - 1 - k] = x;
        nodes[k] = -x;
        weights[n - 1 - k] = w;
        weights[k] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    let mid = 0.5 * (lo + hi);
    let scale = 0.5 * (hi - lo);
    for i in 0..n {
        nodes[i] = mid + scale * nodes[i];
        weights[i] *= scale;
    }
    Ok(QuadratureRule { nodes, weights })
}

/// `(P_n(x), P_n'(x))` by the Legendre recurrence.
fn legendre_value(n: usize, x: f64) -> (f64, f64) {
    let mut prev = 1.0;
    let mut cur = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    let deriv = n as f64 * (x * cur - prev) / (x * x - 1.0);
    (cur, deriv)
}

/// Fixed-order Gauss-Legendre integration of `f` over `[lo, hi]`.
///
/// One panel by default; when the integrand magnitudes at the two endpoints
/// differ by more than a factor 1e6 (steep exponential growth), the interval
/// is split into 8 equal panels.
pub fn integrate_time(f: impl Fn(f64) -> f64, lo: f64, hi: f64, nodes: usize) -> Result<f64> {
    if lo > hi {
        return Err(Error::invalid(format!("integrate_time: lo {lo} > hi {hi}")));
    }
    if lo == hi {
        return Ok(0.0);
    }
    let (flo, fhi) = (f(lo).abs(), f(hi).abs());
    let tiny = f64::MIN_POSITIVE;
    let ratio = (flo.max(fhi) + tiny) / (flo.min(fhi) + tiny);
    let panels = if ratio > 1e6 { 8 } else { 1 };
    let step = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let a = lo + p as f64 * step;
        let rule = gauss_legendre_rule(nodes, a, a + step)?;
        total += rule.apply(&f);
    }
    Ok(total)
}
