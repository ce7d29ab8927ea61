//! Probabilists' Hermite polynomials H_n and their zeros.
//!
//! H_0 = 1, H_1 = z, H_{n+1} = z H_n - n H_{n-1}. These are orthogonal under
//! the standard normal weight; their zeros are the abscissas of the
//! Gauss-Hermite rule in the probabilistic convention.

use super::polynomial::Polynomial;
use crate::{Error, Result};

/// Degrees above this overflow nothing yet, but the dense monomial
/// representation and the zero brackets degrade; callers get an error instead
/// of silently bad roots.
pub(crate) const MAX_HERMITE_DEGREE: usize = 64;

/// Monomial coefficients of H_n.
pub fn hermite_polynomial(n: usize) -> Polynomial {
    let mut prev = Polynomial::constant(1.0);
    if n == 0 {
        return prev;
    }
    let mut cur = Polynomial::new(vec![0.0, 1.0]);
    for k in 1..n {
        // H_{k+1} = z H_k - k H_{k-1}
        let next = cur.mul_linear(0.0).add(&prev.scale(-(k as f64)));
        prev = cur;
        cur = next;
    }
    cur
}

/// Evaluate `(H_n(z), H_{n-1}(z))` by the value recurrence, which is stable
/// where the monomial form is not. For n = 0 the second entry is 0.
pub fn hermite_value(n: usize, z: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = 1.0;
    for k in 0..n {
        let next = z * cur - (k as f64) * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Strictly increasing zeros of H_n.
///
/// Built degree by degree: the zeros of H_{k+1} interlace those of H_k, so
/// each root has a guaranteed bracket refined by safeguarded Newton. Final
/// roots are symmetrized about 0.
pub fn hermite_zeros(n: usize) -> Result<Vec<f64>> {
    if n == 0 || n > MAX_HERMITE_DEGREE {
        return Err(Error::invalid(format!(
            "hermite_zeros: degree {n} outside 1..={MAX_HERMITE_DEGREE}"
        )));
    }
    let mut roots = vec![0.0];
    for k in 1..n {
        let deg = k + 1;
        // Largest zero of (probabilists') H_m is below sqrt(4m + 2).
        let outer = (4.0 * deg as f64 + 2.0).sqrt();
        let mut brackets = Vec::with_capacity(deg + 1);
        brackets.push(-outer);
        brackets.extend_from_slice(&roots);
        brackets.push(outer);
        let mut next = Vec::with_capacity(deg);
        for w in brackets.windows(2) {
            next.push(refine_root(deg, w[0], w[1])?);
        }
        roots = next;
    }
    // enforce the +/- pairing exactly
    let sym: Vec<f64> = (0..n)
        .map(|i| 0.5 * (roots[i] - roots[n - 1 - i]))
        .collect();
    Ok(sym)
}

/// Newton iteration on H_deg inside (lo, hi), falling back to bisection
/// whenever a step leaves the bracket.
fn refine_root(deg: usize, mut lo: f64, mut hi: f64) -> Result<f64> {
    let f = |z: f64| hermite_value(deg, z);
    let (mut flo, _) = f(lo);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (fx, fprev) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if (fx > 0.0) == (flo > 0.0) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        let deriv = deg as f64 * fprev;
        let newton = x - fx / deriv;
        let next = if deriv != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 1e-16 * x.abs().max(1.0) {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::NoConvergence {
        routine: "hermite_zeros",
        detail: format!("degree {deg}, bracket ({lo}, {hi})"),
    })
}
