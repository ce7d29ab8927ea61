//! Gaussian partial-moment operators.
//!
//! For a polynomial `W(z) = sum w_k z^k` the coefficient recursion
//! `u_n = u_{n+1} = 0`, `u_k = (k+2) u_{k+2} + w_{k+1}` (k = n-1, ..., -1)
//! yields a reduced polynomial (coefficients u_0..u_{n-1}) and a tail
//! coefficient u_{-1} such that truncated Gaussian expectations of W close in
//! terms of the normal density and CDF; see [`gaussian_tail_expectation`].

use super::gaussian::{normal_cdf, normal_pdf};
use super::polynomial::Polynomial;

/// Output of the partial-moment recursion.
#[derive(Debug, Clone)]
pub struct PartialMomentDecomposition {
    /// The reduced polynomial; degree(input) - 1 for non-constant input, the
    /// zero polynomial for constants.
    pub reduced: Polynomial,
    /// The tail coefficient u_{-1}; equals `E[W(Z)]` for standard normal Z.
    pub tail_coefficient: f64,
}

pub fn partial_moment_decompose(w: &Polynomial) -> PartialMomentDecomposition {
    let coeffs = w.coeffs();
    let n = coeffs.len() - 1;
    // u[idx] holds u_{idx-1}, so k = -1..=n+1 lives at idx 0..=n+2.
    let mut u = vec![0.0; n + 3];
    for k in (-1..=(n as i64 - 1)).rev() {
        let idx = (k + 1) as usize;
        u[idx] = (k + 2) as f64 * u[idx + 2] + coeffs[(k + 1) as usize];
    }
    PartialMomentDecomposition {
        reduced: Polynomial::new(u[1..=n.max(1)].to_vec()),
        tail_coefficient: u[0],
    }
}

/// `E[omega * 1{omega Z >= omega a} * W(Z)]` for standard normal Z, i.e. the
/// upper-tail expectation for `omega = +1` and minus the lower-tail
/// expectation for `omega = -1`:
///
/// `phi(a) * reduced(a) + omega * tail * Phi(-omega a)`.
pub fn gaussian_tail_expectation(w: &Polynomial, a: f64, omega: f64) -> f64 {
    debug_assert!(omega == 1.0 || omega == -1.0);
    let d = partial_moment_decompose(w);
    normal_pdf(a) * d.reduced.eval(a) + omega * d.tail_coefficient * normal_cdf(-omega * a)
}
