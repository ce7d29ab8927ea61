//! Zero-coupon bond price approximations.
//!
//! Conditional on time T, `B(T, T+tau) = E[exp(-int_0^tau r_{T+t} dt) | F_T]`
//! has no closed form under lognormal rates. Expanding the OU deviation in
//! its Karhunen-Loeve basis and truncating turns the expectation into a
//! low-dimensional Gaussian integral:
//!
//! - [`bond_price_full`]: truncation after `n+1` modes, tensor-product
//!   Gauss-Hermite over the mode coefficients. Converges in n; already very
//!   accurate at n = 0 because the leading eigenvalue carries most of the OU
//!   variance.
//! - [`bond_price_fast`]: the production form. One retained mode, the
//!   discarded variance folded into a deterministic correction, and a single
//!   Gauss-Hermite quadrature in the leading coefficient.
//!
//! Prices are strictly decreasing in the time-T short rate with limits 1 and
//! 0, which is what the swaption exercise-boundary search relies on.

use crate::model::{Kernel, KlBasis, ModelParams};
use crate::numerics::{gauss_hermite_rule, gauss_legendre_rule, integrate_time};
use crate::{model, Error, Result};

/// A priced zero-coupon bond `B(start, maturity)`.
#[derive(Debug, Clone, Copy)]
pub struct BondQuote {
    pub start: f64,
    pub maturity: f64,
    pub price: f64,
    /// Continuously compounded yield over the bond's life.
    pub ytm: f64,
}

/// Gauss-Legendre node count for the inner time integral: 64 by default,
/// doubled when the integrand's variance growth over the interval is large.
pub(crate) fn time_integral_nodes(tau: f64, sigma: f64) -> usize {
    if tau * sigma * sigma > 5.0 {
        128
    } else {
        64
    }
}

/// `F(t, z) = exp(sigma sum_k sqrt(lambda_k) f_k(t) z_k)`: the retained-mode
/// part of the deviation exponential.
pub fn integrand_f(basis: &KlBasis, sigma: f64, t: f64, z: &[f64]) -> f64 {
    debug_assert_eq!(z.len(), basis.truncation());
    let mut exponent = 0.0;
    for (k, &zk) in z.iter().enumerate() {
        exponent +=
            basis.lambdas[k].sqrt() * basis.norm_constants[k] * (basis.omegas[k] * t).sin() * zk;
    }
    (sigma * exponent).exp()
}

/// `G(t) = exp(sigma^2/2 (V(t) - sum_k lambda_k f_k(t)^2))`: lognormal mean
/// correction for the discarded modes. Works for both OU and bridge bases
/// (using the matching variance function); >= 1 since the truncated-mode
/// variance never exceeds the total.
pub fn variance_correction_g(basis: &KlBasis, sigma: f64, t: f64) -> f64 {
    let kernel = Kernel {
        b: basis.b,
        horizon: basis.interval,
        kind: basis.kind,
    };
    let mut retained = 0.0;
    for k in 0..basis.truncation() {
        let f = basis.norm_constants[k] * (basis.omegas[k] * t).sin();
        retained += basis.lambdas[k] * f * f;
    }
    (0.5 * sigma * sigma * (kernel.variance(t) - retained)).exp()
}

/// `I(z) = int_0^tau rbar_{T,t} G(t) F(t,z) dt`: minus its exponential is the
/// discount factor along the truncated deviation path. Strictly increasing in
/// `r_T`.
pub fn rate_integral_i(
    params: &ModelParams,
    r_t_start: f64,
    start: f64,
    tau: f64,
    basis: &KlBasis,
    z: &[f64],
) -> Result<f64> {
    if !(r_t_start > 0.0) {
        return Err(Error::invalid(format!(
            "rate at expiry must be > 0, got {r_t_start}"
        )));
    }
    let sigma = params.sigma();
    let ln_r = r_t_start.ln();
    let nodes = time_integral_nodes(tau, sigma);
    integrate_time(
        |t| {
            params.ln_rbar(ln_r, start, t).exp()
                * variance_correction_g(basis, sigma, t)
                * integrand_f(basis, sigma, t, z)
        },
        0.0,
        tau,
        nodes,
    )
}

/// Full KL approximation: tensor-product probabilists' Gauss-Hermite over the
/// first `trunc + 1` mode coefficients of `exp(-I)`.
pub fn bond_price_full(
    params: &ModelParams,
    r_t_start: f64,
    start: f64,
    tau: f64,
    trunc: usize,
    gh_points: usize,
) -> Result<BondQuote> {
    if trunc > 3 {
        return Err(Error::BudgetExceeded(format!(
            "bond_price_full: truncation {trunc} > 3 (tensor grid grows as gh_points^(n+1))"
        )));
    }
    let dims = trunc + 1;
    if gh_points.pow(dims as u32) > 1_000_000 {
        return Err(Error::BudgetExceeded(format!(
            "bond_price_full: {gh_points}^{dims} tensor points"
        )));
    }
    let basis = model::ou_kl_basis(params.b(), tau, dims)?;
    let rule = gauss_hermite_rule(gh_points)?;
    let mut z = vec![0.0; dims];
    let mut index = vec![0usize; dims];
    let mut price = 0.0;
    loop {
        let mut weight = 1.0;
        for (d, &i) in index.iter().enumerate() {
            z[d] = rule.nodes[i];
            weight *= rule.weights[i];
        }
        price += weight * (-rate_integral_i(params, r_t_start, start, tau, &basis, &z)?).exp();
        // odometer over the tensor grid
        let mut d = 0;
        loop {
            if d == dims {
                return finish_quote(start, tau, price);
            }
            index[d] += 1;
            if index[d] < gh_points {
                break;
            }
            index[d] = 0;
            d += 1;
        }
    }
}

/// Fast single-mode approximation: `sum_k w_k exp(-I(h_k))` over the
/// `gh_points`-point rule in the leading mode coefficient.
pub fn bond_price_fast(
    params: &ModelParams,
    r_t_start: f64,
    start: f64,
    tau: f64,
    gh_points: usize,
) -> Result<BondQuote> {
    let basis = model::ou_kl_basis(params.b(), tau, 1)?;
    let rule = gauss_hermite_rule(gh_points)?;
    let mut price = 0.0;
    for (&h, &w) in rule.nodes.iter().zip(&rule.weights) {
        price += w * (-rate_integral_i(params, r_t_start, start, tau, &basis, &[h])?).exp();
    }
    finish_quote(start, tau, price)
}

fn finish_quote(start: f64, tau: f64, price: f64) -> Result<BondQuote> {
    Ok(BondQuote {
        start,
        maturity: start + tau,
        price,
        ytm: yield_from_price(price, tau)?,
    })
}

/// Continuously compounded yield `-ln(price)/tau`.
pub fn yield_from_price(price: f64, tau: f64) -> Result<f64> {
    if !(price > 0.0) || !(tau > 0.0) {
        return Err(Error::invalid(format!(
            "yield_from_price needs price > 0 and tau > 0 (got {price}, {tau})"
        )));
    }
    Ok(-price.ln() / tau)
}

/// Precomputed fast-approximation pricer for one `(start, tau)` bond, cheap
/// to re-evaluate across many expiry short rates. This is the hot path of the
/// swaption pipeline and the table sweeps; it evaluates the same quadrature
/// as [`bond_price_fast`] on a fixed single-panel Gauss-Legendre grid.
#[derive(Debug, Clone)]
pub struct FastBondPricer {
    start: f64,
    tau: f64,
    /// e^{-b t_i} at the time nodes.
    decay: Vec<f64>,
    /// glw_i * G(t_i) * exp(A(start, start + t_i)) at the time nodes.
    base: Vec<f64>,
    /// exp(sigma sqrt(lambda_0) f_0(t_i) h_j), row-major [gh][gl].
    mode_factor: Vec<f64>,
    gh_weights: Vec<f64>,
}

impl FastBondPricer {
    pub fn new(params: &ModelParams, start: f64, tau: f64, gh_points: usize) -> Result<Self> {
        let sigma = params.sigma();
        let b = params.b();
        let basis = model::ou_kl_basis(b, tau, 1)?;
        let gh = gauss_hermite_rule(gh_points)?;
        let gl = gauss_legendre_rule(time_integral_nodes(tau, sigma), 0.0, tau)?;
        let n_t = gl.len();
        let mut decay = Vec::with_capacity(n_t);
        let mut base = Vec::with_capacity(n_t);
        let sqrt_lam = basis.lambdas[0].sqrt();
        let c0 = basis.norm_constants[0];
        let om = basis.omegas[0];
        let mut f0 = Vec::with_capacity(n_t);
        for (&t, &w) in gl.nodes.iter().zip(&gl.weights) {
            decay.push((-b * t).exp());
            base.push(
                w * variance_correction_g(&basis, sigma, t) * params.drift_integral(start, t).exp(),
            );
            f0.push(c0 * (om * t).sin());
        }
        let mut mode_factor = Vec::with_capacity(gh.len() * n_t);
        for &h in &gh.nodes {
            for &f in &f0 {
                mode_factor.push((sigma * sqrt_lam * f * h).exp());
            }
        }
        Ok(FastBondPricer {
            start,
            tau,
            decay,
            base,
            mode_factor,
            gh_weights: gh.weights,
        })
    }

    /// Approximate `B(start, start + tau)` given the short rate at `start`.
    pub fn price(&self, r_t_start: f64) -> f64 {
        let ln_r = r_t_start.ln();
        let n_t = self.decay.len();
        // rbar part of the integrand at each time node
        let rbar: Vec<f64> = self
            .decay
            .iter()
            .zip(&self.base)
            .map(|(&d, &bse)| bse * (d * ln_r).exp())
            .collect();
        let mut price = 0.0;
        for (j, &w) in self.gh_weights.iter().enumerate() {
            let row = &self.mode_factor[j * n_t..(j + 1) * n_t];
            let integral: f64 = row.iter().zip(&rbar).map(|(&m, &r)| m * r).sum();
            price += w * (-integral).exp();
        }
        price
    }

    pub fn quote(&self, r_t_start: f64) -> Result<BondQuote> {
        finish_quote(self.start, self.tau, self.price(r_t_start))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ou_variance;

    fn setup(sigma: f64, b: f64, r0: f64) -> ModelParams {
        ModelParams::with_constant_drift(sigma, b, r0, b * (0.03f64).ln()).unwrap()
    }

    #[test]
    fn integrand_f_trivial_points() {
        let params = setup(0.25, 0.1, 0.03);
        let basis = model::ou_kl_basis(params.b(), 5.0, 1).unwrap();
        assert_eq!(integrand_f(&basis, 0.25, 2.0, &[0.0]), 1.0);
        assert_eq!(integrand_f(&basis, 0.25, 0.0, &[1.7]), 1.0);
        let lam0 = basis.lambdas[0];
        let f0 = basis.eigenfunction(0, 2.5).unwrap();
        let expect = (0.25 * lam0.sqrt() * f0 * 1.3).exp();
        assert!((integrand_f(&basis, 0.25, 2.5, &[1.3]) - expect).abs() < 1e-15);
    }

    #[test]
    fn variance_correction_bounds() {
        let basis = model::ou_kl_basis(0.1, 5.0, 1).unwrap();
        assert_eq!(variance_correction_g(&basis, 0.25, 0.0), 1.0);
        assert!((variance_correction_g(&basis, 1e-12, 2.5) - 1.0).abs() < 1e-20);
        for t in [0.5, 2.5, 5.0] {
            assert!(variance_correction_g(&basis, 0.25, t) >= 1.0);
        }
        let lam0 = basis.lambdas[0];
        let f0 = basis.eigenfunction(0, 2.5).unwrap();
        let expect = (0.03125 * (ou_variance(0.1, 2.5) - lam0 * f0 * f0)).exp();
        assert!((variance_correction_g(&basis, 0.25, 2.5) - expect).abs() < 1e-15);
    }

    #[test]
    fn rate_integral_deterministic_and_monotone() {
        // sigma ~ 0, stationary start: flat short rate, I = r0 tau
        let params = setup(1e-12, 0.1, 0.03);
        let basis = model::ou_kl_basis(0.1, 1.0, 1).unwrap();
        let got = rate_integral_i(&params, 0.03, 0.0, 1.0, &basis, &[0.0]).unwrap();
        assert!((got - 0.03).abs() < 1e-12);

        let params = setup(0.25, 0.1, 0.03);
        let mut last = 0.0;
        for r in [0.005, 0.01, 0.03, 0.1, 0.5] {
            let v = rate_integral_i(&params, r, 0.0, 1.0, &basis, &[0.0]).unwrap();
            assert!(v > last);
            last = v;
        }
        // z = 0, sigma > 0: G >= 1 makes I exceed the plain rbar integral
        let plain = integrate_time(|t| params.rbar(0.03, 0.0, t), 0.0, 1.0, 64).unwrap();
        assert!(last > 0.0);
        assert!(rate_integral_i(&params, 0.03, 0.0, 1.0, &basis, &[0.0]).unwrap() > plain);
    }

    #[test]
    fn rate_integral_matches_dense_trapezoid() {
        let params = setup(0.25, 0.1, 0.03);
        let basis = model::ou_kl_basis(0.1, 1.0, 1).unwrap();
        let got = rate_integral_i(&params, 0.03, 0.0, 1.0, &basis, &[0.0]).unwrap();
        let f = |t: f64| {
            params.rbar(0.03, 0.0, t)
                * variance_correction_g(&basis, 0.25, t)
                * integrand_f(&basis, 0.25, t, &[0.0])
        };
        let n = 100_000;
        let h = 1.0 / n as f64;
        let mut trap = 0.5 * (f(0.0) + f(1.0));
        for i in 1..n {
            trap += f(i as f64 * h);
        }
        trap *= h;
        assert!((got - trap).abs() < 1e-9, "{got} vs {trap}");
    }

    #[test]
    fn deterministic_limit_reproduces_discounted_rbar() {
        let params = setup(1e-12, 0.1, 0.03);
        for tau in [1.0, 10.0] {
            let quote = bond_price_fast(&params, 0.04, 0.0, tau, 20).unwrap();
            let expect =
                (-integrate_time(|t| params.rbar(0.04, 0.0, t), 0.0, tau, 64).unwrap()).exp();
            assert!((quote.price - expect).abs() < 1e-10 * expect);
        }
    }

    #[test]
    fn full_with_zero_truncation_equals_fast() {
        let params = setup(0.25, 0.1, 0.03);
        let full = bond_price_full(&params, 0.03, 0.0, 5.0, 0, 7).unwrap();
        let fast = bond_price_fast(&params, 0.03, 0.0, 5.0, 7).unwrap();
        assert_eq!(full.price, fast.price);
        assert!(bond_price_full(&params, 0.03, 0.0, 5.0, 4, 5).is_err());
    }

    #[test]
    fn fast_pricer_struct_matches_free_function() {
        let params = setup(0.25, 0.1, 0.03);
        let pricer = FastBondPricer::new(&params, 0.0, 5.0, 20).unwrap();
        for r in [0.01, 0.03, 0.09] {
            let a = pricer.price(r);
            let b = bond_price_fast(&params, r, 0.0, 5.0, 20).unwrap().price;
            assert!((a - b).abs() < 1e-14 * b, "{a} vs {b}");
        }
        // nonzero start time exercises the drift integral offset
        let pricer = FastBondPricer::new(&params, 2.0, 3.0, 20).unwrap();
        let a = pricer.price(0.05);
        let b = bond_price_fast(&params, 0.05, 2.0, 3.0, 20).unwrap().price;
        assert!((a - b).abs() < 1e-14 * b);
    }

    #[test]
    fn paper_grid_yields_table_one_spot_checks() {
        // A2 yields, tolerance 0.5 bp
        let cases = [
            (0.01, 0.1, 0.25, 1.0, 1.071),
            (0.06, 0.02, 0.25, 10.0, 6.081),
            (0.06, 0.1, 0.50, 10.0, 5.774),
        ];
        for (r0, b, sigma, tau, expect_pct) in cases {
            let params = setup(sigma, b, r0);
            let quote = bond_price_fast(&params, r0, 0.0, tau, 20).unwrap();
            assert!(
                (quote.ytm * 100.0 - expect_pct).abs() < 0.005,
                "r0={r0} b={b} sigma={sigma} tau={tau}: {:.4}% vs {expect_pct}%",
                quote.ytm * 100.0
            );
        }
    }

    #[test]
    fn price_is_strictly_decreasing_in_expiry_rate_with_unit_limits() {
        let params = setup(0.25, 0.1, 0.03);
        let pricer = FastBondPricer::new(&params, 0.0, 5.0, 20).unwrap();
        let mut last = f64::INFINITY;
        for i in 0..50 {
            let r = 1e-4 * (1.0 / 1e-4f64).powf(i as f64 / 49.0);
            let p = pricer.price(r);
            assert!(p < last, "not strictly decreasing at r={r}");
            last = p;
        }
        assert!(pricer.price(1e-9) > 1.0 - 1e-4);
        assert!(pricer.price(1e4) < 1e-8);
    }

    #[test]
    fn doubling_quadrature_points_is_stable() {
        let params = setup(0.25, 0.1, 0.01);
        let p20 = bond_price_fast(&params, 0.01, 0.0, 10.0, 20).unwrap().price;
        let p40 = bond_price_fast(&params, 0.01, 0.0, 10.0, 40).unwrap().price;
        assert!((p20 - p40).abs() <= 1e-8 * p20);
    }

    #[test]
    fn yield_conversions() {
        assert_eq!(yield_from_price(1.0, 4.0).unwrap(), 0.0);
        let y = yield_from_price((-0.03f64).exp(), 1.0).unwrap();
        assert!((y - 0.03).abs() < 1e-15);
        let y = yield_from_price(0.74082, 10.0).unwrap();
        assert!((y - 0.03).abs() < 1e-5);
        assert!(yield_from_price(0.0, 1.0).is_err());
        assert!(yield_from_price(0.5, 0.0).is_err());
    }
}
