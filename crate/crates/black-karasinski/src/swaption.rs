//! European swaption approximation.
//!
//! The time-0 price of a payer (omega = +1) or receiver (omega = -1)
//! swaption is `E[beta(T) (omega (1 - C))^+]` where
//! `C = B(T, T+N d) + S d sum_k B(T, T+k d)` collects the swap's fixed-leg
//! bonds at expiry. The pipeline approximates each piece and closes the outer
//! expectation analytically:
//!
//! 1. conditional discount factor `beta(x) = E[beta(T) | X_T = x]` via the
//!    OU-bridge KL expansion ([`conditional_discount_fast`] /
//!    [`conditional_discount_full`]);
//! 2. the expiry bonds in `C` via the fast bond approximation, as functions
//!    of `r_T = rbar_{0,T} exp(sigma x)`;
//! 3. the payoff profile `f(z) = beta(x)(1 - C(x))` at `x = sqrt(V(T)) z`,
//!    sampled at the k Hermite zeros, interpolated by the Lagrange operator;
//! 4. the single sign change of `f` located on the node grid (the payoff is
//!    monotone in the expiry rate), its root `z0` inside the bracketing node
//!    pair, and the closed form
//!    `phi(z0) [H f](z0) + omega h(f) Phi(-omega z0)` via the partial-moment
//!    operators.
//!
//! When the payoff has one sign at every node the boundary is at infinity:
//! the price collapses to the unconditional expectation (deep in the money)
//! or zero (deep out of the money).

use crate::bond::{time_integral_nodes, FastBondPricer};
use crate::model::{ou_covariance, ou_variance, KlBasis, ModelParams};
use crate::numerics::{
    gauss_hermite_rule, gauss_legendre_rule, gaussian_tail_expectation, hermite_zeros,
    integrate_time, lagrange_on_hermite_nodes, normal_cdf, partial_moment_decompose,
    solve_bracketed_root, Polynomial,
};
use crate::{model, Error, Result};

/// Payer pays fixed (profits when rates rise), receiver receives fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Payer,
    Receiver,
}

impl Side {
    pub fn omega(self) -> f64 {
        match self {
            Side::Payer => 1.0,
            Side::Receiver => -1.0,
        }
    }
}

/// A European swaption on a fixed-vs-float swap with `payments` fixed-leg
/// payments of year fraction `period`, tenor `payments * period`.
#[derive(Debug, Clone, Copy)]
pub struct SwaptionSpec {
    pub expiry: f64,
    pub period: f64,
    pub payments: usize,
    pub strike: f64,
    pub side: Side,
}

impl SwaptionSpec {
    pub fn new(expiry: f64, period: f64, payments: usize, strike: f64, side: Side) -> Result<Self> {
        if !(expiry > 0.0) || !(period > 0.0) || payments == 0 || !(strike >= 0.0) {
            return Err(Error::invalid(format!(
                "swaption spec: need expiry > 0, period > 0, payments >= 1, strike >= 0 \
                 (got {expiry}, {period}, {payments}, {strike})"
            )));
        }
        Ok(SwaptionSpec {
            expiry,
            period,
            payments,
            strike,
            side,
        })
    }

    pub fn tenor(&self) -> f64 {
        self.payments as f64 * self.period
    }
}

/// Swap fixed-leg quantities at expiry, built from fast bond prices.
#[derive(Debug, Clone, Copy)]
pub struct SwapAlgebra {
    /// `d sum_k B(T, T+k d)`.
    pub annuity: f64,
    /// `B(T, T+N d)`.
    pub terminal_bond: f64,
    /// `C = terminal_bond + strike * annuity`.
    pub coupon_sum: f64,
    /// `(1 - terminal_bond) / annuity`, the par swap rate at expiry.
    pub forward_rate: f64,
}

/// Evaluate the swap algebra at a given expiry short rate.
pub fn swap_algebra_at_expiry(
    params: &ModelParams,
    r_expiry: f64,
    spec: &SwaptionSpec,
    gh_points: usize,
) -> Result<SwapAlgebra> {
    if !(r_expiry > 0.0) {
        return Err(Error::invalid(format!(
            "expiry rate must be > 0, got {r_expiry}"
        )));
    }
    let mut annuity = 0.0;
    let mut terminal = 0.0;
    for k in 1..=spec.payments {
        let pricer = FastBondPricer::new(params, spec.expiry, k as f64 * spec.period, gh_points)?;
        let price = pricer.price(r_expiry);
        annuity += spec.period * price;
        if k == spec.payments {
            terminal = price;
        }
    }
    Ok(SwapAlgebra {
        annuity,
        terminal_bond: terminal,
        coupon_sum: terminal + spec.strike * annuity,
        forward_rate: (1.0 - terminal) / annuity,
    })
}

/// Bridge-basis analogue of the bond rate integral:
/// `I(x, z) = int_0^T rbar_{0,t} G(t) F(t, z) exp(sigma K(t,T)/V(T) x) dt`.
fn bridge_rate_integral(
    params: &ModelParams,
    basis: &KlBasis,
    horizon: f64,
    x: f64,
    z: &[f64],
) -> Result<f64> {
    let sigma = params.sigma();
    let b = params.b();
    let ln_r0 = params.r0().ln();
    let v_t = ou_variance(b, horizon);
    integrate_time(
        |t| {
            let tilt = sigma * ou_covariance(b, t, horizon) / v_t * x;
            params.ln_rbar(ln_r0, 0.0, t).exp()
                * crate::bond::variance_correction_g(basis, sigma, t)
                * crate::bond::integrand_f(basis, sigma, t, z)
                * tilt.exp()
        },
        0.0,
        horizon,
        time_integral_nodes(horizon, sigma),
    )
}

/// `E[beta(T) | X_T = x]` by tensor Gauss-Hermite over the first `m_trunc`
/// bridge modes.
pub fn conditional_discount_full(
    params: &ModelParams,
    horizon: f64,
    x: f64,
    m_trunc: usize,
    gh_points: usize,
) -> Result<f64> {
    if m_trunc > 3 {
        return Err(Error::BudgetExceeded(format!(
            "conditional_discount_full: {m_trunc} tensor dimensions > 3"
        )));
    }
    let basis = model::bridge_kl_basis(params.b(), horizon, m_trunc)?;
    let rule = gauss_hermite_rule(gh_points)?;
    let dims = m_trunc;
    let mut z = vec![0.0; dims];
    let mut index = vec![0usize; dims];
    let mut value = 0.0;
    loop {
        let mut weight = 1.0;
        for (d, &i) in index.iter().enumerate() {
            z[d] = rule.nodes[i];
            weight *= rule.weights[i];
        }
        value += weight * (-bridge_rate_integral(params, &basis, horizon, x, &z)?).exp();
        let mut d = 0;
        loop {
            if d == dims {
                return Ok(value);
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

/// Fast form: one retained bridge mode, the rest folded into the variance
/// correction, `gh_points` quadrature points in the leading coefficient.
pub fn conditional_discount_fast(
    params: &ModelParams,
    horizon: f64,
    x: f64,
    gh_points: usize,
) -> Result<f64> {
    conditional_discount_full(params, horizon, x, 1, gh_points)
}

/// Precomputed fast conditional discount, reusable across `x`.
#[derive(Debug, Clone)]
pub struct ConditionalDiscount {
    /// glw_i * rbar_{0,t_i} * G(t_i).
    base: Vec<f64>,
    /// sigma K(t_i, T) / V(T).
    tilt: Vec<f64>,
    /// exp(sigma sqrt(lambda_1) f_1(t_i) h_j), row-major [gh][gl].
    mode_factor: Vec<f64>,
    gh_weights: Vec<f64>,
}

impl ConditionalDiscount {
    pub fn new(params: &ModelParams, horizon: f64, gh_points: usize) -> Result<Self> {
        let sigma = params.sigma();
        let b = params.b();
        let basis = model::bridge_kl_basis(b, horizon, 1)?;
        let gh = gauss_hermite_rule(gh_points)?;
        let gl = gauss_legendre_rule(time_integral_nodes(horizon, sigma), 0.0, horizon)?;
        let v_t = ou_variance(b, horizon);
        let ln_r0 = params.r0().ln();
        let n_t = gl.len();
        let mut base = Vec::with_capacity(n_t);
        let mut tilt = Vec::with_capacity(n_t);
        let mut f1 = Vec::with_capacity(n_t);
        for (&t, &w) in gl.nodes.iter().zip(&gl.weights) {
            base.push(
                w * params.ln_rbar(ln_r0, 0.0, t).exp()
                    * crate::bond::variance_correction_g(&basis, sigma, t),
            );
            tilt.push(sigma * ou_covariance(b, t, horizon) / v_t);
            f1.push(basis.norm_constants[0] * (basis.omegas[0] * t).sin());
        }
        let sqrt_lam = basis.lambdas[0].sqrt();
        let mut mode_factor = Vec::with_capacity(gh.len() * n_t);
        for &h in &gh.nodes {
            for &f in &f1 {
                mode_factor.push((sigma * sqrt_lam * f * h).exp());
            }
        }
        Ok(ConditionalDiscount {
            base,
            tilt,
            mode_factor,
            gh_weights: gh.weights,
        })
    }

    pub fn value(&self, x: f64) -> f64 {
        let n_t = self.base.len();
        let tilted: Vec<f64> = self
            .base
            .iter()
            .zip(&self.tilt)
            .map(|(&b, &t)| b * (t * x).exp())
            .collect();
        let mut value = 0.0;
        for (j, &w) in self.gh_weights.iter().enumerate() {
            let row = &self.mode_factor[j * n_t..(j + 1) * n_t];
            let integral: f64 = row.iter().zip(&tilted).map(|(&m, &r)| m * r).sum();
            value += w * (-integral).exp();
        }
        value
    }
}

/// Where the payoff profile changes sign on the sampled node grid.
#[derive(Debug, Clone)]
pub enum BoundaryOutcome {
    /// Sign change between two adjacent nodes.
    Interior(ExerciseBoundary),
    /// Payoff positive at every node: boundary at -infinity (payer deep in
    /// the money, receiver deep out).
    AllPositive,
    /// Payoff negative at every node: boundary at +infinity.
    AllNegative,
}

/// Exercise boundary in standardized (`z0`) and deviation (`x0`) coordinates,
/// with the Hermite-node bracket that contained the sign change.
#[derive(Debug, Clone, Copy)]
pub struct ExerciseBoundary {
    pub z0: f64,
    pub x0: f64,
    pub bracket: (f64, f64),
}

/// Full pricing output: the price plus the diagnostics the CLI reports.
#[derive(Debug, Clone)]
pub struct SwaptionValuation {
    pub price: f64,
    pub boundary: BoundaryOutcome,
    /// Payoff profile at the scaled Hermite nodes.
    pub node_values: Vec<f64>,
    /// The Lagrange interpolant of the payoff profile.
    pub interpolant: Polynomial,
}

/// Strike-independent state of the pricing pipeline for one
/// (expiry, period, payments, m, n, k) configuration: the conditional
/// discount, annuity and terminal bond at each scaled Hermite node. Pricing
/// a strike/side from here is a few polynomial operations, so moneyness
/// sweeps reuse one of these.
#[derive(Debug, Clone)]
pub struct SwaptionPricer {
    nodes: Vec<f64>,
    sqrt_v: f64,
    beta: Vec<f64>,
    annuity: Vec<f64>,
    terminal: Vec<f64>,
}

struct PayoffProfile {
    nodes: Vec<f64>,
    values: Vec<f64>,
    sqrt_v: f64,
}

impl SwaptionPricer {
    pub fn new(
        params: &ModelParams,
        expiry: f64,
        period: f64,
        payments: usize,
        m: usize,
        n: usize,
        k: usize,
    ) -> Result<Self> {
        if m == 0 || n == 0 || k < 2 {
            return Err(Error::invalid(format!(
                "swaption pipeline needs m, n >= 1 and k >= 2 (got m={m}, n={n}, k={k})"
            )));
        }
        if !(expiry > 0.0) || !(period > 0.0) || payments == 0 {
            return Err(Error::invalid(
                "swaption pipeline needs expiry > 0, period > 0, payments >= 1".to_string(),
            ));
        }
        let sqrt_v = ou_variance(params.b(), expiry).sqrt();
        let ln_rbar_t = params.ln_rbar(params.r0().ln(), 0.0, expiry);
        let discount = ConditionalDiscount::new(params, expiry, m)?;
        let bonds: Vec<FastBondPricer> = (1..=payments)
            .map(|j| FastBondPricer::new(params, expiry, j as f64 * period, n))
            .collect::<Result<_>>()?;
        let nodes = hermite_zeros(k)?;
        let mut beta = Vec::with_capacity(k);
        let mut annuity = Vec::with_capacity(k);
        let mut terminal = Vec::with_capacity(k);
        for &z in &nodes {
            let x = sqrt_v * z;
            let r_t = (ln_rbar_t + params.sigma() * x).exp();
            let mut ann = 0.0;
            let mut term = 0.0;
            for (j, pricer) in bonds.iter().enumerate() {
                let p = pricer.price(r_t);
                ann += period * p;
                if j + 1 == payments {
                    term = p;
                }
            }
            beta.push(discount.value(x));
            annuity.push(ann);
            terminal.push(term);
        }
        Ok(SwaptionPricer {
            nodes,
            sqrt_v,
            beta,
            annuity,
            terminal,
        })
    }

    /// Payoff profile `f(z) = beta (1 - terminal - strike * annuity)` at the
    /// Hermite nodes.
    fn profile(&self, strike: f64) -> PayoffProfile {
        let values = self
            .beta
            .iter()
            .zip(&self.annuity)
            .zip(&self.terminal)
            .map(|((&b, &a), &t)| b * (1.0 - t - strike * a))
            .collect();
        PayoffProfile {
            nodes: self.nodes.clone(),
            values,
            sqrt_v: self.sqrt_v,
        }
    }

    /// Price one strike/side from the cached node state.
    pub fn value(&self, strike: f64, side: Side) -> Result<SwaptionValuation> {
        let profile = self.profile(strike);
        let interpolant = lagrange_on_hermite_nodes(&profile.values)?;
        let boundary = locate_boundary(&profile, &interpolant)?;
        let omega = side.omega();
        let price = match &boundary {
            BoundaryOutcome::Interior(b) => gaussian_tail_expectation(&interpolant, b.z0, omega),
            // boundary at -inf: the indicator is identically 1 for the payer
            // (price is the full expectation E[f(Z)]) and 0 for the receiver
            BoundaryOutcome::AllPositive => match side {
                Side::Payer => partial_moment_decompose(&interpolant).tail_coefficient,
                Side::Receiver => 0.0,
            },
            // boundary at +inf: mirrored
            BoundaryOutcome::AllNegative => match side {
                Side::Payer => 0.0,
                Side::Receiver => -partial_moment_decompose(&interpolant).tail_coefficient,
            },
        };
        Ok(SwaptionValuation {
            price,
            boundary,
            node_values: profile.values,
            interpolant,
        })
    }
}

/// Scan the raw node values for the leftmost sign change `f(h_l) < 0 <=
/// f(h_{l+1})` and root the interpolant inside that bracket. Raw values, not
/// the interpolant, pick the bracket: interpolation wiggle can fabricate
/// extra crossings at high volatility.
fn locate_boundary(profile: &PayoffProfile, interpolant: &Polynomial) -> Result<BoundaryOutcome> {
    let vals = &profile.values;
    let k = vals.len();
    let mut bracket = None;
    for l in 0..k - 1 {
        if vals[l] < 0.0 && vals[l + 1] >= 0.0 {
            bracket = Some(l);
            break;
        }
    }
    let Some(l) = bracket else {
        return Ok(if vals.iter().all(|&v| v >= 0.0) {
            BoundaryOutcome::AllPositive
        } else if vals.iter().all(|&v| v < 0.0) {
            BoundaryOutcome::AllNegative
        } else {
            // decreasing profile: positive region left of negative region
            // cannot arise from a monotone payoff; treat as no exercise
            // boundary in the sampled range and price the dominant side.
            if vals[0] >= 0.0 {
                BoundaryOutcome::AllPositive
            } else {
                BoundaryOutcome::AllNegative
            }
        });
    };
    let (lo, hi) = (profile.nodes[l], profile.nodes[l + 1]);
    let z0 = solve_bracketed_root(|z| interpolant.eval(z), lo, hi, 1e-12)?;
    Ok(BoundaryOutcome::Interior(ExerciseBoundary {
        z0,
        x0: profile.sqrt_v * z0,
        bracket: (lo, hi),
    }))
}

/// Locate the exercise boundary of the approximated payoff without pricing.
pub fn locate_exercise_boundary(
    params: &ModelParams,
    spec: &SwaptionSpec,
    m: usize,
    n: usize,
    k: usize,
) -> Result<BoundaryOutcome> {
    let pricer = SwaptionPricer::new(params, spec.expiry, spec.period, spec.payments, m, n, k)?;
    let profile = pricer.profile(spec.strike);
    let interpolant = lagrange_on_hermite_nodes(&profile.values)?;
    locate_boundary(&profile, &interpolant)
}

/// Price the swaption; `m`, `n`, `k` are the conditional-discount quadrature
/// size, per-bond quadrature size and interpolation node count (production
/// default 5 for all three).
pub fn swaption_price(
    params: &ModelParams,
    spec: &SwaptionSpec,
    m: usize,
    n: usize,
    k: usize,
) -> Result<SwaptionValuation> {
    SwaptionPricer::new(params, spec.expiry, spec.period, spec.payments, m, n, k)?
        .value(spec.strike, spec.side)
}

/// Black swaption price `annuity * omega (F Phi(omega d1) - K Phi(omega d2))`.
pub fn black_swaption_price(
    forward: f64,
    strike: f64,
    annuity: f64,
    expiry: f64,
    vol: f64,
    side: Side,
) -> f64 {
    let omega = side.omega();
    if vol <= 0.0 {
        return annuity * (omega * (forward - strike)).max(0.0);
    }
    let sd = vol * expiry.sqrt();
    let d1 = ((forward / strike).ln() + 0.5 * sd * sd) / sd;
    let d2 = d1 - sd;
    annuity * omega * (forward * normal_cdf(omega * d1) - strike * normal_cdf(omega * d2))
}

/// Black implied volatility of a swaption price, to 1e-10 in vol.
pub fn implied_vol(
    price: f64,
    forward: f64,
    strike: f64,
    annuity: f64,
    expiry: f64,
    side: Side,
) -> Result<f64> {
    if !(forward > 0.0 && strike > 0.0 && annuity > 0.0 && expiry > 0.0) {
        return Err(Error::invalid(
            "implied_vol needs positive forward, strike, annuity, expiry".to_string(),
        ));
    }
    let omega = side.omega();
    let intrinsic = annuity * (omega * (forward - strike)).max(0.0);
    let cap = annuity * if omega > 0.0 { forward } else { strike };
    if price < intrinsic - 1e-14 * annuity || price >= cap {
        return Err(Error::PriceOutOfBounds {
            price,
            lo: intrinsic,
            hi: cap,
        });
    }
    if price <= intrinsic {
        return Ok(0.0);
    }
    let f = |vol: f64| black_swaption_price(forward, strike, annuity, expiry, vol, side) - price;
    solve_bracketed_root(f, 0.0, 20.0, 1e-10)
}

/// Difference of payer and receiver implied vols for an at-the-money spec
/// under identical (m, n, k); the paper's approximation does not obey
/// put-call parity exactly and this measures the gap. Both inversions use
/// the spec's strike as the forward, so the result reflects pure price
/// disagreement.
pub fn parity_disparity(
    params: &ModelParams,
    spec_atm: &SwaptionSpec,
    m: usize,
    n: usize,
    k: usize,
) -> Result<f64> {
    let payer = SwaptionSpec {
        side: Side::Payer,
        ..*spec_atm
    };
    let receiver = SwaptionSpec {
        side: Side::Receiver,
        ..*spec_atm
    };
    let p_price = swaption_price(params, &payer, m, n, k)?.price;
    let r_price = swaption_price(params, &receiver, m, n, k)?.price;
    // annuity only scales vega; the fast t = 0 annuity is accurate enough
    let mut annuity = 0.0;
    for j in 1..=spec_atm.payments {
        annuity += spec_atm.period
            * FastBondPricer::new(
                params,
                0.0,
                spec_atm.expiry + j as f64 * spec_atm.period,
                20,
            )?
            .price(params.r0());
    }
    let vol_p = implied_vol(
        p_price,
        spec_atm.strike,
        spec_atm.strike,
        annuity,
        spec_atm.expiry,
        Side::Payer,
    )?;
    let vol_r = implied_vol(
        r_price,
        spec_atm.strike,
        spec_atm.strike,
        annuity,
        spec_atm.expiry,
        Side::Receiver,
    )?;
    Ok(vol_p - vol_r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(sigma: f64, b: f64, r0: f64) -> ModelParams {
        ModelParams::with_constant_drift(sigma, b, r0, b * (0.03f64).ln()).unwrap()
    }

    #[test]
    fn conditional_discount_fast_is_full_with_one_mode() {
        let params = setup(0.25, 0.1, 0.03);
        for x in [-1.5, 0.0, 2.0] {
            let fast = conditional_discount_fast(&params, 2.0, x, 5).unwrap();
            let full = conditional_discount_full(&params, 2.0, x, 1, 5).unwrap();
            assert_eq!(fast, full);
        }
        assert!(conditional_discount_full(&params, 2.0, 0.0, 4, 5).is_err());
    }

    #[test]
    fn conditional_discount_deterministic_limit() {
        let params = setup(1e-12, 0.1, 0.03);
        let expect = (-integrate_time(|t| params.rbar(0.03, 0.0, t), 0.0, 2.0, 64).unwrap()).exp();
        for x in [-2.0, 0.0, 2.0] {
            let got = conditional_discount_fast(&params, 2.0, x, 5).unwrap();
            assert!((got - expect).abs() < 1e-9 * expect);
        }
    }

    #[test]
    fn conditional_discount_decreases_in_terminal_deviation() {
        let params = setup(0.25, 0.1, 0.03);
        let disc = ConditionalDiscount::new(&params, 5.0, 5).unwrap();
        let mut last = f64::INFINITY;
        for i in 0..9 {
            let x = -2.0 + 0.5 * i as f64;
            let v = disc.value(x);
            assert!(v < last && v > 0.0);
            last = v;
        }
        // positive and below par for positive rates
        let one_year = setup(0.25, 0.1, 0.01);
        let v = conditional_discount_fast(&one_year, 1.0, 0.0, 5).unwrap();
        assert!(v > 0.0 && v < 1.0);
    }

    #[test]
    fn cached_conditional_discount_matches_free_function() {
        let params = setup(0.25, 0.1, 0.03);
        let disc = ConditionalDiscount::new(&params, 5.0, 5).unwrap();
        for x in [-2.0, -0.3, 0.0, 1.1, 2.4] {
            let a = disc.value(x);
            let b = conditional_discount_fast(&params, 5.0, x, 5).unwrap();
            assert!((a - b).abs() < 1e-13 * b.max(1e-30), "{a} vs {b}");
        }
    }

    #[test]
    fn swap_algebra_limits() {
        let params = setup(0.25, 0.1, 0.03);
        let spec = SwaptionSpec::new(5.0, 1.0, 5, 0.0, Side::Payer).unwrap();
        // S = 0: C equals the terminal bond
        let alg = swap_algebra_at_expiry(&params, 0.03, &spec, 5).unwrap();
        assert_eq!(alg.coupon_sum, alg.terminal_bond);
        // r -> 0: every bond -> 1, C -> 1 + N d S
        let spec = SwaptionSpec::new(5.0, 1.0, 5, 0.04, Side::Payer).unwrap();
        let alg = swap_algebra_at_expiry(&params, 1e-9, &spec, 5).unwrap();
        assert!((alg.coupon_sum - (1.0 + 5.0 * 1.0 * 0.04)).abs() < 1e-4);
        // r -> infinity: C -> 0
        let alg = swap_algebra_at_expiry(&params, 1e4, &spec, 5).unwrap();
        assert!(alg.coupon_sum < 1e-6);
        // strictly decreasing in r
        let c_low = swap_algebra_at_expiry(&params, 0.02, &spec, 5)
            .unwrap()
            .coupon_sum;
        let c_high = swap_algebra_at_expiry(&params, 0.05, &spec, 5)
            .unwrap()
            .coupon_sum;
        assert!(c_high < c_low);
    }

    #[test]
    fn deep_strikes_hit_the_one_sided_branches() {
        let params = setup(0.25, 0.1, 0.03);
        // strike far above any attainable swap rate
        let spec = SwaptionSpec::new(2.0, 1.0, 2, 5.0, Side::Payer).unwrap();
        match locate_exercise_boundary(&params, &spec, 5, 5, 5).unwrap() {
            BoundaryOutcome::AllNegative => {}
            other => panic!("expected AllNegative, got {other:?}"),
        }
        let payer = swaption_price(&params, &spec, 5, 5, 5).unwrap();
        assert_eq!(payer.price, 0.0);
        let recv = SwaptionSpec {
            side: Side::Receiver,
            ..spec
        };
        let recv_px = swaption_price(&params, &recv, 5, 5, 5).unwrap().price;
        assert!(recv_px > 0.0);

        // strike zero: payer pays nothing, C < 1 at every node
        let spec = SwaptionSpec::new(2.0, 1.0, 2, 0.0, Side::Payer).unwrap();
        match locate_exercise_boundary(&params, &spec, 5, 5, 5).unwrap() {
            BoundaryOutcome::AllPositive => {}
            other => panic!("expected AllPositive, got {other:?}"),
        }
        let payer_px = swaption_price(&params, &spec, 5, 5, 5).unwrap().price;
        assert!(payer_px > 0.0);
        let recv_px = swaption_price(
            &params,
            &SwaptionSpec {
                side: Side::Receiver,
                ..spec
            },
            5,
            5,
            5,
        )
        .unwrap()
        .price;
        assert_eq!(recv_px, 0.0);
    }

    #[test]
    fn zero_strike_payer_matches_bond_difference() {
        // model-free: a payer struck at 0 exercises surely, so its value is
        // B(0,T) - B(0,T+tenor) up to approximation error
        let params = setup(0.25, 0.1, 0.03);
        let spec = SwaptionSpec::new(2.0, 1.0, 2, 0.0, Side::Payer).unwrap();
        let px = swaption_price(&params, &spec, 5, 5, 5).unwrap().price;
        let b_t = FastBondPricer::new(&params, 0.0, 2.0, 20)
            .unwrap()
            .price(0.03);
        let b_end = FastBondPricer::new(&params, 0.0, 4.0, 20)
            .unwrap()
            .price(0.03);
        assert!((px - (b_t - b_end)).abs() < 5e-4, "{px} vs {}", b_t - b_end);
    }

    #[test]
    fn atm_boundary_is_interior_with_small_interpolant_residual() {
        let params = setup(0.25, 0.1, 0.03);
        // ATM-ish strike near the forward swap rate
        let spec = SwaptionSpec::new(5.0, 0.5, 10, 0.0331, Side::Payer).unwrap();
        let profile_val = swaption_price(&params, &spec, 5, 5, 5).unwrap();
        match profile_val.boundary {
            BoundaryOutcome::Interior(b) => {
                assert!(b.z0 > b.bracket.0 && b.z0 <= b.bracket.1 + 1e-15);
                let resid = profile_val.interpolant.eval(b.z0);
                assert!(resid.abs() <= 1e-10, "interpolant residual {resid:.2e}");
                assert!((b.x0 - b.z0 * ou_variance(0.1, 5.0).sqrt()).abs() < 1e-15);
            }
            other => panic!("expected Interior, got {other:?}"),
        }
    }

    #[test]
    fn closed_form_equals_direct_tail_quadrature() {
        // the H/h closed form against brute-force integration of
        // omega 1{omega z >= omega z0} f(z) phi(z): tests the machinery
        // independently of pricing accuracy
        let params = setup(0.5, 0.1, 0.03);
        let spec = SwaptionSpec::new(5.0, 1.0, 5, 0.035, Side::Payer).unwrap();
        let val = swaption_price(&params, &spec, 5, 5, 5).unwrap();
        let BoundaryOutcome::Interior(b) = &val.boundary else {
            panic!("expected interior boundary")
        };
        for (side, price) in [
            (Side::Payer, val.price),
            (
                Side::Receiver,
                swaption_price(
                    &params,
                    &SwaptionSpec {
                        side: Side::Receiver,
                        ..spec
                    },
                    5,
                    5,
                    5,
                )
                .unwrap()
                .price,
            ),
        ] {
            let omega = side.omega();
            let (lo, hi) = if omega > 0.0 {
                (b.z0, 40.0)
            } else {
                (-40.0, b.z0)
            };
            let mut direct = 0.0;
            let panels = 200;
            let step = (hi - lo) / panels as f64;
            for p in 0..panels {
                let rule =
                    gauss_legendre_rule(16, lo + p as f64 * step, lo + (p + 1) as f64 * step)
                        .unwrap();
                direct += rule.apply(|z| val.interpolant.eval(z) * crate::numerics::normal_pdf(z));
            }
            direct *= omega;
            assert!(
                (price - direct).abs() < 1e-10,
                "{side:?}: {price} vs {direct}"
            );
        }
    }

    #[test]
    fn payer_decreasing_receiver_increasing_in_strike() {
        let params = setup(0.25, 0.1, 0.03);
        let mut last_payer = f64::INFINITY;
        let mut last_recv = -1.0;
        for i in 0..10 {
            let s = 0.015 + 0.004 * i as f64;
            let payer = SwaptionSpec::new(5.0, 1.0, 5, s, Side::Payer).unwrap();
            let recv = SwaptionSpec {
                side: Side::Receiver,
                ..payer
            };
            let p = swaption_price(&params, &payer, 5, 5, 5).unwrap().price;
            let r = swaption_price(&params, &recv, 5, 5, 5).unwrap().price;
            assert!(
                p < last_payer,
                "payer not strictly decreasing at strike {s}"
            );
            assert!(
                r > last_recv,
                "receiver not strictly increasing at strike {s}"
            );
            last_payer = p;
            last_recv = r;
        }
    }

    #[test]
    fn payoff_bound_holds_at_every_node() {
        let params = setup(0.5, 0.1, 0.06);
        let spec = SwaptionSpec::new(5.0, 1.0, 10, 0.05, Side::Payer).unwrap();
        let val = swaption_price(&params, &spec, 5, 5, 5).unwrap();
        let bound = 1.0 + 10.0 * 1.0 * 0.05;
        for v in &val.node_values {
            assert!(v.abs() < bound);
        }
        // single sign change: negative region strictly left of positive
        let first_pos = val.node_values.iter().position(|&v| v >= 0.0);
        if let Some(i) = first_pos {
            assert!(val.node_values[i..].iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn black_formula_and_implied_vol_round_trip() {
        // vol = 0 payer: intrinsic
        let px = black_swaption_price(0.04, 0.03, 2.0, 5.0, 0.0, Side::Payer);
        assert!((px - 2.0 * 0.01).abs() < 1e-15);
        // ATM parity
        let p = black_swaption_price(0.03, 0.03, 1.0, 5.0, 0.25, Side::Payer);
        let r = black_swaption_price(0.03, 0.03, 1.0, 5.0, 0.25, Side::Receiver);
        assert!((p - r).abs() < 1e-15);
        // ATM closed form: F (2 Phi(vol sqrt(T)/2) - 1)
        let expect = 0.03 * (2.0 * normal_cdf(0.125 * 5f64.sqrt()) - 1.0);
        assert!((p - expect).abs() < 1e-12);
        assert!((p - 0.00660436146105243).abs() < 1e-12);
        // round trip
        let vol = implied_vol(p, 0.03, 0.03, 1.0, 5.0, Side::Payer).unwrap();
        assert!((vol - 0.25).abs() < 1e-8);
        // lower bound maps to zero vol
        let vol = implied_vol(0.01 * 2.0, 0.04, 0.03, 2.0, 5.0, Side::Payer).unwrap();
        assert_eq!(vol, 0.0);
        // out of bounds rejected
        assert!(implied_vol(0.5, 0.03, 0.03, 1.0, 5.0, Side::Payer).is_err());
    }

    #[test]
    fn deterministic_limit_prices_intrinsic() {
        let params = setup(1e-12, 0.1, 0.03);
        // stationary at 3%; deterministic forward is slightly below r0 at
        // long horizons; strike well below forward -> payer pays intrinsic
        let spec = SwaptionSpec::new(2.0, 1.0, 2, 0.01, Side::Payer).unwrap();
        let px = swaption_price(&params, &spec, 5, 5, 5).unwrap().price;
        let beta = conditional_discount_fast(&params, 2.0, 0.0, 5).unwrap();
        let alg = swap_algebra_at_expiry(&params, params.rbar(0.03, 0.0, 2.0), &spec, 5).unwrap();
        let intrinsic = beta * (1.0 - alg.coupon_sum);
        assert!(intrinsic > 0.0);
        assert!((px - intrinsic).abs() < 1e-9);
        let recv = SwaptionSpec {
            side: Side::Receiver,
            ..spec
        };
        assert_eq!(swaption_price(&params, &recv, 5, 5, 5).unwrap().price, 0.0);
    }

    #[test]
    fn parity_disparity_vanishes_without_volatility() {
        let params = setup(1e-12, 0.1, 0.03);
        let fwd = {
            let b_t = FastBondPricer::new(&params, 0.0, 2.0, 20)
                .unwrap()
                .price(0.03);
            let mut ann = 0.0;
            let mut terminal = 0.0;
            for j in 1..=2usize {
                let p = FastBondPricer::new(&params, 0.0, 2.0 + j as f64, 20)
                    .unwrap()
                    .price(0.03);
                ann += p;
                terminal = p;
            }
            (b_t - terminal) / ann
        };
        let spec = SwaptionSpec::new(2.0, 1.0, 2, fwd, Side::Payer).unwrap();
        let d = parity_disparity(&params, &spec, 5, 5, 5).unwrap();
        assert!(d.abs() < 1e-6, "disparity {d}");
    }
}
