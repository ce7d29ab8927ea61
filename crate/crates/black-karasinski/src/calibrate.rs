//! Model calibration: drift bootstrap to a zero-coupon curve, then
//! derivative-free fitting of (sigma, b) to ATM swaption vols.
//!
//! Stage 1 walks the curve left to right, solving one drift level per
//! maturity segment so the fast bond approximation reproduces each quoted
//! yield. Stage 2 wraps stage 1 inside a Nelder-Mead search over (sigma, b):
//! every trial re-bootstraps the drift, so bond quotes stay exactly fitted
//! while the simplex matches the vol quotes.

use crate::bond::FastBondPricer;
use crate::model::ModelParams;
use crate::numerics::solve_bracketed_root;
use crate::swaption::{implied_vol, Side, SwaptionPricer};
use crate::{Error, Result};

/// A zero-coupon yield observation (continuous compounding, t = 0 start).
#[derive(Debug, Clone, Copy)]
pub struct BondObservation {
    pub maturity: f64,
    pub ytm: f64,
}

/// An ATM swaption implied-vol observation.
#[derive(Debug, Clone, Copy)]
pub struct SwaptionObservation {
    pub expiry: f64,
    pub period: f64,
    pub payments: usize,
    pub vol: f64,
}

/// Quadrature / interpolation sizes used while calibrating.
#[derive(Debug, Clone, Copy)]
pub struct CalibrationSettings {
    pub gh_points: usize,
    pub k: usize,
    pub m: usize,
    pub n: usize,
    pub max_iterations: usize,
}

impl Default for CalibrationSettings {
    fn default() -> Self {
        CalibrationSettings {
            gh_points: 20,
            k: 5,
            m: 5,
            n: 5,
            max_iterations: 200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CalibrationResult {
    pub params: ModelParams,
    /// Per-instrument residuals, bonds first (yield units) then swaptions
    /// (vol units), in input order.
    pub residuals: Vec<f64>,
    /// Sum of squared swaption vol residuals (bonds are fitted exactly).
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

const SIGMA_BOX: (f64, f64) = (0.01, 2.0);
const B_BOX: (f64, f64) = (0.001, 1.0);

/// Solve the piecewise-constant drift so the fast bond price reproduces each
/// quoted yield, one segment per maturity.
pub fn bootstrap_drift(
    template: &ModelParams,
    bonds: &[BondObservation],
    gh_points: usize,
) -> Result<ModelParams> {
    if bonds.is_empty() {
        return Err(Error::invalid("bootstrap needs at least one bond quote"));
    }
    if !bonds.windows(2).all(|w| w[0].maturity < w[1].maturity) {
        return Err(Error::invalid(
            "bond maturities must be strictly increasing",
        ));
    }
    let b = template.b();
    let mut knots: Vec<(f64, f64)> = Vec::with_capacity(bonds.len());
    let mut segment_start = 0.0;
    for quote in bonds {
        if !(quote.maturity > 0.0) {
            return Err(Error::invalid("bond maturities must be positive"));
        }
        knots.push((segment_start, b * (0.03f64).ln()));
        let slot = knots.len() - 1;
        let target_price = (-quote.ytm * quote.maturity).exp();
        let objective = |level: f64| -> f64 {
            let mut trial = knots.clone();
            trial[slot].1 = level;
            let params = template.with_drift(&trial).expect("valid drift ladder");
            let price = FastBondPricer::new(&params, 0.0, quote.maturity, gh_points)
                .and_then(|p| p.quote(params.r0()))
                .map(|q| q.price)
                .unwrap_or(f64::NAN);
            price - target_price
        };
        // drift level bracket: mean-reversion targets between 1 bp and 100%
        let mut lo = b * (1e-4f64).ln();
        let mut hi = b * (1.0f64).ln() + 1e-12;
        for _ in 0..8 {
            if objective(lo) * objective(hi) <= 0.0 {
                break;
            }
            lo *= 2.0;
            hi += b;
        }
        let level = solve_bracketed_root(objective, lo, hi, 1e-10)?;
        knots[slot].1 = level;
        segment_start = quote.maturity;
    }
    template.with_drift(&knots)
}

fn vol_residuals(
    params: &ModelParams,
    swaptions: &[SwaptionObservation],
    s: &CalibrationSettings,
) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(swaptions.len());
    for q in swaptions {
        // ATM strike from the model's own forward
        let mut annuity = 0.0;
        let mut terminal = 0.0;
        let bond_t = FastBondPricer::new(params, 0.0, q.expiry, s.gh_points)?.price(params.r0());
        for j in 1..=q.payments {
            terminal =
                FastBondPricer::new(params, 0.0, q.expiry + j as f64 * q.period, s.gh_points)?
                    .price(params.r0());
            annuity += q.period * terminal;
        }
        let forward = (bond_t - terminal) / annuity;
        let pricer = SwaptionPricer::new(params, q.expiry, q.period, q.payments, s.m, s.n, s.k)?;
        let price = pricer.value(forward, Side::Payer)?.price;
        let vol = implied_vol(price, forward, forward, annuity, q.expiry, Side::Payer)?;
        out.push(vol - q.vol);
    }
    Ok(out)
}

fn objective(
    sigma: f64,
    b: f64,
    template: &ModelParams,
    bonds: &[BondObservation],
    swaptions: &[SwaptionObservation],
    s: &CalibrationSettings,
) -> f64 {
    // box penalty keeps the simplex inside the admissible region
    if !(SIGMA_BOX.0..=SIGMA_BOX.1).contains(&sigma) || !(B_BOX.0..=B_BOX.1).contains(&b) {
        return 1e6 + sigma.abs() + b.abs();
    }
    let trial = match ModelParams::with_constant_drift(sigma, b, template.r0(), b * (0.03f64).ln())
    {
        Ok(t) => t,
        Err(_) => return 1e6,
    };
    let fitted = match bootstrap_drift(&trial, bonds, s.gh_points) {
        Ok(f) => f,
        Err(_) => return 1e6,
    };
    match vol_residuals(&fitted, swaptions, s) {
        Ok(res) => res.iter().map(|r| r * r).sum(),
        Err(_) => 1e6,
    }
}

/// Two-stage calibration. With no swaption quotes only the bootstrap runs.
pub fn calibrate(
    template: &ModelParams,
    bonds: &[BondObservation],
    swaptions: &[SwaptionObservation],
    settings: &CalibrationSettings,
) -> Result<CalibrationResult> {
    let s = settings;
    if swaptions.is_empty() {
        let params = bootstrap_drift(template, bonds, s.gh_points)?;
        let residuals = bond_residuals(&params, bonds, s.gh_points)?;
        return Ok(CalibrationResult {
            params,
            residuals,
            objective: 0.0,
            iterations: 0,
            converged: true,
        });
    }

    // Nelder-Mead on (sigma, b)
    let f = |p: [f64; 2]| objective(p[0], p[1], template, bonds, swaptions, s);
    let start = [template.sigma(), template.b()];
    let mut simplex = [
        start,
        [(start[0] * 1.25).min(SIGMA_BOX.1), start[1]],
        [start[0], (start[1] * 1.4).min(B_BOX.1)],
    ];
    let mut values = simplex.map(f);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < s.max_iterations {
        iterations += 1;
        // order best -> worst
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);
        let spread = (simplex[1][0] - simplex[0][0])
            .abs()
            .max((simplex[2][0] - simplex[0][0]).abs())
            + (simplex[1][1] - simplex[0][1])
                .abs()
                .max((simplex[2][1] - simplex[0][1]).abs());
        if spread < 2e-5 || values[0] < 1e-16 {
            converged = true;
            break;
        }
        let centroid = [
            0.5 * (simplex[0][0] + simplex[1][0]),
            0.5 * (simplex[0][1] + simplex[1][1]),
        ];
        let reflect = [
            centroid[0] + (centroid[0] - simplex[2][0]),
            centroid[1] + (centroid[1] - simplex[2][1]),
        ];
        let f_reflect = f(reflect);
        if f_reflect < values[0] {
            let expand = [
                centroid[0] + 2.0 * (centroid[0] - simplex[2][0]),
                centroid[1] + 2.0 * (centroid[1] - simplex[2][1]),
            ];
            let f_expand = f(expand);
            if f_expand < f_reflect {
                simplex[2] = expand;
                values[2] = f_expand;
            } else {
                simplex[2] = reflect;
                values[2] = f_reflect;
            }
        } else if f_reflect < values[1] {
            simplex[2] = reflect;
            values[2] = f_reflect;
        } else {
            let contract = [
                centroid[0] + 0.5 * (simplex[2][0] - centroid[0]),
                centroid[1] + 0.5 * (simplex[2][1] - centroid[1]),
            ];
            let f_contract = f(contract);
            if f_contract < values[2] {
                simplex[2] = contract;
                values[2] = f_contract;
            } else {
                // shrink toward the best vertex
                for i in 1..3 {
                    simplex[i] = [
                        simplex[0][0] + 0.5 * (simplex[i][0] - simplex[0][0]),
                        simplex[0][1] + 0.5 * (simplex[i][1] - simplex[0][1]),
                    ];
                    values[i] = f(simplex[i]);
                }
            }
        }
    }

    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let best = simplex[order[0]];
    let trial = ModelParams::with_constant_drift(
        best[0],
        best[1],
        template.r0(),
        best[1] * (0.03f64).ln(),
    )?;
    let params = bootstrap_drift(&trial, bonds, s.gh_points)?;
    let mut residuals = bond_residuals(&params, bonds, s.gh_points)?;
    residuals.extend(vol_residuals(&params, swaptions, s)?);
    Ok(CalibrationResult {
        params,
        residuals,
        objective: values[order[0]],
        iterations,
        converged,
    })
}

fn bond_residuals(
    params: &ModelParams,
    bonds: &[BondObservation],
    gh_points: usize,
) -> Result<Vec<f64>> {
    bonds
        .iter()
        .map(|q| {
            let quote =
                FastBondPricer::new(params, 0.0, q.maturity, gh_points)?.quote(params.r0())?;
            Ok(quote.ytm - q.ytm)
        })
        .collect()
}
