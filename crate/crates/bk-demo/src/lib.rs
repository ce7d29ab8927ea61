//! Browser bindings for the pricing library: a zero-coupon yield curve
//! explorer, a swaption pricer and a Karhunen-Loeve variance-reconstruction
//! view. The static page in `www/` drives these three entry points; all
//! numerics stay in the core crate and the wrappers only shuttle numbers.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use black_karasinski::bond::bond_price_fast;
use black_karasinski::model::{bridge_kl_basis, ou_kl_basis, Kernel};
use black_karasinski::swaption::{implied_vol, BoundaryOutcome, Side, SwaptionSpec};
use black_karasinski::{FastBondPricer, ModelParams};

fn params(r0: f64, b: f64, sigma: f64, r_avg: f64) -> Result<ModelParams, String> {
    ModelParams::with_constant_drift(sigma, b, r0, b * r_avg.ln()).map_err(|e| e.to_string())
}

/// Yields (continuously compounded decimals) of `B(0, tau)` at `points`
/// maturities spread over `(0, max_years]`, flattened as
/// `[tau_1, y_1, tau_2, y_2, ...]`.
pub fn yield_curve_points(
    r0: f64,
    b: f64,
    sigma: f64,
    r_avg: f64,
    max_years: f64,
    points: usize,
) -> Result<Vec<f64>, String> {
    if max_years <= 0.0 || max_years.is_nan() || points == 0 || points > 4096 {
        return Err("need 0 < points <= 4096 and max_years > 0".to_string());
    }
    let p = params(r0, b, sigma, r_avg)?;
    let mut out = Vec::with_capacity(2 * points);
    for i in 1..=points {
        let tau = max_years * i as f64 / points as f64;
        let quote = bond_price_fast(&p, r0, 0.0, tau, 20).map_err(|e| e.to_string())?;
        out.push(tau);
        out.push(quote.ytm);
    }
    Ok(out)
}

#[derive(Deserialize)]
struct SwaptionRequest {
    r0: f64,
    b: f64,
    sigma: f64,
    #[serde(default = "default_r_avg")]
    r_avg: f64,
    expiry: f64,
    tenor: f64,
    #[serde(default = "default_period")]
    period: f64,
    moneyness: f64,
    side: String,
}

fn default_r_avg() -> f64 {
    0.03
}

fn default_period() -> f64 {
    1.0
}

#[derive(Serialize)]
struct SwaptionResponse {
    forward: f64,
    annuity: f64,
    strike: f64,
    price: f64,
    implied_vol: Option<f64>,
    boundary_z0: Option<f64>,
    node_values: Vec<f64>,
}

/// Price one swaption from a JSON request; see [`SwaptionRequest`] fields.
pub fn swaption_quote_json(request: &str) -> Result<String, String> {
    let q: SwaptionRequest = serde_json::from_str(request).map_err(|e| e.to_string())?;
    let side = match q.side.as_str() {
        "payer" => Side::Payer,
        "receiver" => Side::Receiver,
        other => return Err(format!("side must be payer|receiver, got {other}")),
    };
    let p = params(q.r0, q.b, q.sigma, q.r_avg)?;
    let payments = (q.tenor / q.period).round() as usize;
    if payments == 0 || (payments as f64 * q.period - q.tenor).abs() > 1e-9 {
        return Err("tenor must be a positive multiple of period".to_string());
    }
    let bond_t = FastBondPricer::new(&p, 0.0, q.expiry, 20)
        .map_err(|e| e.to_string())?
        .price(q.r0);
    let mut annuity = 0.0;
    let mut terminal = 0.0;
    for j in 1..=payments {
        terminal = FastBondPricer::new(&p, 0.0, q.expiry + j as f64 * q.period, 20)
            .map_err(|e| e.to_string())?
            .price(q.r0);
        annuity += q.period * terminal;
    }
    let forward = (bond_t - terminal) / annuity;
    let strike = q.moneyness * forward;
    let spec =
        SwaptionSpec::new(q.expiry, q.period, payments, strike, side).map_err(|e| e.to_string())?;
    let val = black_karasinski::swaption_price(&p, &spec, 5, 5, 5).map_err(|e| e.to_string())?;
    let vol = if val.price > 0.0 {
        implied_vol(val.price, forward, strike, annuity, q.expiry, side).ok()
    } else {
        None
    };
    let boundary_z0 = match &val.boundary {
        BoundaryOutcome::Interior(b) => Some(b.z0),
        _ => None,
    };
    serde_json::to_string(&SwaptionResponse {
        forward,
        annuity,
        strike,
        price: val.price,
        implied_vol: vol,
        boundary_z0,
        node_values: val.node_values,
    })
    .map_err(|e| e.to_string())
}

/// Kernel variance `V(t)` against its truncated eigen-reconstruction,
/// flattened as `[t, V, partial_sum, ...]` over `points` samples.
pub fn kl_reconstruction_points(
    b: f64,
    horizon: f64,
    bridge: bool,
    terms: usize,
    points: usize,
) -> Result<Vec<f64>, String> {
    if points == 0 || points > 4096 || terms == 0 || terms > 512 {
        return Err("need 0 < points <= 4096 and 0 < terms <= 512".to_string());
    }
    let (kernel, basis) = if bridge {
        (
            Kernel::bridge(b, horizon),
            bridge_kl_basis(b, horizon, terms).map_err(|e| e.to_string())?,
        )
    } else {
        (
            Kernel::ou(b, horizon),
            ou_kl_basis(b, horizon, terms).map_err(|e| e.to_string())?,
        )
    };
    let mut out = Vec::with_capacity(3 * points);
    for i in 0..=points {
        let t = horizon * i as f64 / points as f64;
        let mut partial = 0.0;
        for n in 0..terms {
            let f = basis.eigenfunction(n, t).map_err(|e| e.to_string())?;
            partial += basis.lambdas[n] * f * f;
        }
        out.push(t);
        out.push(kernel.variance(t));
        out.push(partial);
    }
    Ok(out)
}

// thin wasm exports over the testable functions above

#[wasm_bindgen]
pub fn yield_curve(
    r0: f64,
    b: f64,
    sigma: f64,
    r_avg: f64,
    max_years: f64,
    points: usize,
) -> Result<Vec<f64>, JsValue> {
    yield_curve_points(r0, b, sigma, r_avg, max_years, points).map_err(|e| e.into())
}

#[wasm_bindgen]
pub fn swaption_quote(request: &str) -> Result<String, JsValue> {
    swaption_quote_json(request).map_err(|e| e.into())
}

#[wasm_bindgen]
pub fn kl_reconstruction(
    b: f64,
    horizon: f64,
    bridge: bool,
    terms: usize,
    points: usize,
) -> Result<Vec<f64>, JsValue> {
    kl_reconstruction_points(b, horizon, bridge, terms, points).map_err(|e| e.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_matches_core_pricer() {
        let pts = yield_curve_points(0.01, 0.1, 0.25, 0.03, 10.0, 10).unwrap();
        assert_eq!(pts.len(), 20);
        // first sample is the 1y yield from the benchmark grid
        assert_eq!(pts[0], 1.0);
        assert!((pts[1] - 0.01071).abs() < 5e-6);
        // maturities increase, curve stays finite and positive here
        for pair in pts.chunks(2) {
            assert!(pair[1] > 0.0 && pair[1] < 0.04);
        }
    }

    #[test]
    fn swaption_round_trip_through_json() {
        let req = r#"{"r0":0.03,"b":0.1,"sigma":0.25,"expiry":5,"tenor":5,
                      "moneyness":1.0,"side":"payer"}"#;
        let resp = swaption_quote_json(req).unwrap();
        let v: serde_json::Value = serde_json::from_str(&resp).unwrap();
        assert!((v["forward"].as_f64().unwrap() - 0.0334).abs() < 2e-4);
        assert!(v["price"].as_f64().unwrap() > 0.0);
        let vol = v["implied_vol"].as_f64().unwrap();
        assert!((vol - 0.157).abs() < 2e-3, "vol {vol}");
        assert!(swaption_quote_json("{}").is_err());
        assert!(swaption_quote_json(&req.replace("payer", "straddle")).is_err());
    }

    #[test]
    fn reconstruction_stays_below_variance() {
        for bridge in [false, true] {
            let pts = kl_reconstruction_points(0.1, 2.0, bridge, 50, 32).unwrap();
            for triple in pts.chunks(3) {
                assert!(triple[2] <= triple[1] + 1e-12);
                assert!(triple[2] >= 0.0);
            }
        }
    }
}
