//! Benchmark-table runners. Each produces plain rows; serialization lives in
//! [`crate::output`]. Sweeps parallelize over parameter blocks and assemble
//! rows in grid order, so output is deterministic for a given seed.

use anyhow::{anyhow, Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use black_karasinski::bond::bond_price_fast;
use black_karasinski::oracle::{
    lattice_build, mc_bond_prices, swaption_payoff, Lattice, LatticeConfig, McConfig,
};
use black_karasinski::swaption::{implied_vol, Side, SwaptionPricer};
use black_karasinski::ModelParams;

use crate::grids;

#[derive(Debug, Clone)]
pub struct BondTableSettings {
    pub blocks: Vec<(f64, f64, f64)>,
    pub maturities: Vec<f64>,
    pub paths: u64,
    pub steps_per_year: u32,
    pub seed: u64,
    pub gh_points: usize,
    /// Skip the Monte Carlo column (approximation side only).
    pub skip_mc: bool,
}

impl Default for BondTableSettings {
    fn default() -> Self {
        BondTableSettings {
            blocks: grids::BLOCKS.to_vec(),
            maturities: grids::BOND_MATURITIES.to_vec(),
            paths: 1_000_000,
            steps_per_year: 64,
            seed: 1,
            gh_points: 20,
            skip_mc: false,
        }
    }
}

/// One bond-table row; yields are raw decimals, not percent.
#[derive(Debug, Clone, Serialize)]
pub struct BondRow {
    pub r0: f64,
    pub b: f64,
    pub sigma: f64,
    pub maturity: f64,
    pub mc_yield: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub a2_yield: f64,
    /// a2_yield - mc_yield, computed from this row's raw columns.
    pub error: Option<f64>,
}

pub fn run_bond_table(s: &BondTableSettings) -> Result<Vec<BondRow>> {
    let per_block: Vec<Result<Vec<BondRow>>> = s
        .blocks
        .par_iter()
        .enumerate()
        .map(|(idx, &(r0, b, sigma))| {
            let params = grids::block_params(r0, b, sigma);
            let mc = if s.skip_mc {
                None
            } else {
                let cfg = McConfig {
                    paths: s.paths,
                    steps_per_year: s.steps_per_year,
                    seed: s.seed.wrapping_add(idx as u64),
                    antithetic: true,
                };
                Some(
                    mc_bond_prices(&params, 0.0, &s.maturities, &cfg)
                        .with_context(|| format!("Monte Carlo for block {idx}"))?,
                )
            };
            let mut rows = Vec::with_capacity(s.maturities.len());
            for (j, &tau) in s.maturities.iter().enumerate() {
                let a2 = bond_price_fast(&params, r0, 0.0, tau, s.gh_points)?.ytm;
                let (mc_yield, mc_stderr) = match &mc {
                    Some(est) => {
                        let e = &est[j];
                        (Some(-e.mean.ln() / tau), Some(e.stderr / (e.mean * tau)))
                    }
                    None => (None, None),
                };
                rows.push(BondRow {
                    r0,
                    b,
                    sigma,
                    maturity: tau,
                    mc_yield,
                    mc_stderr,
                    a2_yield: a2,
                    error: mc_yield.map(|y| a2 - y),
                });
            }
            Ok(rows)
        })
        .collect();
    let mut rows = Vec::new();
    for block in per_block {
        rows.extend(block?);
    }
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct SwaptionTableSettings {
    pub blocks: Vec<(f64, f64, f64)>,
    pub expiries: Vec<f64>,
    pub tenors: Vec<f64>,
    pub period: f64,
    /// Lattice steps per year; `None` picks a per-expiry resolution that
    /// keeps roughly 512 steps to expiry (clamped to [64, 512]).
    pub steps_per_year: Option<u32>,
    pub k: usize,
    pub m: usize,
    pub n: usize,
}

impl Default for SwaptionTableSettings {
    fn default() -> Self {
        SwaptionTableSettings {
            blocks: grids::BLOCKS.to_vec(),
            expiries: grids::SWAPTION_EXPIRIES.to_vec(),
            tenors: grids::SWAPTION_TENORS.to_vec(),
            period: grids::SWAPTION_PERIOD,
            steps_per_year: None,
            k: 5,
            m: 5,
            n: 5,
        }
    }
}

fn auto_steps_per_year(expiry: f64) -> u32 {
    if expiry <= 1.0 {
        512
    } else if expiry <= 2.0 {
        256
    } else if expiry <= 5.0 {
        128
    } else {
        64
    }
}

/// One moneyness-grid row; vols are raw decimals. `approx_vol` is `None`
/// when the approximate price is 0 (deep out of the money), and `error`
/// needs both vols.
#[derive(Debug, Clone, Serialize)]
pub struct SwaptionRow {
    pub r0: f64,
    pub b: f64,
    pub sigma: f64,
    pub expiry: f64,
    pub tenor: f64,
    pub moneyness: f64,
    pub side: &'static str,
    pub forward: f64,
    pub approx_price: f64,
    pub lattice_price: f64,
    pub approx_vol: Option<f64>,
    pub lattice_vol: Option<f64>,
    pub error: Option<f64>,
}

/// One put-call disparity row (ATM strike).
#[derive(Debug, Clone, Serialize)]
pub struct ParityRow {
    pub r0: f64,
    pub b: f64,
    pub sigma: f64,
    pub expiry: f64,
    pub tenor: f64,
    pub forward: f64,
    pub payer_vol: f64,
    pub receiver_vol: f64,
    pub disparity: f64,
}

pub fn run_swaption_table(s: &SwaptionTableSettings) -> Result<Vec<SwaptionRow>> {
    Ok(run_swaption_sweep(s)?.0)
}

pub fn run_parity_table(s: &SwaptionTableSettings) -> Result<Vec<ParityRow>> {
    Ok(run_swaption_sweep(s)?.1)
}

/// State shared by every strike at one (block, expiry, tenor) cell.
struct ExpiryContext {
    lattice: Lattice,
    /// per-node B(T, T + k period) at the expiry slice
    node_bonds: Vec<Vec<f64>>,
    /// Richardson-extrapolated time-0 bonds B(0, T + k period)
    bonds_level: Vec<f64>,
    /// Richardson-extrapolated B(0, T)
    bond_expiry: f64,
}

impl ExpiryContext {
    /// Build from a full- and half-resolution lattice pair. The half grid
    /// only refines the time-0 bonds (smooth in dt, so the O(dt) discounting
    /// bias extrapolates away); option payoffs stay on the full grid.
    fn new(
        params: &ModelParams,
        expiry: f64,
        period: f64,
        payments: usize,
        spy: u32,
    ) -> Result<Self> {
        let horizon = expiry + payments as f64 * period;
        let fine = lattice_build(
            params,
            horizon,
            &LatticeConfig {
                steps_per_year: spy,
                width_multiplier: 1.0,
            },
        )?;
        let coarse = lattice_build(
            params,
            horizon,
            &LatticeConfig {
                steps_per_year: (spy / 2).max(4),
                width_multiplier: 1.0,
            },
        )?;
        let node_bonds = fine.expiry_bond_set(expiry, period, payments)?;
        let expiry_slice = fine.slice_index(expiry)?;
        // roll everything to time 0 in one sweep: the k node-bond vectors
        // plus a unit payoff at expiry for B(0, T)
        let mut items: Vec<(usize, Vec<f64>)> = node_bonds
            .iter()
            .map(|v| (expiry_slice, v.clone()))
            .collect();
        items.push((expiry_slice, vec![1.0; node_bonds[0].len()]));
        let rolled = fine.roll_back_many(items, 0);
        let fine_levels: Vec<f64> = rolled.iter().map(|v| v[0]).collect();

        let coarse_expiry_slice = coarse.slice_index(expiry)?;
        let mut coarse_items = Vec::with_capacity(payments + 1);
        for k in 1..=payments {
            let hi = coarse.slice_index(expiry + k as f64 * period)?;
            coarse_items.push((hi, vec![1.0; (2 * coarse.width(hi) + 1) as usize]));
        }
        coarse_items.push((
            coarse_expiry_slice,
            vec![1.0; (2 * coarse.width(coarse_expiry_slice) + 1) as usize],
        ));
        let coarse_levels: Vec<f64> = coarse
            .roll_back_many(coarse_items, 0)
            .iter()
            .map(|v| v[0])
            .collect();

        let richardson: Vec<f64> = fine_levels
            .iter()
            .zip(&coarse_levels)
            .map(|(&f, &c)| 2.0 * f - c)
            .collect();
        Ok(ExpiryContext {
            lattice: fine,
            node_bonds,
            bonds_level: richardson[..payments].to_vec(),
            bond_expiry: richardson[payments],
        })
    }

    /// Forward swap rate and annuity at time 0 for the first `n_pay`
    /// payments.
    fn forward(&self, period: f64, n_pay: usize) -> (f64, f64) {
        let annuity: f64 = period * self.bonds_level[..n_pay].iter().sum::<f64>();
        (
            (self.bond_expiry - self.bonds_level[n_pay - 1]) / annuity,
            annuity,
        )
    }

    fn lattice_price(
        &self,
        expiry: f64,
        period: f64,
        n_pay: usize,
        strike: f64,
        side: Side,
    ) -> Result<f64> {
        let payoff = swaption_payoff(&self.node_bonds[..n_pay], period, strike, side.omega());
        Ok(self.lattice.present_value(payoff, expiry)?)
    }
}

fn vol_or_none(
    price: f64,
    fwd: f64,
    strike: f64,
    annuity: f64,
    expiry: f64,
    side: Side,
) -> Result<Option<f64>> {
    if price <= 0.0 {
        return Ok(None);
    }
    Ok(Some(implied_vol(
        price, fwd, strike, annuity, expiry, side,
    )?))
}

/// Run the full expiry/tenor/moneyness sweep once, returning both the
/// moneyness rows and the ATM parity rows.
pub fn run_swaption_sweep(s: &SwaptionTableSettings) -> Result<(Vec<SwaptionRow>, Vec<ParityRow>)> {
    if s.tenors.is_empty() || s.expiries.is_empty() {
        return Err(anyhow!("empty swaption grid"));
    }
    let max_tenor = s.tenors.iter().cloned().fold(0.0, f64::max);
    let max_payments = (max_tenor / s.period).round() as usize;
    let per_block: Vec<Result<(Vec<SwaptionRow>, Vec<ParityRow>)>> = s
        .blocks
        .par_iter()
        .map(|&(r0, b, sigma)| {
            let params = grids::block_params(r0, b, sigma);
            let mut srows = Vec::new();
            let mut prows = Vec::new();
            for &expiry in &s.expiries {
                let spy = s
                    .steps_per_year
                    .unwrap_or_else(|| auto_steps_per_year(expiry));
                let ctx = ExpiryContext::new(&params, expiry, s.period, max_payments, spy)?;
                for &tenor in &s.tenors {
                    let n_pay = (tenor / s.period).round() as usize;
                    if n_pay == 0 || (n_pay as f64 * s.period - tenor).abs() > 1e-9 {
                        return Err(anyhow!(
                            "tenor {tenor} not a multiple of period {}",
                            s.period
                        ));
                    }
                    let (fwd, annuity) = ctx.forward(s.period, n_pay);
                    let approx =
                        SwaptionPricer::new(&params, expiry, s.period, n_pay, s.m, s.n, s.k)?;
                    for (side, ladder) in [
                        (Side::Receiver, grids::RECEIVER_MONEYNESS.as_slice()),
                        (Side::Payer, grids::PAYER_MONEYNESS.as_slice()),
                    ] {
                        for &mny in ladder {
                            let strike = mny * fwd;
                            let a_price = approx.value(strike, side)?.price;
                            let l_price =
                                ctx.lattice_price(expiry, s.period, n_pay, strike, side)?;
                            let a_vol = vol_or_none(a_price, fwd, strike, annuity, expiry, side)?;
                            let l_vol = vol_or_none(l_price, fwd, strike, annuity, expiry, side)?;
                            srows.push(SwaptionRow {
                                r0,
                                b,
                                sigma,
                                expiry,
                                tenor,
                                moneyness: mny,
                                side: match side {
                                    Side::Payer => "payer",
                                    Side::Receiver => "receiver",
                                },
                                forward: fwd,
                                approx_price: a_price,
                                lattice_price: l_price,
                                approx_vol: a_vol,
                                lattice_vol: l_vol,
                                error: a_vol.zip(l_vol).map(|(a, l)| a - l),
                            });
                        }
                    }
                    // ATM parity from the approximation alone
                    let payer = approx.value(fwd, Side::Payer)?.price;
                    let receiver = approx.value(fwd, Side::Receiver)?.price;
                    let payer_vol = implied_vol(payer, fwd, fwd, annuity, expiry, Side::Payer)?;
                    let receiver_vol =
                        implied_vol(receiver, fwd, fwd, annuity, expiry, Side::Receiver)?;
                    prows.push(ParityRow {
                        r0,
                        b,
                        sigma,
                        expiry,
                        tenor,
                        forward: fwd,
                        payer_vol,
                        receiver_vol,
                        disparity: payer_vol - receiver_vol,
                    });
                }
            }
            Ok((srows, prows))
        })
        .collect();
    let mut srows = Vec::new();
    let mut prows = Vec::new();
    for block in per_block {
        let (sr, pr) = block?;
        srows.extend(sr);
        prows.extend(pr);
    }
    Ok((srows, prows))
}

#[derive(Debug, Clone)]
pub struct ComparisonSettings {
    pub paths: u64,
    /// Steps per year for maturities >= 0.5y; the 0.1y bond runs on its own
    /// 640-per-year grid where the trapezoid bias is negligible even at the
    /// comparison run's strong mean reversion.
    pub steps_per_year: u32,
    pub seed: u64,
    pub gh_points: usize,
}

impl Default for ComparisonSettings {
    fn default() -> Self {
        ComparisonSettings {
            paths: 1_000_000,
            steps_per_year: 256,
            seed: 1,
            gh_points: 20,
        }
    }
}

/// One comparison-table row; errors in raw decimals, reference columns are
/// the published constants (percent converted to decimals).
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonRow {
    pub maturity: f64,
    pub mc_yield: f64,
    pub mc_stderr: f64,
    pub a2_yield: f64,
    pub a2_error: f64,
    pub published_a2_error: f64,
    pub ref_small_vol_error: f64,
    pub ref_ee1_error: f64,
    pub ref_ee2_error: f64,
    pub ref_ee3_error: f64,
}

pub fn run_comparison_table(s: &ComparisonSettings) -> Result<(Vec<ComparisonRow>, &'static str)> {
    let params = grids::comparison_params();
    let long: Vec<f64> = grids::COMPARISON_MATURITIES
        .iter()
        .cloned()
        .filter(|&m| m >= 0.5)
        .collect();
    let cfg = McConfig {
        paths: s.paths,
        steps_per_year: s.steps_per_year,
        seed: s.seed,
        antithetic: true,
    };
    let long_est = mc_bond_prices(&params, 0.0, &long, &cfg)?;
    let short_cfg = McConfig {
        steps_per_year: 640,
        ..cfg
    };
    let short_est = mc_bond_prices(&params, 0.0, &[0.1], &short_cfg)?;

    let mut rows = Vec::new();
    for (i, &tau) in grids::COMPARISON_MATURITIES.iter().enumerate() {
        let est = if tau < 0.5 {
            short_est[0]
        } else {
            long_est[i - 1]
        };
        let mc_yield = -est.mean.ln() / tau;
        let a2 = bond_price_fast(&params, params.r0(), 0.0, tau, s.gh_points)?.ytm;
        rows.push(ComparisonRow {
            maturity: tau,
            mc_yield,
            mc_stderr: est.stderr / (est.mean * tau),
            a2_yield: a2,
            a2_error: a2 - mc_yield,
            published_a2_error: grids::COMPARISON_REF_A2[i] / 100.0,
            ref_small_vol_error: grids::COMPARISON_REF_SMALL_VOL[i] / 100.0,
            ref_ee1_error: grids::COMPARISON_REF_EE1[i] / 100.0,
            ref_ee2_error: grids::COMPARISON_REF_EE2[i] / 100.0,
            ref_ee3_error: grids::COMPARISON_REF_EE3[i] / 100.0,
        });
    }
    Ok((rows, grids::COMPARISON_WARNING))
}
