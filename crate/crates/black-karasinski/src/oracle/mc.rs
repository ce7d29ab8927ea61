//! Exact-discretization Monte Carlo for discount factors.
//!
//! The deviation follows `X_{t+d} = X_t e^{-bd} + eps`,
//! `eps ~ N(0, (1 - e^{-2bd})/(2b))`, the exact OU transition, and the
//! short rate along a path is `rbar exp(sigma X)`. The only discretization
//! error is the trapezoidal rate integral, O(dt^2).
//!
//! Paths are generated in fixed-size chunks with per-chunk seeds derived
//! from the master seed, summed in chunk order, so results are bit-identical
//! for a given seed regardless of thread count.

use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::model::{ou_variance, ModelParams};
use crate::{Error, Result};

/// Monte Carlo run configuration.
#[derive(Debug, Clone, Copy)]
pub struct McConfig {
    /// Total simulated paths (pairs count as two when antithetic).
    pub paths: u64,
    pub steps_per_year: u32,
    pub seed: u64,
    pub antithetic: bool,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            paths: 1_000_000,
            steps_per_year: 64,
            seed: 1,
            antithetic: true,
        }
    }
}

impl McConfig {
    fn validate(&self) -> Result<()> {
        if self.paths < 2 || (self.antithetic && !self.paths.is_multiple_of(2)) {
            return Err(Error::invalid(format!(
                "paths must be >= 2 (and even when antithetic), got {}",
                self.paths
            )));
        }
        if self.steps_per_year < 4 {
            return Err(Error::invalid(format!(
                "steps_per_year must be >= 4, got {}",
                self.steps_per_year
            )));
        }
        Ok(())
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub paths: u64,
}

/// One conditional-discount bin over a terminal-deviation range.
#[derive(Debug, Clone, Copy)]
pub struct McBin {
    pub x_lo: f64,
    pub x_hi: f64,
    /// `None` when no path landed in the bin.
    pub estimate: Option<McEstimate>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

const CHUNK_UNITS: u64 = 4096;

/// Per-thread simulation grid, shared across chunks.
struct Grid {
    dt: f64,
    decay: f64,
    step_sd: f64,
    sigma: f64,
    /// ln rbar at every grid time (index 0 = start).
    ln_rbar: Vec<f64>,
    /// sorted step indices at which the discount factor is recorded
    checkpoints: Vec<usize>,
}

impl Grid {
    fn new(
        params: &ModelParams,
        start: f64,
        dt: f64,
        n_steps: usize,
        checkpoints: Vec<usize>,
    ) -> Self {
        let ln_r_start = params.ln_rbar(params.r0().ln(), 0.0, start);
        let ln_rbar = (0..=n_steps)
            .map(|i| params.ln_rbar(ln_r_start, start, i as f64 * dt))
            .collect();
        Grid {
            dt,
            decay: (-params.b() * dt).exp(),
            step_sd: ou_variance(params.b(), dt).sqrt(),
            sigma: params.sigma(),
            ln_rbar,
            checkpoints,
        }
    }

    /// Walk one path (plus its antithetic mirror), recording the discount at
    /// each checkpoint; `record(checkpoint_idx, discount, x_terminal)` is
    /// called once per leg per checkpoint.
    fn walk(&self, rng: &mut SmallRng, antithetic: bool, mut record: impl FnMut(usize, f64, f64)) {
        let n = self.ln_rbar.len() - 1;
        let mut x = 0.0;
        let mut xa = 0.0;
        let mut integral = 0.0;
        let mut integral_a = 0.0;
        let mut r_prev = self.ln_rbar[0].exp();
        let mut ra_prev = r_prev;
        let mut next_ck = 0;
        for i in 1..=n {
            let eps: f64 = self.step_sd * rng.sample::<f64, _>(StandardNormal);
            x = x * self.decay + eps;
            let r = (self.ln_rbar[i] + self.sigma * x).exp();
            integral += 0.5 * (r_prev + r) * self.dt;
            r_prev = r;
            if antithetic {
                xa = xa * self.decay - eps;
                let ra = (self.ln_rbar[i] + self.sigma * xa).exp();
                integral_a += 0.5 * (ra_prev + ra) * self.dt;
                ra_prev = ra;
            }
            while next_ck < self.checkpoints.len() && self.checkpoints[next_ck] == i {
                record(next_ck, (-integral).exp(), x);
                if antithetic {
                    record(next_ck, (-integral_a).exp(), xa);
                }
                next_ck += 1;
            }
        }
    }
}

/// Running (count, mean, sum of squared deviations) in Welford form;
/// chunk partials merge exactly and without the cancellation a plain
/// sum-of-squares accumulator suffers near zero variance.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let d = x - self.mean;
        self.mean += d / self.count;
        self.m2 += d * (x - self.mean);
    }

    fn merge(&mut self, other: &Moments) {
        if other.count == 0.0 {
            return;
        }
        if self.count == 0.0 {
            *self = *other;
            return;
        }
        let total = self.count + other.count;
        let d = other.mean - self.mean;
        self.mean += d * other.count / total;
        self.m2 += other.m2 + d * d * self.count * other.count / total;
        self.count = total;
    }

    fn estimate(&self, reported_paths: u64) -> McEstimate {
        let var = if self.count > 1.0 {
            (self.m2 / (self.count - 1.0)).max(0.0)
        } else {
            0.0
        };
        McEstimate {
            mean: self.mean,
            stderr: (var / self.count).sqrt(),
            paths: reported_paths,
        }
    }
}

/// Accumulate mean/variance per checkpoint over units (a unit is a path, or
/// an antithetic pair averaged before accumulation).
fn run_discount_simulation(grid: &Grid, cfg: &McConfig) -> Vec<McEstimate> {
    let units = if cfg.antithetic {
        cfg.paths / 2
    } else {
        cfg.paths
    };
    let n_chunks = units.div_ceil(CHUNK_UNITS);
    let n_ck = grid.checkpoints.len();
    let partials: Vec<Vec<Moments>> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = SmallRng::seed_from_u64(splitmix64(cfg.seed ^ (chunk + 1)));
            let lo = chunk * CHUNK_UNITS;
            let count = CHUNK_UNITS.min(units - lo);
            let mut stats = vec![Moments::default(); n_ck];
            let mut leg_values = vec![0.0; n_ck];
            let mut legs_seen = vec![0u8; n_ck];
            for _ in 0..count {
                leg_values.iter_mut().for_each(|v| *v = 0.0);
                legs_seen.iter_mut().for_each(|v| *v = 0);
                grid.walk(&mut rng, cfg.antithetic, |ck, disc, _| {
                    leg_values[ck] += disc;
                    legs_seen[ck] += 1;
                });
                for ck in 0..n_ck {
                    stats[ck].push(leg_values[ck] / legs_seen[ck] as f64);
                }
            }
            stats
        })
        .collect();
    let mut totals = vec![Moments::default(); n_ck];
    for chunk_stats in &partials {
        for (total, part) in totals.iter_mut().zip(chunk_stats) {
            total.merge(part);
        }
    }
    totals.iter().map(|m| m.estimate(cfg.paths)).collect()
}

/// `B(start, start + tau)` by simulation of the deviation over `[0, tau]`
/// from the zero-volatility rate at `start` (the spot rate when start = 0).
pub fn mc_bond_price(
    params: &ModelParams,
    start: f64,
    tau: f64,
    cfg: &McConfig,
) -> Result<McEstimate> {
    cfg.validate()?;
    if !(tau > 0.0) {
        return Err(Error::invalid(format!("tau must be > 0, got {tau}")));
    }
    let n_steps = ((tau * cfg.steps_per_year as f64).round() as usize).max(4);
    let dt = tau / n_steps as f64;
    let grid = Grid::new(params, start, dt, n_steps, vec![n_steps]);
    Ok(run_discount_simulation(&grid, cfg)[0])
}

/// Bond prices at several maturities from one set of paths. Maturities must
/// lie on the `steps_per_year` grid.
pub fn mc_bond_prices(
    params: &ModelParams,
    start: f64,
    maturities: &[f64],
    cfg: &McConfig,
) -> Result<Vec<McEstimate>> {
    cfg.validate()?;
    if maturities.is_empty() {
        return Err(Error::invalid("no maturities given"));
    }
    if !maturities.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::invalid("maturities must be strictly increasing"));
    }
    let dt = 1.0 / cfg.steps_per_year as f64;
    let mut checkpoints = Vec::with_capacity(maturities.len());
    for &m in maturities {
        let idx = (m / dt).round() as usize;
        if idx == 0 || (idx as f64 * dt - m).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "maturity {m} not on the 1/{} year grid",
                cfg.steps_per_year
            )));
        }
        checkpoints.push(idx);
    }
    let n_steps = *checkpoints.last().unwrap();
    let grid = Grid::new(params, start, dt, n_steps, checkpoints);
    Ok(run_discount_simulation(&grid, cfg))
}

/// `E[beta(T) | X_T in bin]` by path binning over `[-3 sqrt(V(T)), +3 sqrt(V(T))]`.
pub fn mc_conditional_discount(
    params: &ModelParams,
    horizon: f64,
    bins: usize,
    cfg: &McConfig,
) -> Result<Vec<McBin>> {
    cfg.validate()?;
    if bins == 0 || !(horizon > 0.0) {
        return Err(Error::invalid("need bins >= 1 and horizon > 0"));
    }
    let n_steps = ((horizon * cfg.steps_per_year as f64).round() as usize).max(4);
    let dt = horizon / n_steps as f64;
    let grid = Grid::new(params, 0.0, dt, n_steps, vec![n_steps]);
    let span = 3.0 * ou_variance(params.b(), horizon).sqrt();
    let bin_width = 2.0 * span / bins as f64;

    let units = if cfg.antithetic {
        cfg.paths / 2
    } else {
        cfg.paths
    };
    let n_chunks = units.div_ceil(CHUNK_UNITS);
    let partials: Vec<Vec<Moments>> = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = SmallRng::seed_from_u64(splitmix64(cfg.seed ^ (chunk + 1)));
            let lo = chunk * CHUNK_UNITS;
            let count = CHUNK_UNITS.min(units - lo);
            let mut stats = vec![Moments::default(); bins];
            for _ in 0..count {
                grid.walk(&mut rng, cfg.antithetic, |_, disc, x_t| {
                    let pos = (x_t + span) / bin_width;
                    if pos >= 0.0 && pos < bins as f64 {
                        stats[pos as usize].push(disc);
                    }
                });
            }
            stats
        })
        .collect();

    let mut out = Vec::with_capacity(bins);
    for bin in 0..bins {
        let mut total = Moments::default();
        for chunk_stats in &partials {
            total.merge(&chunk_stats[bin]);
        }
        let estimate = if total.count >= 2.0 {
            Some(total.estimate(total.count as u64))
        } else {
            None
        };
        out.push(McBin {
            x_lo: -span + bin as f64 * bin_width,
            x_hi: -span + (bin + 1) as f64 * bin_width,
            estimate,
        });
    }
    Ok(out)
}
