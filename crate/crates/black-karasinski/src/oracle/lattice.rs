//! Mean-reverting trinomial lattice on the scaled deviation `y = sigma X`.
//!
//! Node spacing is `dy = wm * sqrt(3 v)` where `v` is the exact one-step
//! variance `sigma^2 (1 - e^{-2b dt})/(2b)`; per-node branch probabilities
//! match the exact conditional mean `e^{-b dt} y` and variance `v`. Standard
//! branching applies inside `|j| < jmax` and switches to the inward-shifted
//! branches at the cap, with `jmax` the classic switchover ceiling (smallest
//! integer past `0.184/(1 - e^{-b dt})`), which keeps every probability in
//! [0, 1].
//!
//! The short rate at node `(i, j)` is `rbar_{0, t_i} e^{j dy}`; a step
//! discounts by `exp(-r dt)` with the rate sampled at the step start. Branch
//! probabilities depend only on `j`, so they are tabulated once; one-step
//! discounts are computed per slice visit, which keeps memory linear in the
//! node-range width even for fine grids.

use crate::model::ModelParams;
use crate::swaption::SwaptionSpec;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct LatticeConfig {
    pub steps_per_year: u32,
    /// Spacing factor on top of sqrt(3) times the step standard deviation.
    pub width_multiplier: f64,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        LatticeConfig {
            steps_per_year: 64,
            width_multiplier: 1.0,
        }
    }
}

/// Built lattice. Immutable after build; backward passes allocate their own
/// working vectors.
#[derive(Debug, Clone)]
pub struct Lattice {
    dt: f64,
    n_steps: usize,
    jmax: i64,
    /// largest node index actually reachable
    reach: i64,
    /// rbar_{0, t_i} * dt per slice
    rbar_dt: Vec<f64>,
    /// e^{j dy} for j in -reach..=reach
    e_dy: Vec<f64>,
    /// center child per node, offset by +reach
    centers: Vec<i64>,
    /// branch probabilities per node, offset by +reach
    p_up: Vec<f64>,
    p_mid: Vec<f64>,
    p_down: Vec<f64>,
}

/// Raw branch numbers for one node; probabilities depend only on j.
fn branch_raw(j: i64, jmax: i64, decay: f64, var_ratio: f64) -> (i64, f64, f64, f64) {
    let c = if j == jmax {
        j - 1
    } else if j == -jmax {
        j + 1
    } else {
        j
    };
    // drift offset from the center child, in dy units
    let q = j as f64 * decay - c as f64;
    let pu = 0.5 * (var_ratio + q * q) + 0.5 * q;
    let pd = 0.5 * (var_ratio + q * q) - 0.5 * q;
    (c, pu, 1.0 - pu - pd, pd)
}

pub fn lattice_build(params: &ModelParams, horizon: f64, cfg: &LatticeConfig) -> Result<Lattice> {
    if !(horizon > 0.0) {
        return Err(Error::invalid(format!(
            "horizon must be > 0, got {horizon}"
        )));
    }
    if cfg.steps_per_year < 4 || !(cfg.width_multiplier > 0.0) {
        return Err(Error::invalid(
            "lattice config needs steps_per_year >= 4 and width_multiplier > 0".to_string(),
        ));
    }
    let b = params.b();
    let sigma = params.sigma();
    let dt = 1.0 / cfg.steps_per_year as f64;
    let n_steps = (horizon * cfg.steps_per_year as f64).round() as usize;
    if n_steps == 0 {
        return Err(Error::invalid("horizon shorter than one step"));
    }
    let decay = (-b * dt).exp();
    let step_var = sigma * sigma * (1.0 - (-2.0 * b * dt).exp()) / (2.0 * b);
    let dy = cfg.width_multiplier * (3.0 * step_var).sqrt();
    let var_ratio = step_var / (dy * dy);
    let jmax = (0.184 / (1.0 - decay)).ceil() as i64;
    let reach = jmax.min(n_steps as i64);

    let size = (2 * reach + 1) as usize;
    let mut centers = Vec::with_capacity(size);
    let mut p_up = Vec::with_capacity(size);
    let mut p_mid = Vec::with_capacity(size);
    let mut p_down = Vec::with_capacity(size);
    for j in -reach..=reach {
        let (c, pu, pm, pd) = branch_raw(j, jmax, decay, var_ratio);
        // config rejection path for extreme width multipliers
        for p in [pu, pm, pd] {
            if !(-1e-12..=1.0 + 1e-12).contains(&p) {
                return Err(Error::invalid(format!(
                    "branch probability {p:.6} out of [0,1] at node {j} \
                     (width_multiplier {})",
                    cfg.width_multiplier
                )));
            }
        }
        centers.push(c);
        p_up.push(pu);
        p_mid.push(pm);
        p_down.push(pd);
    }

    let ln_r0 = params.r0().ln();
    let rbar_dt = (0..n_steps)
        .map(|i| params.ln_rbar(ln_r0, 0.0, i as f64 * dt).exp() * dt)
        .collect();
    let e_dy = (-reach..=reach).map(|j| (j as f64 * dy).exp()).collect();

    Ok(Lattice {
        dt,
        n_steps,
        jmax,
        reach,
        rbar_dt,
        e_dy,
        centers,
        p_up,
        p_mid,
        p_down,
    })
}

impl Lattice {
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Node index range at slice i is `-width(i)..=width(i)`.
    pub fn width(&self, i: usize) -> i64 {
        (i as i64).min(self.jmax)
    }

    #[cfg(test)]
    fn branch(&self, j: i64) -> (i64, f64, f64, f64) {
        let idx = (j + self.reach) as usize;
        (
            self.centers[idx],
            self.p_up[idx],
            self.p_mid[idx],
            self.p_down[idx],
        )
    }

    /// Grid slice for a time, snapping (with a warning) when off-grid.
    pub fn slice_index(&self, time: f64) -> Result<usize> {
        let idx = (time / self.dt).round() as usize;
        if idx > self.n_steps {
            return Err(Error::invalid(format!(
                "time {time} beyond lattice horizon {}",
                self.n_steps as f64 * self.dt
            )));
        }
        if (idx as f64 * self.dt - time).abs() > 1e-9 {
            eprintln!(
                "warning: time {time} snapped to lattice step {} ({} y)",
                idx,
                idx as f64 * self.dt
            );
        }
        Ok(idx)
    }

    /// One-step discounts at slice i for j = -width(i)..=width(i), appended
    /// into `row`.
    fn discount_row(&self, i: usize, row: &mut Vec<f64>) {
        row.clear();
        let w = self.width(i);
        let base = self.rbar_dt[i];
        let off = (self.reach - w) as usize;
        row.extend(
            self.e_dy[off..off + (2 * w + 1) as usize]
                .iter()
                .map(|&e| (-base * e).exp()),
        );
    }

    /// Roll several value vectors back to `target_slice` in one sweep; each
    /// item is (slice where its values live, values). Per-slice discounts are
    /// computed once and shared across the bundle. Returns the rolled values
    /// in input order.
    pub fn roll_back_many(
        &self,
        items: Vec<(usize, Vec<f64>)>,
        target_slice: usize,
    ) -> Vec<Vec<f64>> {
        let start = items.iter().map(|(s, _)| *s).max().unwrap_or(target_slice);
        let mut active: Vec<(usize, Vec<f64>)> = Vec::with_capacity(items.len());
        let mut pending: Vec<(usize, usize, Vec<f64>)> = items
            .into_iter()
            .enumerate()
            .map(|(idx, (s, v))| (s, idx, v))
            .collect();
        let mut out: Vec<Vec<f64>> = (0..pending.len()).map(|_| Vec::new()).collect();
        let mut disc = Vec::new();
        for i in (target_slice..start).rev() {
            // items whose values live at slice i+1 join this step
            pending.retain_mut(|(s, idx, v)| {
                if *s == i + 1 {
                    active.push((*idx, std::mem::take(v)));
                    false
                } else {
                    true
                }
            });
            if active.is_empty() {
                continue;
            }
            let w = self.width(i);
            let w_next = self.width(i + 1);
            self.discount_row(i, &mut disc);
            let p_off = (self.reach - w) as usize;
            for (_, v) in active.iter_mut() {
                debug_assert_eq!(v.len() as i64, 2 * w_next + 1);
                let mut next = Vec::with_capacity((2 * w + 1) as usize);
                for (slot, d) in disc.iter().enumerate() {
                    let idx = p_off + slot;
                    let center = (self.centers[idx] + w_next) as usize;
                    let expect = self.p_up[idx] * v[center + 1]
                        + self.p_mid[idx] * v[center]
                        + self.p_down[idx] * v[center - 1];
                    next.push(expect * d);
                }
                *v = next;
            }
        }
        for (s, idx, v) in pending {
            debug_assert_eq!(s, target_slice);
            out[idx] = v;
        }
        for (idx, v) in active {
            out[idx] = v;
        }
        out
    }

    /// Roll `values` (one per node at `slice_hi`) back to `slice_lo`,
    /// discounting each step.
    pub fn backward(&self, values: Vec<f64>, slice_hi: usize, slice_lo: usize) -> Vec<f64> {
        self.roll_back_many(vec![(slice_hi, values)], slice_lo)
            .pop()
            .unwrap()
    }

    /// Time-0 price of a unit payment at `maturity`.
    pub fn bond_price(&self, maturity: f64) -> Result<f64> {
        let slice = self.slice_index(maturity)?;
        if slice == 0 {
            return Ok(1.0);
        }
        let n = (2 * self.width(slice) + 1) as usize;
        Ok(self.backward(vec![1.0; n], slice, 0)[0])
    }

    /// Per-node prices at `expiry` of a unit payment at `maturity`.
    pub fn node_bonds(&self, expiry: f64, maturity: f64) -> Result<Vec<f64>> {
        let hi = self.slice_index(maturity)?;
        let lo = self.slice_index(expiry)?;
        if hi < lo {
            return Err(Error::invalid("bond maturity before expiry".to_string()));
        }
        let n = (2 * self.width(hi) + 1) as usize;
        Ok(self.backward(vec![1.0; n], hi, lo))
    }

    /// Discount per-node `values` observed at `expiry` back to time 0.
    pub fn present_value(&self, values: Vec<f64>, expiry: f64) -> Result<f64> {
        let slice = self.slice_index(expiry)?;
        Ok(self.backward(values, slice, 0)[0])
    }

    /// Per-node bonds at an expiry for every payment date of a swap, one
    /// shared sweep. Entry k-1 holds `B(expiry, expiry + k period)`.
    pub fn expiry_bond_set(
        &self,
        expiry: f64,
        period: f64,
        payments: usize,
    ) -> Result<Vec<Vec<f64>>> {
        let lo = self.slice_index(expiry)?;
        let mut items = Vec::with_capacity(payments);
        for k in 1..=payments {
            let hi = self.slice_index(expiry + k as f64 * period)?;
            if hi < lo {
                return Err(Error::invalid("payment date before expiry".to_string()));
            }
            items.push((hi, vec![1.0; (2 * self.width(hi) + 1) as usize]));
        }
        Ok(self.roll_back_many(items, lo))
    }

    /// Forward swap rate and annuity at time 0 from lattice bonds.
    pub fn swap_rate(&self, expiry: f64, period: f64, payments: usize) -> Result<(f64, f64)> {
        let bond_t = self.bond_price(expiry)?;
        let mut annuity = 0.0;
        let mut terminal = 0.0;
        for k in 1..=payments {
            terminal = self.bond_price(expiry + k as f64 * period)?;
            annuity += period * terminal;
        }
        Ok(((bond_t - terminal) / annuity, annuity))
    }

    /// Swaption price by backward induction: per-node coupon sum at expiry
    /// from tree bonds, kinked payoff, then discounting to 0.
    pub fn swaption_price(&self, spec: &SwaptionSpec) -> Result<f64> {
        let bonds = self.expiry_bond_set(spec.expiry, spec.period, spec.payments)?;
        let payoff = swaption_payoff(&bonds, spec.period, spec.strike, spec.side.omega());
        self.present_value(payoff, spec.expiry)
    }
}

/// Per-node payoff `(omega (1 - C))^+` from an expiry bond set.
pub fn swaption_payoff(bonds: &[Vec<f64>], period: f64, strike: f64, omega: f64) -> Vec<f64> {
    let n = bonds.last().map_or(0, Vec::len);
    let mut payoff = Vec::with_capacity(n);
    for node in 0..n {
        let mut coupon = bonds[bonds.len() - 1][node];
        for row in bonds {
            coupon += strike * period * row[node];
        }
        payoff.push((omega * (1.0 - coupon)).max(0.0));
    }
    payoff
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate_time;
    use crate::swaption::Side;

    fn setup(sigma: f64, b: f64, r0: f64) -> ModelParams {
        ModelParams::with_constant_drift(sigma, b, r0, b * (0.03f64).ln()).unwrap()
    }

    #[test]
    fn branch_probabilities_are_valid_and_exact_in_moments() {
        let params = setup(0.25, 0.1, 0.03);
        let lat = lattice_build(&params, 10.0, &LatticeConfig::default()).unwrap();
        let b = 0.1;
        let step_var = 0.25 * 0.25 * (1.0 - (-2.0 * b * lat.dt).exp()) / (2.0 * b);
        let dy = (3.0 * step_var).sqrt();
        let decay = (-b * lat.dt).exp();
        for j in [-lat.reach, -5, 0, 7, lat.reach] {
            let (c, pu, pm, pd) = lat.branch(j);
            assert!(pu >= 0.0 && pm >= 0.0 && pd >= 0.0, "node {j}");
            assert!((pu + pm + pd - 1.0).abs() < 1e-14);
            // conditional mean and variance must match the exact OU step
            let mean = dy * (pu * (c + 1) as f64 + pm * c as f64 + pd * (c - 1) as f64);
            let expect_mean = j as f64 * dy * decay;
            assert!((mean - expect_mean).abs() < 1e-13 * (1.0 + expect_mean.abs()));
            let var = pu * (dy * (c + 1) as f64 - mean).powi(2)
                + pm * (dy * c as f64 - mean).powi(2)
                + pd * (dy * (c - 1) as f64 - mean).powi(2);
            assert!((var - step_var).abs() < 1e-16, "var {var} vs {step_var}");
        }
    }

    #[test]
    fn one_step_root_has_symmetric_branches() {
        let params = setup(0.25, 0.1, 0.03);
        let lat = lattice_build(&params, 1.0, &LatticeConfig::default()).unwrap();
        let (_, pu, pm, pd) = lat.branch(0);
        assert!((pu + pm + pd - 1.0).abs() < 1e-15);
        assert!((pu - pd).abs() < 1e-15, "zero drift at the root");
    }

    #[test]
    fn switchover_index_matches_standard_ceiling() {
        let params = setup(0.25, 0.1, 0.03);
        let cfg = LatticeConfig {
            steps_per_year: 64,
            width_multiplier: 1.0,
        };
        let lat = lattice_build(&params, 20.0, &cfg).unwrap();
        let expect = (0.184f64 / (0.1 / 64.0)).ceil() as i64;
        assert!(
            (lat.jmax - expect).abs() <= 1,
            "jmax {} vs {expect}",
            lat.jmax
        );
    }

    #[test]
    fn deterministic_limit_prices_discounted_rbar() {
        let params = setup(1e-12, 0.1, 0.03);
        let lat = lattice_build(&params, 2.0, &LatticeConfig::default()).unwrap();
        let got = lat.bond_price(2.0).unwrap();
        let expect = (-integrate_time(|t| params.rbar(0.03, 0.0, t), 0.0, 2.0, 64).unwrap()).exp();
        // rate-at-step-start discounting leaves O(dt) bias; 64 steps/year is
        // within a basis point over 2 years
        assert!((got.ln() - expect.ln()).abs() < 2e-4, "{got} vs {expect}");
    }

    #[test]
    fn bundled_rollback_matches_individual_passes() {
        let params = setup(0.25, 0.1, 0.03);
        let lat = lattice_build(&params, 4.0, &LatticeConfig::default()).unwrap();
        let set = lat.expiry_bond_set(2.0, 1.0, 2).unwrap();
        for (k, bundle) in set.iter().enumerate() {
            let single = lat.node_bonds(2.0, 2.0 + (k + 1) as f64).unwrap();
            assert_eq!(bundle.len(), single.len());
            for (a, b) in bundle.iter().zip(&single) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn lattice_parity_is_machine_exact() {
        let params = setup(0.25, 0.1, 0.03);
        let lat = lattice_build(&params, 4.0, &LatticeConfig::default()).unwrap();
        let (fwd, annuity) = lat.swap_rate(2.0, 1.0, 2).unwrap();
        let strike = fwd * 1.07;
        let payer = lat
            .swaption_price(&SwaptionSpec::new(2.0, 1.0, 2, strike, Side::Payer).unwrap())
            .unwrap();
        let receiver = lat
            .swaption_price(&SwaptionSpec::new(2.0, 1.0, 2, strike, Side::Receiver).unwrap())
            .unwrap();
        let bond_t = lat.bond_price(2.0).unwrap();
        let bond_end = lat.bond_price(4.0).unwrap();
        let rhs = bond_t - bond_end - strike * annuity;
        assert!(
            ((payer - receiver) - rhs).abs() < 1e-12,
            "parity residual {:.3e}",
            (payer - receiver) - rhs
        );
        assert!(payer > 0.0 && receiver > 0.0);
    }

    #[test]
    fn probability_mass_is_conserved() {
        // rolling back a unit payoff without discounting keeps total mass 1
        let params = setup(0.25, 0.1, 0.03);
        let lat = lattice_build(&params, 3.0, &LatticeConfig::default()).unwrap();
        let slice = lat.slice_index(3.0).unwrap();
        let n = (2 * lat.width(slice) + 1) as usize;
        let mut v = vec![1.0; n];
        for i in (0..slice).rev() {
            let w = lat.width(i);
            let w_next = lat.width(i + 1);
            let p_off = (lat.reach - w) as usize;
            let mut next = Vec::with_capacity((2 * w + 1) as usize);
            for slot in 0..(2 * w + 1) as usize {
                let idx = p_off + slot;
                let center = (lat.centers[idx] + w_next) as usize;
                next.push(
                    lat.p_up[idx] * v[center + 1]
                        + lat.p_mid[idx] * v[center]
                        + lat.p_down[idx] * v[center - 1],
                );
            }
            v = next;
        }
        assert!((v[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn halving_dt_moves_10y_yield_under_a_third_of_a_bp() {
        let params = setup(0.25, 0.1, 0.03);
        let y64 = {
            let lat = lattice_build(&params, 10.0, &LatticeConfig::default()).unwrap();
            -lat.bond_price(10.0).unwrap().ln() / 10.0
        };
        let y128 = {
            let cfg = LatticeConfig {
                steps_per_year: 128,
                width_multiplier: 1.0,
            };
            let lat = lattice_build(&params, 10.0, &cfg).unwrap();
            -lat.bond_price(10.0).unwrap().ln() / 10.0
        };
        assert!((y64 - y128).abs() < 0.3e-4, "{}", (y64 - y128).abs());
    }

    #[test]
    fn off_grid_maturity_snaps() {
        let params = setup(0.25, 0.1, 0.03);
        let lat = lattice_build(&params, 1.0, &LatticeConfig::default()).unwrap();
        let a = lat.bond_price(0.5).unwrap();
        let snapped = lat.bond_price(0.5 + 0.2 / 64.0).unwrap();
        assert_eq!(a.to_bits(), snapped.to_bits());
        assert!(lat.bond_price(2.0).is_err());
    }
}
