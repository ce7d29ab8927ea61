//! Ground-truth engines the approximations are benchmarked against.
//!
//! The Monte Carlo simulator uses the exact OU transition (no Euler bias in
//! the deviation process) and trapezoidal rate integration. The trinomial
//! lattice matches the exact per-step conditional mean and variance of the
//! deviation and is the swaption benchmark; nested expectations make a
//! swaption Monte Carlo impractical.

mod lattice;
mod mc;

pub use lattice::{lattice_build, swaption_payoff, Lattice, LatticeConfig};
pub use mc::{mc_bond_price, mc_bond_prices, mc_conditional_discount, McBin, McConfig, McEstimate};
